"""
Level statistics across the three regimes
=========================================

The mean gap ratio r distinguishes integrable spectra (Poisson, r ~ 0.39)
from chaotic ones with time-reversal symmetry (GOE, r ~ 0.53) or without it
(GUE, r ~ 0.60). Random transverse fields along x alone give a real
Hamiltonian; adding y-fields makes it genuinely complex.

A ten-site ring with a handful of draws keeps this quick; the acceptance
suite runs the same pipeline at N = 12 with 100 draws.
"""

import numpy as np

from scarlab import average_histograms, load_cluster
from scarlab.experiments import run_level_ensemble
from scarlab.levelstats import histogram_l1

graph = load_cluster("chain:10:periodic")
h = 0.5
regimes = [
    ("no random fields, per m sector", 0.0, 0.0, "sector", "poisson"),
    ("random x-fields", 0.15, 0.0, "whole", "goe"),
    ("random x- and y-fields", 0.15, 0.15, "whole", "gue"),
]

for title, x, y, scope, kind in regimes:
    res = run_level_ensemble(graph, x, y, h, seed=0, realizations=5, scope=scope,
                             min_levels=50, normalize=("polynomial", 10), trim=0.05)
    r = np.mean([v["mean_r"] for v in res])
    hist = average_histograms(v["hist"] for v in res)
    print(f"{title:32s} r = {r:.3f}   L1 distance to {kind.upper()}: {histogram_l1(hist, kind):.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    from scarlab import reference_pdf

    s = np.linspace(0, 4, 200)
    plt.bar(hist.centers, hist.densities, width=hist.widths, alpha=0.5, label="x, y fields")
    for k in ("poisson", "goe", "gue"):
        plt.plot(s, reference_pdf(k, s), label=k.upper())
    plt.xlabel("s")
    plt.ylabel("P(s)")
    plt.legend()
    plt.savefig("level_statistics.png", dpi=120)
    print("saved level_statistics.png")
