"""
The surviving maximal-spin tower
================================

f(E) adds up the squared overlaps between the maximal-spin tower and all
perturbed eigenstates inside a window of width Delta around E. Peaks close to
1 at the unperturbed ladder energies mean the tower survives the random
fields as a set of quantum many-body scars.

The profile depends strongly on the draw. Seed 4 below is a favourable one;
other seeds split the low-energy rungs over several perturbed states and
their peaks drop well below 1.
"""

import numpy as np

from scarlab import load_cluster, sample_fields
from scarlab.experiments import scar_analysis

N = 10
graph = load_cluster(f"chain:{N}:periodic")
real = sample_fields(N, 0.15, 0.0, 0.5, seed=4)
spec, ft, profile, peaks = scar_analysis(graph, real)

print(f"window Delta = {profile.window:.4f}, {len(peaks)} peaks for {ft.energies.size} rungs")
print("  rung E     nearest peak E     f")
for e in ft.energies:
    pos = np.array([p[0] for p in peaks])
    j = int(np.argmin(np.abs(pos - e)))
    print(f"{e:8.3f}   {peaks[j][0]:12.3f}   {peaks[j][1]:8.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    plt.plot(profile.energy_grid, profile.f_values, lw=0.8)
    plt.vlines(ft.energies, 0, 1.05, colors="0.7", linestyles=":")
    plt.xlabel("E")
    plt.ylabel("f(E)")
    plt.savefig("scar_profile.png", dpi=120)
    print("saved scar_profile.png")
