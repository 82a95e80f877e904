"""Level-spacing statistics: gap ratios, spacing normalization, P(s) histograms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial import Polynomial

REFERENCE_R = {"poisson": 0.39, "goe": 0.53, "gue": 0.60}


@dataclass
class LevelSet:
    energies: np.ndarray
    scope: str = "whole_spectrum"
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.energies = np.sort(np.asarray(self.energies, dtype=float))


@dataclass
class GapRatioStat:
    mean_r: float
    per_level_r: np.ndarray
    dropped_degenerate: int


@dataclass
class SpacingHistogram:
    bin_edges: np.ndarray
    densities: np.ndarray
    sample_count: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def _energies(levels) -> np.ndarray:
    E = levels.energies if isinstance(levels, LevelSet) else np.sort(np.asarray(levels, float))
    if E.size < 3:
        raise ValueError("level statistics need at least three levels")
    return E


def gap_ratios(levels, degeneracy_cut: float = 1e-10) -> GapRatioStat:
    """Adjacent-gap ratios ``min(s_l, s_l+1) / max(s_l, s_l+1)``.

    Pairs in which either spacing is below ``degeneracy_cut`` are dropped,
    since the ratio is undefined for exactly degenerate levels.
    """
    s = np.diff(_energies(levels))
    a, b = s[:-1], s[1:]
    keep = (a >= degeneracy_cut) & (b >= degeneracy_cut)
    r = np.minimum(a[keep], b[keep]) / np.maximum(a[keep], b[keep])
    mean = float(r.mean()) if r.size else float("nan")
    return GapRatioStat(mean, r, int((~keep).sum()))


def normalize_spacings(
    levels,
    mode: str = "mean_spacing",
    degree: int = 10,
    trim: float = 0.0,
    degeneracy_cut: float | None = None,
) -> np.ndarray:
    """Dimensionless spacings with unit mean.

    ``mean_spacing`` divides raw spacings by their mean. ``polynomial``
    unfolds: a degree-``degree`` polynomial fit of the integrated level count
    maps each level to its smoothed staircase value before differencing.

    ``trim`` discards that fraction of spacings at each spectrum edge, where
    a global fit is least reliable. With ``degeneracy_cut`` set, spacings
    whose raw value falls below it are removed before the final rescaling.
    """
    E = _energies(levels)
    raw = np.diff(E)
    if mode == "mean_spacing":
        s = raw.copy()
    elif mode == "polynomial":
        if E[-1] == E[0]:
            raise ValueError("cannot unfold a fully degenerate level set")
        staircase = np.arange(1, E.size + 1, dtype=float)
        fit = Polynomial.fit(E, staircase, deg=min(degree, E.size - 1))
        s = np.diff(fit(E))
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if not 0 <= trim < 0.5:
        raise ValueError("trim must lie in [0, 0.5)")
    cut = int(trim * s.size)
    if cut:
        s, raw = s[cut:-cut], raw[cut:-cut]
    if degeneracy_cut is not None:
        s = s[raw >= degeneracy_cut]
    mean = s.mean() if s.size else 0.0
    if mean <= 0:
        raise ValueError("all levels are equal")
    return s / mean


def spacing_histogram(s_values, bins: int = 40, s_max: float = 4.0) -> SpacingHistogram:
    """Density histogram of spacings on ``[0, s_max]``; unit integral over the bins."""
    s = np.asarray(s_values, dtype=float)
    if s.size == 0:
        raise ValueError("no spacings to histogram")
    if np.any(s < 0):
        raise ValueError("spacings must be non-negative")
    counts, edges = np.histogram(s, bins=bins, range=(0.0, s_max))
    total = counts.sum()
    if total == 0:
        raise ValueError(f"no spacings fall inside [0, {s_max}]")
    dens = counts / (total * np.diff(edges))
    return SpacingHistogram(edges, dens, int(s.size))


def reference_pdf(kind: str, s):
    """Poisson, GOE or GUE Wigner-surmise spacing density."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacing must be non-negative")
    if kind == "poisson":
        out = np.exp(-s)
    elif kind == "goe":
        out = 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)
    elif kind == "gue":
        out = (32.0 / np.pi**2) * s**2 * np.exp(-4.0 * s**2 / np.pi)
    else:
        raise ValueError(f"unknown ensemble {kind!r}")
    return out if out.ndim else float(out)


def reference_r(kind: str) -> float:
    """Commonly quoted mean gap ratio for each ensemble."""
    try:
        return REFERENCE_R[kind]
    except KeyError:
        raise ValueError(f"unknown ensemble {kind!r}") from None


def histogram_l1(hist: SpacingHistogram, kind: str) -> float:
    """L1 distance to a reference density evaluated at bin midpoints."""
    ref = reference_pdf(kind, hist.centers)
    return float(np.sum(np.abs(hist.densities - ref) * hist.widths))


def average_histograms(histos) -> SpacingHistogram:
    """Bin-wise mean of histograms sharing the same edges, renormalized."""
    histos = list(histos)
    if not histos:
        raise ValueError("nothing to average")
    edges = histos[0].bin_edges
    for hh in histos[1:]:
        if hh.bin_edges.shape != edges.shape or not np.array_equal(hh.bin_edges, edges):
            raise ValueError("histograms have mismatched bins")
    dens = np.mean([hh.densities for hh in histos], axis=0)
    dens = dens / np.sum(dens * np.diff(edges))
    return SpacingHistogram(edges.copy(), dens, int(sum(hh.sample_count for hh in histos)))
