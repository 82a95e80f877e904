import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from scarlab.levelstats import (
    LevelSet,
    average_histograms,
    gap_ratios,
    histogram_l1,
    normalize_spacings,
    reference_pdf,
    reference_r,
    spacing_histogram,
)


def test_gap_ratio_examples():
    st_ = gap_ratios([0, 1, 2, 3])
    assert np.allclose(st_.per_level_r, 1) and st_.mean_r == 1
    st_ = gap_ratios(LevelSet([0, 1, 3, 4]))
    assert np.allclose(st_.per_level_r, [0.5, 0.5]) and st_.mean_r == 0.5


def test_gap_ratio_drops_degenerate_pairs():
    st_ = gap_ratios([0, 1, 1, 2, 4])
    # spacings 1, 0, 1, 2: only the (1, 2) pair survives
    assert st_.dropped_degenerate == 2
    assert np.allclose(st_.per_level_r, [0.5])


def test_gap_ratio_too_few_levels():
    with pytest.raises(ValueError):
        gap_ratios([0, 1])


def test_gap_ratio_poisson_monte_carlo():
    rng = np.random.default_rng(2024)
    levels = np.cumsum(rng.exponential(size=10**6))
    assert abs(gap_ratios(levels).mean_r - 0.386) <= 0.003


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-50, 50), st.integers(0, 1000))
def test_gap_ratio_affine_invariance(a, b, seed):
    E = np.cumsum(np.random.default_rng(seed).uniform(0.5, 1.5, 50))
    r0 = gap_ratios(E).per_level_r
    r1 = gap_ratios(a * E + b).per_level_r
    # rounding of a*E+b perturbs each spacing by ~eps*(|b| + a*max E), relative to a*min spacing
    eps = np.finfo(float).eps
    bound = 8 * eps * (abs(b) + a * E[-1]) / (a * np.diff(E).min())
    assert np.allclose(r0, r1, atol=bound + 1e-14, rtol=0)


def test_mean_spacing_normalization():
    assert np.allclose(normalize_spacings([0, 2, 4, 6]), [1, 1, 1])
    E = np.sort(np.random.default_rng(0).normal(size=200))
    assert abs(normalize_spacings(E).mean() - 1) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(0, 1000))
def test_mean_spacing_scale_invariance(a, seed):
    E = np.sort(np.random.default_rng(seed).uniform(0, 1, 30))
    assert np.allclose(normalize_spacings(E), normalize_spacings(a * E), atol=1e-12, rtol=0)


def test_normalization_errors():
    with pytest.raises(ValueError):
        normalize_spacings([1, 1, 1])
    with pytest.raises(ValueError):
        normalize_spacings([1, 1, 1], "polynomial")
    with pytest.raises(ValueError):
        normalize_spacings([0, 1, 2], "cubic")


def test_degenerate_spacings_removed():
    s = normalize_spacings([0, 1, 1, 2, 4], degeneracy_cut=1e-10)
    assert np.allclose(s, [1, 1, 2] / np.mean([1, 1, 2]))


def test_goe_unfolding_matches_surmise():
    # independent oracle: a sampled GOE matrix, bulk levels only
    rng = np.random.default_rng(7)
    pooled = []
    for _ in range(20):
        A = rng.normal(size=(1000, 1000))
        E = np.linalg.eigvalsh((A + A.T) / 2)
        pooled.append(normalize_spacings(E[250:750], "polynomial", degree=10))
    assert histogram_l1(spacing_histogram(np.concatenate(pooled)), "goe") < 0.08


def test_histogram_examples():
    h = spacing_histogram(np.ones(10), bins=4, s_max=4)
    assert np.count_nonzero(h.densities) == 1
    assert h.densities[1] == 1.0 / h.widths[1]
    h = spacing_histogram(np.random.default_rng(1).exponential(size=500))
    assert abs(np.sum(h.densities * h.widths) - 1) <= 1e-9
    with pytest.raises(ValueError):
        spacing_histogram([])
    with pytest.raises(ValueError):
        spacing_histogram([-0.1, 1])


def test_exponential_samples_converge_to_poisson():
    s = np.random.default_rng(3).exponential(size=10**5)
    assert histogram_l1(spacing_histogram(s), "poisson") < 0.05


def test_reference_pdf_values():
    assert reference_pdf("poisson", 0) == 1
    assert reference_pdf("goe", 0) == 0
    assert reference_pdf("gue", 0) == 0
    for kind in ("poisson", "goe", "gue"):
        total, _ = quad(lambda s: reference_pdf(kind, s), 0, 20, epsabs=1e-12)
        assert abs(total - 1) <= 1e-6
    with pytest.raises(ValueError):
        reference_pdf("goe", -1)


def test_reference_r_values():
    assert reference_r("poisson") == 0.39
    assert reference_r("goe") == 0.53
    assert reference_r("gue") == 0.60


def test_average_histograms():
    h = spacing_histogram(np.random.default_rng(5).exponential(size=300))
    avg = average_histograms([h, h, h])
    assert np.allclose(avg.densities, h.densities)
    a = spacing_histogram([0.5], bins=4, s_max=4)
    b = spacing_histogram([2.5], bins=4, s_max=4)
    avg = average_histograms([a, b])
    assert np.allclose(avg.densities, [0.5, 0, 0.5, 0])
    assert abs(np.sum(avg.densities * avg.widths) - 1) <= 1e-9
    with pytest.raises(ValueError):
        average_histograms([a, spacing_histogram([0.5], bins=5, s_max=4)])
