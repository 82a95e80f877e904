from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarlab.cluster import load_cluster
from scarlab.dynamics import (
    FidelitySeries,
    default_times,
    fidelity_from_weights,
    fidelity_series,
    make_state,
    overlap_weights,
    revival_metrics,
)
from scarlab.spectral import Spectrum, diagonalize, first_tower
from scarlab.spin import build_h0, build_hamiltonian, sample_fields, total_spin_ops

import oracle


@pytest.fixture(scope="module")
def chain12():
    g = load_cluster("chain:12:periodic")
    return g, diagonalize(build_h0(g, 0.5).real.toarray())


def test_state_examples():
    N = 12
    ghz = make_state("GHZ", N)
    assert np.isclose(ghz[2**N - 1], 1 / np.sqrt(2), atol=1e-15)
    W = make_state("W", N)
    sz = total_spin_ops(N)["z"]
    assert abs(np.vdot(W, sz @ W).real - 5) <= 1e-12
    assert np.allclose(W, oracle.dicke(N, N - 1))
    assert np.allclose(make_state("Wprime", N), oracle.dicke(N, 1))
    neel = make_state("Neel", N)
    assert neel[int("010101010101", 2)] == 1
    psi60 = first_tower(load_cluster("chain:12:periodic"), 0.5).states[:, 6]
    assert abs(abs(np.vdot(psi60, neel)) - 1 / np.sqrt(comb(12, 6))) <= 1e-12


def test_custom_states():
    s = make_state("custom", 4, "1000")
    assert s[1] == 1
    amp = np.arange(16, dtype=float)
    v = make_state("custom", 4, amp)
    assert np.isclose(np.linalg.norm(v), 1) and np.allclose(v, amp / np.linalg.norm(amp))
    for bad in ("10", "1020"):
        with pytest.raises(ValueError):
            make_state("custom", 4, bad)
    with pytest.raises(ValueError):
        make_state("custom", 4, np.zeros(16))
    with pytest.raises(ValueError):
        make_state("custom", 4, np.ones(8))
    with pytest.raises(ValueError):
        make_state("Neel", 5)
    with pytest.raises(ValueError):
        make_state("cat", 4)


@pytest.mark.parametrize("kind", ["W", "Wprime", "GHZ", "Neel"])
def test_states_are_normalized(kind):
    assert abs(np.linalg.norm(make_state(kind, 8)) - 1) <= 1e-12


def test_ghz_matches_two_level_oracle(chain12):
    g, spec = chain12
    t = default_times()
    F = fidelity_series(spec, make_state("GHZ", 12), t)
    assert np.max(np.abs(F.values - np.cos(3 * t) ** 2)) <= 1e-9
    m = revival_metrics(F)
    times = np.array([p[0] for p in m["revival_peaks"]])
    k = np.round(times / (np.pi / 3))
    step = t[1] - t[0]
    assert np.all(np.abs(times - k * np.pi / 3) <= step)
    # sampled peaks sit at most half a step from the true maximum
    floor = np.cos(3 * step / 2) ** 2
    assert np.all(np.array([p[1] for p in m["revival_peaks"]]) >= floor - 1e-12)
    assert len(times) == int(t[-1] / (np.pi / 3))


def test_w_is_stationary_without_fields(chain12):
    g, spec = chain12
    F = fidelity_series(spec, make_state("W", 12), default_times(50, 500))
    assert np.max(np.abs(F.values - 1)) <= 1e-10


def test_fidelity_matches_matrix_exponential():
    g = load_cluster("chain:6:periodic")
    real = sample_fields(6, 0.3, 0.2, 0.5, 9)
    H = oracle.heisenberg(6, g.edges, 0.5) + oracle.fields(6, real.xs, real.ys)
    spec = diagonalize(build_hamiltonian(g, real))
    psi = make_state("Neel", 6)
    t = np.linspace(0, 10, 25)
    assert np.allclose(fidelity_series(spec, psi, t).values, oracle.fidelity(H, psi, t), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["W", "GHZ", "Neel"]))
def test_conservation_and_time_reversal(seed, kind):
    g = load_cluster("chain:6:periodic")
    spec = diagonalize(build_hamiltonian(g, sample_fields(6, 0.4, 0.0, 0.5, seed)))
    psi = make_state(kind, 6)
    w = overlap_weights(spec, psi)
    assert abs(w.sum() - 1) <= 1e-10
    t = np.linspace(0, 20, 41)
    F = fidelity_series(spec, psi, t).values
    assert abs(F[0] - 1) <= 1e-12
    assert np.all(F <= 1 + 1e-12) and np.all(F >= 0)
    assert np.max(np.abs(F - fidelity_series(spec, psi, -t).values)) <= 1e-12


def test_eigenstate_is_stationary():
    g = load_cluster("chain:6:periodic")
    spec = diagonalize(build_hamiltonian(g, sample_fields(6, 0.3, 0.3, 0.5, 2)))
    F = fidelity_series(spec, spec.vectors[:, 17], np.linspace(0, 50, 30))
    assert np.max(np.abs(F.values - 1)) <= 1e-10


def test_degenerate_reordering_invariance():
    E = np.array([0.0, 1.0, 1.0, 2.0])
    V = np.eye(4)
    psi = np.array([0.5, 0.5, 0.5, 0.5])
    R = np.eye(4)
    c, s = np.cos(0.3), np.sin(0.3)
    R[1:3, 1:3] = [[c, -s], [s, c]]
    t = np.linspace(0, 5, 11)
    a = fidelity_series(Spectrum(E, V), psi, t).values
    b = fidelity_series(Spectrum(E, V @ R), psi, t).values
    assert np.max(np.abs(a - b)) <= 1e-10


def test_fidelity_errors():
    spec = Spectrum(np.zeros(4), np.eye(4))
    with pytest.raises(ValueError):
        fidelity_series(spec, np.ones(8) / np.sqrt(8), [0.0])
    with pytest.raises(ValueError):
        fidelity_series(Spectrum(np.zeros(4)), np.ones(4) / 2, [0.0])
    with pytest.raises(ValueError):
        fidelity_from_weights(np.zeros(4), np.ones(4) / 4, [0.0, np.inf])


def test_revival_metrics_examples():
    t = np.linspace(0, 10, 101)
    m = revival_metrics(FidelitySeries(t, np.ones_like(t)))
    assert m["min_F"] == 1 and m["decay_time"] is None and m["revival_peaks"] == []
    F = np.exp(-t)
    m = revival_metrics(FidelitySeries(t, F))
    assert abs(m["decay_time"] - t[np.argmax(F < 0.1)]) == 0
    with pytest.raises(ValueError):
        revival_metrics(FidelitySeries(np.array([]), np.array([])))


def test_default_times():
    t = default_times()
    assert t.size == 2000 and t[0] == 0 and t[-1] == 100
