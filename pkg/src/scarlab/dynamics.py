"""Initial states and return fidelity under spectral time evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum
from .spin import tower_op


@dataclass
class FidelitySeries:
    times: np.ndarray
    values: np.ndarray


def make_state(kind: str, N: int, custom=None) -> np.ndarray:
    """Unit state vector of the requested kind.

    ``W`` is the normalized ``Q|all up>`` (one flipped spin), ``GHZ`` the equal
    superposition of all-up and all-down, ``Neel`` alternates up/down by site
    index starting with up on site 0. ``custom`` takes either a bit string
    (character ``j`` is site ``j``, ``1`` = up) or a full amplitude vector.
    """
    dim = 2**N
    psi = np.zeros(dim, dtype=complex)
    if kind == "W":
        all_up = np.zeros(dim, dtype=complex)
        all_up[dim - 1] = 1.0
        psi = tower_op(N).conj().T @ all_up
    elif kind == "Wprime":
        all_down = np.zeros(dim, dtype=complex)
        all_down[0] = 1.0
        psi = tower_op(N) @ all_down
    elif kind == "GHZ":
        psi[0] = psi[dim - 1] = 1.0
    elif kind == "Neel":
        if N % 2:
            raise ValueError("Neel state needs an even number of sites")
        psi[sum(1 << j for j in range(0, N, 2))] = 1.0
    elif kind == "custom":
        if isinstance(custom, str):
            if len(custom) != N or set(custom) - {"0", "1"}:
                raise ValueError(f"bit string must have {N} characters of 0/1")
            psi[sum(1 << j for j, c in enumerate(custom) if c == "1")] = 1.0
        else:
            psi = np.asarray(custom, dtype=complex).copy()
            if psi.shape != (dim,):
                raise ValueError(f"amplitude vector must have length {dim}")
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("state has zero norm")
    return psi / norm


def overlap_weights(spec: Spectrum, psi0: np.ndarray) -> np.ndarray:
    """``|<phi_k|psi0>|^2`` for every eigenstate."""
    if spec.vectors is None:
        raise ValueError("time evolution needs eigenvectors")
    psi0 = np.asarray(psi0)
    if psi0.shape[0] != spec.vectors.shape[0]:
        raise ValueError("state and spectrum dimensions differ")
    return np.abs(spec.vectors.conj().T @ psi0) ** 2


def fidelity_from_weights(energies, weights, times) -> np.ndarray:
    E = np.asarray(energies)
    t = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    amp = np.exp(-1j * np.outer(t, E)) @ weights
    return np.abs(amp) ** 2


def fidelity_series(spec: Spectrum, psi0: np.ndarray, times) -> FidelitySeries:
    """Return fidelity ``|<psi0|exp(-iHt)|psi0>|^2`` from the eigendecomposition."""
    w = overlap_weights(spec, psi0)
    times = np.asarray(times, dtype=float)
    return FidelitySeries(times, fidelity_from_weights(spec.energies, w, times))


def default_times(tmax: float = 100.0, tpoints: int = 2000) -> np.ndarray:
    return np.linspace(0.0, tmax, tpoints)


def revival_metrics(series: FidelitySeries, threshold: float = 0.1, peak_floor: float = 0.5) -> dict:
    """Summary of a fidelity curve.

    Revival peaks are interior local maxima at or above ``peak_floor``;
    ``decay_time`` is the first time the fidelity drops below ``threshold``
    (None if it never does).
    """
    t = np.asarray(series.times)
    F = np.asarray(series.values)
    if F.size == 0:
        raise ValueError("empty fidelity series")
    interior = np.arange(1, F.size - 1)
    is_peak = (F[interior] > F[interior - 1]) & (F[interior] >= F[interior + 1])
    idx = interior[is_peak & (F[interior] >= peak_floor)]
    below = np.flatnonzero(F < threshold)
    return {
        "min_F": float(F.min()),
        "revival_peaks": [(float(t[k]), float(F[k])) for k in idx],
        "decay_time": float(t[below[0]]) if below.size else None,
    }
