"""Tower survival under perturbation: the windowed overlap profile f(E) and
ablations of the perturbation in the tower-labeled basis of H0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .spectral import Spectrum, TowerTable

ABLATION_MODES = ("none", "full", "intra_l_only", "inter_l_only")


@dataclass
class ScarProfile:
    energy_grid: np.ndarray
    f_values: np.ndarray
    window: float
    tower_ref: tuple = (1, None)


def tower_weights(perturbed: Spectrum, tower_states: np.ndarray) -> np.ndarray:
    """Total squared overlap of each perturbed eigenstate with the tower."""
    if perturbed.vectors is None:
        raise ValueError("scar analysis needs eigenvectors")
    T = np.asarray(tower_states)
    if T.ndim == 1:
        T = T[:, None]
    ov = perturbed.vectors.conj().T @ T
    return np.sum(np.abs(ov) ** 2, axis=1)


def default_window(energies) -> float:
    E = np.asarray(energies)
    return float((E.max() - E.min()) / 200.0)


def scar_grid(energies, window: float, ladder=None) -> np.ndarray:
    """Uniform grid of step ``window`` over the spectrum plus the ladder energies."""
    E = np.asarray(energies)
    n = int(np.floor((E.max() - E.min()) / window)) + 1
    grid = E.min() + window * np.arange(n)
    if ladder is not None:
        grid = np.concatenate([grid, np.asarray(ladder, dtype=float)])
    return np.unique(grid)


def scar_fidelity(
    perturbed: Spectrum,
    tower_states: np.ndarray,
    grid=None,
    window: float | None = None,
    ladder=None,
    tower_ref=(1, None),
) -> ScarProfile:
    """Windowed overlap profile of a tower against perturbed eigenstates.

    ``f(E)`` sums ``|<phi_k|psi_m>|^2`` over tower members ``m`` and every
    eigenstate ``k`` with ``E - window/2 <= E_k < E + window/2``.
    """
    E = np.asarray(perturbed.energies)
    if window is None:
        window = default_window(E)
    if window <= 0:
        raise ValueError("window must be positive")
    if grid is None:
        grid = scar_grid(E, window, ladder)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty energy grid")
    w = tower_weights(perturbed, tower_states)
    order = np.argsort(E, kind="stable")
    Es, cum = E[order], np.concatenate([[0.0], np.cumsum(w[order])])
    lo = np.searchsorted(Es, grid - window / 2, side="left")
    hi = np.searchsorted(Es, grid + window / 2, side="left")
    f = cum[hi] - cum[lo]
    return ScarProfile(grid, np.clip(f, 0.0, None), float(window), tower_ref)


def extract_peaks(profile: ScarProfile, min_height: float = 0.1) -> list[tuple[float, float]]:
    """Local maxima of ``f(E)`` above ``min_height``.

    Equal neighbouring values form a plateau which counts once, at its
    leftmost point. Points beyond the grid count as minus infinity.
    """
    f = np.asarray(profile.f_values)
    x = np.asarray(profile.energy_grid)
    if f.size == 0:
        return []
    starts = np.concatenate([[0], np.flatnonzero(np.diff(f) != 0) + 1])
    vals = f[starts]
    peaks = []
    for k, start in enumerate(starts):
        left = vals[k - 1] if k > 0 else -np.inf
        right = vals[k + 1] if k + 1 < vals.size else -np.inf
        if vals[k] > left and vals[k] > right and vals[k] >= min_height:
            peaks.append((float(x[start]), float(vals[k])))
    return peaks


def tower_basis_matrix(table: TowerTable, h_ran, mode: str = "full") -> np.ndarray:
    """``U^dag (H0 + H_ran) U`` in the tower-labeled eigenbasis of ``H0``, ablated.

    Off-diagonal entries are kept or zeroed by comparing the total spin of
    row and column: ``intra_l_only`` keeps equal-``l`` couplings,
    ``inter_l_only`` keeps the rest, ``none`` keeps only the diagonal.
    """
    if mode not in ABLATION_MODES:
        raise ValueError(f"unknown ablation mode {mode!r}")
    U = table.vectors
    if sp.issparse(h_ran):
        if h_ran.shape != (U.shape[0], U.shape[0]):
            raise ValueError("perturbation and tower basis dimensions differ")
        if np.iscomplexobj(h_ran.data) and not np.any(h_ran.data.imag):
            h_ran = h_ran.real
        P = np.asarray(h_ran @ U)
    else:
        h_ran = np.asarray(h_ran)
        if h_ran.shape != (U.shape[0], U.shape[0]):
            raise ValueError("perturbation and tower basis dimensions differ")
        P = h_ran @ U
    M = U.conj().T @ P
    if not np.iscomplexobj(U) and np.iscomplexobj(M) and not np.any(M.imag):
        M = M.real
    # H0 is diagonal in its own eigenbasis
    M[np.diag_indices_from(M)] += table.energies
    if mode != "full":
        same_l = table.l[:, None] == table.l[None, :]
        if mode == "none":
            keep = np.eye(M.shape[0], dtype=bool)
        elif mode == "intra_l_only":
            keep = same_l
        else:
            keep = ~same_l
        keep = keep | np.eye(M.shape[0], dtype=bool)
        M = np.where(keep, M, 0.0)
    asym = float(np.max(np.abs(M - M.conj().T)))
    if asym > 1e-12:
        raise ValueError(f"ablated matrix is not Hermitian (deviation {asym:.3g})")
    return 0.5 * (M + M.conj().T)
