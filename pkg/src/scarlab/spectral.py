"""Dense eigensolution, magnetization sectors and tower bookkeeping."""

from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .cluster import CouplingGraph, coupling_sum
from .spin import build_h0, basis_state, is_hermitian, popcounts, total_spin_ops, tower_op

DEGENERACY_TOL = 1e-8
THREAD_TOL = 1e-8


class SpectralError(RuntimeError):
    """Raised when an eigenproblem or tower labeling cannot be completed."""


@dataclass
class Spectrum:
    """Ascending energies with eigenvectors as columns (``vectors`` may be None)."""

    energies: np.ndarray
    vectors: np.ndarray | None = None

    def __len__(self):
        return self.energies.size


def _dense(op) -> np.ndarray:
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    if vectors.size == 0:
        return vectors
    pivot = np.argmax(np.abs(vectors), axis=0)
    ph = vectors[pivot, np.arange(vectors.shape[1])]
    return vectors * (np.abs(ph) / ph)[None, :]


def diagonalize(op, vectors: bool = True, check: bool = True) -> Spectrum:
    """Full eigensystem of a Hermitian operator.

    Real input (or complex input with vanishing imaginary part) is solved as
    a real symmetric problem, which is several times faster.
    """
    H = _dense(op)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("operator must be a square matrix")
    if check and not is_hermitian(H, atol=1e-12):
        raise ValueError("operator is not Hermitian")
    if np.iscomplexobj(H) and not np.any(H.imag):
        H = H.real
    try:
        if vectors:
            E, V = la.eigh(H, check_finite=False)
            return Spectrum(E, fix_phases(V))
        E = la.eigh(H, eigvals_only=True, check_finite=False)
    except la.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    return Spectrum(E, None)


def sector_decompose(N: int) -> dict[float, np.ndarray]:
    """Basis indices of every fixed-magnetization sector, keyed by ``m``.

    Sectors are ordered from ``m = N/2`` down to ``-N/2``.
    """
    pc = popcounts(N)
    return {N / 2 - k: np.flatnonzero(pc == N - k) for k in range(N + 1)}


def tower_count(N: int, k: int) -> int:
    """Number of towers with total spin ``l = N/2 - k`` for an even cluster."""
    if N % 2:
        raise ValueError("tower counting assumes an even number of sites")
    if not 0 <= k <= N // 2:
        raise ValueError(f"k={k} outside [0, {N // 2}]")
    if k == 0:
        return 1
    return comb(N, k) - comb(N, k - 1)


def _clusters(E: np.ndarray, tol: float):
    """Index ranges of runs of (numerically) equal sorted values."""
    start = 0
    for k in range(1, E.size + 1):
        if k == E.size or E[k] - E[k - 1] > tol:
            yield start, k
            start = k


def _resolve_block(block: np.ndarray, ops) -> np.ndarray:
    if not ops or block.shape[1] < 2:
        return block
    op = ops[0]
    M = block.conj().T @ (op @ block)
    w, U = np.linalg.eigh(0.5 * (M + M.conj().T))
    block = block @ U
    # later operators only rotate within equal-eigenvalue sub-blocks
    return np.hstack([_resolve_block(block[:, a:b], ops[1:]) for a, b in _clusters(w, 1e-6)])


def _resolve(V: np.ndarray, E: np.ndarray, ops, tol: float) -> np.ndarray:
    """Rotate degenerate eigenspaces so the columns diagonalize ``ops`` jointly."""
    V = V.copy()
    for a, b in _clusters(E, tol):
        if b - a > 1:
            V[:, a:b] = _resolve_block(V[:, a:b], ops)
    return V


def diagonalize_h0(graph: CouplingGraph, h: float) -> tuple[Spectrum, np.ndarray]:
    """Sector-wise eigensolution of ``H0``.

    Each magnetization sector is split into total-spin blocks first (the
    ``s^2`` eigenvalues are exactly separated), then ``H0`` is diagonalized
    inside each block, so every eigenvector has a pure ``l`` even when levels
    of different ``l`` nearly coincide.

    Returns the spectrum (energies ascending, eigenvectors in the full basis)
    and the exact magnetization of every eigenvector.
    """
    N = graph.N
    H0 = build_h0(graph, h).real.tocsr()
    s2 = total_spin_ops(N)["s2"].real.tocsr()
    dim = 2**N
    energies, mags, cols = [], [], []
    for m, idx in sector_decompose(N).items():
        H_block = H0[idx][:, idx].toarray()
        w, W = la.eigh(s2[idx][:, idx].toarray(), check_finite=False)
        for a, b in _clusters(w, 1e-6):
            Wl = W[:, a:b]
            E, U = la.eigh(Wl.T @ H_block @ Wl, check_finite=False)
            V = np.zeros((dim, b - a))
            V[idx, :] = Wl @ U
            energies.append(E)
            mags.append(np.full(E.size, m))
            cols.append(V)
    E = np.concatenate(energies)
    m = np.concatenate(mags)
    V = np.hstack(cols)
    order = np.lexsort((m, E))
    return Spectrum(E[order], fix_phases(V[:, order])), m[order]


@dataclass
class TowerTable:
    """Per-state ``(n, l, m, E)`` labels plus the tower-consistent eigenvectors.

    Row ``k`` refers to column ``k`` of ``vectors``. Within a tower, vectors
    are related by the lowering operator, so ``Q|n,l,m>`` is proportional to
    ``|n,l,m-1>`` for every member.
    """

    n: np.ndarray
    l: np.ndarray
    m: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    h: float

    def __len__(self):
        return self.energies.size

    def tower(self, n: int) -> np.ndarray:
        """Row indices of tower ``n`` ordered by ascending ``m``."""
        rows = np.flatnonzero(self.n == n)
        return rows[np.argsort(self.m[rows])]

    def multiplicities(self) -> dict[float, int]:
        """Number of towers for each ``l``."""
        out: dict[float, int] = {}
        for n in np.unique(self.n):
            l = float(self.l[self.n == n][0])
            out[l] = out.get(l, 0) + 1
        return out


def label_towers(h0_spec: Spectrum, s2, h: float, sz=None) -> TowerTable:
    """Assign ``(n, l, m)`` to every eigenstate of an isotropic ``H0``.

    ``l`` comes from ``<s^2>`` and ``m`` from ``<s^z>``. Degenerate eigenspaces
    whose expectation values do not round cleanly are re-diagonalized in
    ``s^z`` and then ``s^2``. Towers are grown from their highest-weight
    members with the lowering operator and matched to eigenvalues at
    ``E - h`` steps.

    Tower ``n = 1`` is the ``l = N/2`` tower; the rest are numbered from 2 in
    order of ascending highest-weight energy, ties broken by larger ``l``.
    """
    if h0_spec.vectors is None:
        raise ValueError("tower labeling requires eigenvectors")
    E = np.asarray(h0_spec.energies, dtype=float)
    V = h0_spec.vectors
    dim = V.shape[0]
    N = int(round(np.log2(dim)))
    real = not np.iscomplexobj(V)
    s2 = sp.csr_matrix(s2)
    if real:
        s2 = s2.real
    if sz is None:
        sz = sp.diags((popcounts(N) - N / 2).astype(float), format="csr")

    def expect(op, vecs):
        return np.real(np.einsum("ij,ij->j", vecs.conj(), op @ vecs))

    def quantum_numbers(vecs):
        mval = expect(sz, vecs)
        s2val = expect(s2, vecs)
        lval = 0.5 * (np.sqrt(1.0 + 4.0 * np.maximum(s2val, 0.0)) - 1.0)
        m = np.round(2 * mval) / 2
        l = np.round(2 * lval) / 2
        # compare on the eigenvalue scale, where the rounding tolerance is stated
        bad = (np.abs(mval - m) > 1e-6) | (np.abs(s2val - l * (l + 1)) > 1e-6)
        return l, m, bad

    l, m, bad = quantum_numbers(V)
    if np.any(bad):
        V = _resolve(V, E, [sz, s2], DEGENERACY_TOL)
        l, m, bad = quantum_numbers(V)
        if np.any(bad):
            raise SpectralError(
                f"{int(bad.sum())} states have non-integral spin quantum numbers "
                "after degeneracy resolution"
            )

    Q = tower_op(N).conj().T.tocsr()
    if real:
        Q = Q.real
    tops = np.flatnonzero(np.isclose(m, l))
    lmax = l.max()
    top_order = sorted(tops, key=lambda k: (l[k] != lmax, E[k], -l[k], k))

    n_label = np.zeros(E.size, dtype=int)
    new_V = np.array(V)
    free = np.ones(E.size, dtype=bool)
    free[tops] = False
    # candidate rows grouped by (l, m) for threading
    by_lm: dict[tuple[float, float], np.ndarray] = {}
    for key in set(zip(l.tolist(), m.tolist())):
        rows = np.flatnonzero((l == key[0]) & (m == key[1]))
        by_lm[key] = rows[np.argsort(E[rows], kind="stable")]

    for n, k in enumerate(top_order, start=1):
        n_label[k] = n
        v = new_V[:, k]
        lk = l[k]
        for step in range(1, int(round(2 * lk)) + 1):
            mm = lk - step
            target = E[k] - step * h
            v = Q @ v
            norm = np.linalg.norm(v)
            if norm < 1e-10:
                raise SpectralError(f"lowering annihilated tower {n} at m={mm}")
            v = v / norm
            rows = by_lm.get((lk, mm), np.empty(0, dtype=int))
            cand = rows[free[rows] & (np.abs(E[rows] - target) <= THREAD_TOL)]
            if cand.size == 0:
                raise SpectralError(
                    f"no partner for tower {n} (l={lk}) at m={mm}, E={target:.12g}"
                )
            row = cand[0]
            free[row] = False
            n_label[row] = n
            new_V[:, row] = v
    if np.any(free):
        raise SpectralError(f"{int(free.sum())} states were not threaded into towers")
    return TowerTable(n_label, l, m, E.copy(), fix_phases(new_V), float(h))


@dataclass
class FirstTower:
    """The ``l = N/2`` tower: unit states for ``p = 0..N`` flipped spins and energies."""

    states: np.ndarray
    energies: np.ndarray

    @property
    def m(self) -> np.ndarray:
        N = self.states.shape[1] - 1
        return np.arange(N + 1) - N / 2


def first_tower_energies(graph: CouplingGraph, h: float) -> np.ndarray:
    """Closed-form ladder ``E_1(p) = 1/4 sum_pairs J + (p - N/2) h`` for ``p = 0..N``.

    The pair sum runs over the bonds of ``H0`` once each, which is
    ``coupling_sum(graph) / 2``.
    """
    N = graph.N
    return 0.25 * (coupling_sum(graph) / 2) + (np.arange(N + 1) - N / 2) * h


def first_tower(graph: CouplingGraph, h: float) -> FirstTower:
    """Build the maximal-spin tower by repeated raising of the all-down state.

    Each step is renormalized numerically; the raw ladder coefficients are
    ``sqrt(l(l+1) - m(m+1))`` rather than a constant.
    """
    N = graph.N
    Qd = tower_op(N)
    v = basis_state(N, 0)
    states = [v]
    for _ in range(N):
        v = Qd @ v
        v = v / np.linalg.norm(v)
        states.append(v)
    return FirstTower(np.column_stack(states), first_tower_energies(graph, h))


def write_spectrum_csv(path, energies, m=None, l=None, n=None) -> None:
    """Spectrum export with columns ``index, energy, m, l, n`` (blank when unknown)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "energy", "m", "l", "n"])
        for k, e in enumerate(energies):
            w.writerow(
                [
                    k,
                    f"{e:.17g}",
                    "" if m is None else f"{m[k]:g}",
                    "" if l is None else f"{l[k]:g}",
                    "" if n is None else int(n[k]),
                ]
            )


def save_vectors(path: str | os.PathLike, vectors: np.ndarray) -> None:
    """Binary eigenvector archive.

    Layout: two little-endian uint64 (rows, cols), then the matrix in
    column-major order as (real, imag) pairs of little-endian float64.
    """
    V = np.asarray(vectors, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", *V.shape))
        fh.write(np.asfortranarray(V).ravel(order="F").astype("<c16").tobytes())


def load_vectors(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != rows * cols:
        raise ValueError("truncated eigenvector archive")
    return data.reshape((rows, cols), order="F").astype(np.complex128)
