"""Spin-1/2 operators on the computational z basis.

Basis convention: state index ``a`` encodes site ``j`` in bit ``j`` (site 0 is
the least significant bit) and a set bit is spin up, so the magnetization of
basis state ``a`` is ``popcount(a) - N/2``. All operators are returned as
``scipy.sparse.csr_matrix`` with complex entries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cluster import CouplingGraph

RNG_ALGORITHM = "numpy.random.Philox(4x64)"


def popcounts(N: int) -> np.ndarray:
    """Number of up spins for every basis index."""
    idx = np.arange(2**N, dtype=np.int64)
    counts = np.zeros(2**N, dtype=np.int64)
    for j in range(N):
        counts += (idx >> j) & 1
    return counts


def magnetization(N: int) -> np.ndarray:
    return popcounts(N) - N / 2


def _check_site(N, j):
    if not 0 <= j < N:
        raise IndexError(f"site {j} out of range for N={N}")


def spin_operator(N: int, j: int, axis: str) -> sp.csr_matrix:
    """Single-site spin operator ``s_j^axis`` (eigenvalues +-1/2)."""
    _check_site(N, j)
    dim = 2**N
    idx = np.arange(dim, dtype=np.int64)
    up = ((idx >> j) & 1).astype(bool)
    if axis == "z":
        return sp.diags(np.where(up, 0.5, -0.5).astype(complex), format="csr")
    flipped = idx ^ (1 << j)
    if axis == "x":
        vals = np.full(dim, 0.5, dtype=complex)
    elif axis == "y":
        # <up|s^y|down> = -i/2, <down|s^y|up> = +i/2; row is the flipped state
        vals = np.where(up, 0.5j, -0.5j)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return sp.csr_matrix((vals, (flipped, idx)), shape=(dim, dim))


def build_h0(graph: CouplingGraph, h: float) -> sp.csr_matrix:
    """Isotropic Heisenberg exchange on the graph edges plus a uniform z-field.

    ``H0 = sum_edges J s_i.s_j + h sum_j s_j^z``; each bond enters once.
    """
    N = graph.N
    dim = 2**N
    idx = np.arange(dim, dtype=np.int64)
    diag = h * magnetization(N).astype(float)
    rows, cols, vals = [], [], []
    for i, j, J in graph.edges:
        bi = (idx >> i) & 1
        bj = (idx >> j) & 1
        same = bi == bj
        diag = diag + np.where(same, 0.25 * J, -0.25 * J)
        # s_i^+ s_j^- + h.c. flips antiparallel pairs with amplitude J/2
        anti = idx[~same]
        rows.append(anti ^ ((1 << i) | (1 << j)))
        cols.append(anti)
        vals.append(np.full(anti.size, 0.5 * J))
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    H = sp.coo_matrix(
        (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return H.tocsr()


@dataclass(frozen=True)
class FieldRealization:
    """One seeded draw of the random transverse fields plus the uniform field."""

    h: float
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    bounds: tuple[float, float]
    seed: int
    algorithm: str = RNG_ALGORITHM

    @property
    def N(self) -> int:
        return len(self.xs)

    def to_record(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "algorithm": self.algorithm,
                "bounds": list(self.bounds),
                "h": self.h,
                "xs": list(self.xs),
                "ys": list(self.ys),
            }
        )

    @classmethod
    def from_record(cls, text: str) -> "FieldRealization":
        d = json.loads(text)
        return cls(
            h=d["h"],
            xs=tuple(d["xs"]),
            ys=tuple(d["ys"]),
            bounds=tuple(d["bounds"]),
            seed=d["seed"],
            algorithm=d.get("algorithm", RNG_ALGORITHM),
        )


def _open_uniform(rng, half_width, n):
    if half_width == 0:
        return np.zeros(n)
    u = rng.random(n)
    # exclude the -b endpoint so every draw lies in the open interval
    while np.any(u == 0.0):
        zero = u == 0.0
        u[zero] = rng.random(int(zero.sum()))
    return half_width * (2.0 * u - 1.0)


def sample_fields(N: int, x: float, y: float, h: float, seed: int) -> FieldRealization:
    """Draw ``x_j ~ U(-x, x)`` and ``y_j ~ U(-y, y)`` deterministically from ``seed``."""
    if x < 0 or y < 0:
        raise ValueError("field half-widths must be non-negative")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    xs = _open_uniform(rng, x, N)
    ys = _open_uniform(rng, y, N)
    return FieldRealization(
        h=float(h),
        xs=tuple(float(v) for v in xs),
        ys=tuple(float(v) for v in ys),
        bounds=(float(x), float(y)),
        seed=int(seed),
    )


def build_hran(real: FieldRealization, N: int | None = None) -> sp.csr_matrix:
    """Random transverse-field term ``sum_j (x_j s_j^x + y_j s_j^y)``."""
    if len(real.xs) != len(real.ys):
        raise ValueError("x and y field lists differ in length")
    if N is not None and N != len(real.xs):
        raise ValueError(f"realization has {len(real.xs)} sites, expected {N}")
    N = len(real.xs)
    dim = 2**N
    idx = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for j, (xj, yj) in enumerate(zip(real.xs, real.ys)):
        if xj == 0 and yj == 0:
            continue
        up = ((idx >> j) & 1).astype(bool)
        rows.append(idx ^ (1 << j))
        cols.append(idx)
        # up -> down: (x + i y)/2, down -> up: (x - i y)/2
        vals.append(np.where(up, 0.5 * (xj + 1j * yj), 0.5 * (xj - 1j * yj)))
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    H = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return H.tocsr()


def build_hamiltonian(graph: CouplingGraph, real: FieldRealization) -> sp.csr_matrix:
    return (build_h0(graph, real.h) + build_hran(real, graph.N)).tocsr()


def total_spin_ops(N: int) -> dict[str, sp.csr_matrix]:
    """Total spin components ``s^x, s^y, s^z`` and ``s^2``."""
    ops = {}
    for axis in "xyz":
        total = spin_operator(N, 0, axis)
        for j in range(1, N):
            total = total + spin_operator(N, j, axis)
        ops[axis] = total.tocsr()
    ops["s2"] = (ops["x"] @ ops["x"] + ops["y"] @ ops["y"] + ops["z"] @ ops["z"]).tocsr()
    ops["s2"].eliminate_zeros()
    return ops


def tower_op(N: int) -> sp.csr_matrix:
    """Raising operator ``Q^dag = sum_i (s_i^x + i s_i^y)``; its adjoint lowers."""
    dim = 2**N
    idx = np.arange(dim, dtype=np.int64)
    rows, cols = [], []
    for j in range(N):
        down = idx[((idx >> j) & 1) == 0]
        rows.append(down | (1 << j))
        cols.append(down)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    return sp.csr_matrix((np.ones(r.size, dtype=complex), (r, c)), shape=(dim, dim))


def basis_state(N: int, bits: int) -> np.ndarray:
    v = np.zeros(2**N, dtype=complex)
    v[bits] = 1.0
    return v


def is_hermitian(op, atol: float = 1e-12) -> bool:
    diff = op - op.conj().T
    if sp.issparse(diff):
        return diff.nnz == 0 or float(abs(diff).max()) <= atol
    return float(np.max(np.abs(diff), initial=0.0)) <= atol


def max_abs(op) -> float:
    """Largest absolute entry of a sparse or dense operator."""
    if sp.issparse(op):
        return float(abs(op).max()) if op.nnz else 0.0
    return float(np.max(np.abs(op), initial=0.0))


def commutator(a, b):
    return a @ b - b @ a
