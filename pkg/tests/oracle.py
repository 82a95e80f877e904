"""Straightforward dense reference implementation used as an independent oracle.

Everything here is built from Kronecker products of 2x2 matrices and plain
loops; nothing is imported from the package.
"""

from math import comb

import numpy as np
import scipy.linalg as la

# single-site basis ordered (down, up) so that bit value 1 means up
SX = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
SY = 0.5 * np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = 0.5 * np.array([[-1, 0], [0, 1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def site_op(N, j, op):
    # np.kron puts its first factor on the most significant bit; site 0 is the least
    mats = [I2] * N
    mats[N - 1 - j] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def heisenberg(N, edges, h):
    H = np.zeros((2**N, 2**N), dtype=complex)
    for i, j, J in edges:
        for op in (SX, SY, SZ):
            H += J * site_op(N, i, op) @ site_op(N, j, op)
    for j in range(N):
        H += h * site_op(N, j, SZ)
    return H


def fields(N, xs, ys):
    H = np.zeros((2**N, 2**N), dtype=complex)
    for j in range(N):
        H += xs[j] * site_op(N, j, SX) + ys[j] * site_op(N, j, SY)
    return H


def total(N, op):
    return sum(site_op(N, j, op) for j in range(N))


def labels(N, edges, h):
    """Sorted (E, l, m) for every eigenstate from a generic joint diagonalization."""
    H0 = heisenberg(N, edges, h)
    Sz = total(N, SZ)
    S2 = total(N, SX) @ total(N, SX) + total(N, SY) @ total(N, SY) + Sz @ Sz
    mix = H0 + np.sqrt(2) * 1e-3 * S2 + np.sqrt(3) * 1e-4 * Sz
    _, V = la.eigh(mix)
    out = []
    for k in range(V.shape[1]):
        v = V[:, k]
        E = np.real(v.conj() @ H0 @ v)
        s2 = np.real(v.conj() @ S2 @ v)
        m = np.real(v.conj() @ Sz @ v)
        l = 0.5 * (np.sqrt(1 + 4 * s2) - 1)
        out.append((E, round(2 * l) / 2, round(2 * m) / 2))
    return sorted(out)


def gap_ratio_mean(levels, cut=1e-10):
    E = sorted(levels)
    rs = []
    for k in range(1, len(E) - 1):
        a, b = E[k] - E[k - 1], E[k + 1] - E[k]
        if a < cut or b < cut:
            continue
        rs.append(min(a, b) / max(a, b))
    return sum(rs) / len(rs)


def dicke(N, p):
    """Normalized symmetric state with p up spins."""
    v = np.zeros(2**N, dtype=complex)
    for a in range(2**N):
        if bin(a).count("1") == p:
            v[a] = 1.0
    return v / np.sqrt(comb(N, p))


def f_profile(H, tower, grid, delta):
    E, V = la.eigh(H)
    f = []
    for e in grid:
        acc = 0.0
        for k in range(E.size):
            if e - delta / 2 <= E[k] < e + delta / 2:
                acc += sum(abs(np.vdot(V[:, k], t)) ** 2 for t in tower)
        f.append(acc)
    return np.array(f)


def fidelity(H, psi, times):
    return np.array([abs(np.vdot(psi, la.expm(-1j * H * t) @ psi)) ** 2 for t in times])
