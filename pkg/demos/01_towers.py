"""
Towers of eigenstates in a uniform field
========================================

With only a uniform z-field the Heisenberg cluster keeps its SU(2) symmetry
up to a Zeeman shift, so every eigenstate belongs to a tower
|n, l, m> whose members differ by one unit of magnetization and are spaced
by exactly h in energy. This script labels the full spectrum of an eight-site
ring and checks the tower bookkeeping.
"""

from math import comb

import numpy as np

from scarlab import diagonalize_h0, first_tower, label_towers, load_cluster, total_spin_ops
from scarlab.spin import build_h0, commutator, max_abs, tower_op

N, h = 8, 0.5
graph = load_cluster(f"chain:{N}:periodic")

# The raising operator Q^dag = sum_j s_j^+ shifts energies by exactly h.
H0 = build_h0(graph, h)
Qd = tower_op(N)
print(f"max |[H0, Q^dag] - h Q^dag| = {max_abs(commutator(H0, Qd) - h * Qd):.1e}")

# Solve sector by sector and thread the eigenstates into towers.
spec, m = diagonalize_h0(graph, h)
table = label_towers(spec, total_spin_ops(N)["s2"], h)

print("\n  l   towers   C(N,k) - C(N,k-1)")
for l, count in sorted(table.multiplicities().items(), reverse=True):
    k = int(N / 2 - l)
    print(f"{l:4.0f} {count:8d} {comb(N, k) - (comb(N, k - 1) if k else 0):12d}")

# Each tower is an equally spaced ladder.
spacings = np.concatenate([np.diff(table.energies[table.tower(n)]) for n in np.unique(table.n)])
print(f"\nlargest deviation of a rung spacing from h: {np.max(np.abs(spacings - h)):.1e}")

# The maximal-spin tower is known in closed form: raise the all-down state.
ft = first_tower(graph, h)
print("first-tower energies:", np.round(ft.energies, 12))
