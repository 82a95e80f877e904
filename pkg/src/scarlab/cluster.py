"""Cluster geometries as weighted coupling graphs.

Presets cover the chain, two-leg ladder, square and triangular clusters.
Anything else can be given as an explicit edge list, either in code or via
the plain-text cluster file format::

    # comment
    N 4
    0 1 1.0
    1 2 0.5
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

KINDS = ("chain", "ladder", "square", "triangular", "custom")
BOUNDARIES = ("open", "periodic")


class ClusterError(ValueError):
    """Raised for inconsistent cluster definitions."""


@dataclass(frozen=True)
class ClusterSpec:
    kind: str
    N: int
    boundary: str = "periodic"
    dimensions: Optional[tuple[int, int]] = None
    custom_edges: Optional[Sequence[tuple[int, int, float]]] = None
    J: float = 1.0


@dataclass(frozen=True)
class CouplingGraph:
    """Site count plus canonical edge list ``(i, j, J)`` with ``i < j``."""

    N: int
    edges: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for i, j, _ in self.edges:
            if i == j:
                raise ClusterError(f"self-loop on site {i}")
            if not (0 <= i < self.N and 0 <= j < self.N):
                raise ClusterError(f"edge ({i}, {j}) out of range for N={self.N}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ClusterError(f"duplicate edge {key}")
            seen.add(key)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.N
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        adj: dict[int, list[int]] = {k: [] for k in range(self.N)}
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.N


def _canonical(N: int, edges: Iterable[tuple[int, int, float]], dedupe: bool) -> CouplingGraph:
    out: dict[tuple[int, int], float] = {}
    for i, j, J in edges:
        i, j = int(i), int(j)
        if i == j:
            raise ClusterError(f"self-loop on site {i}")
        if not (0 <= i < N and 0 <= j < N):
            raise ClusterError(f"edge ({i}, {j}) out of range for N={N}")
        key = (min(i, j), max(i, j))
        if key in out:
            if dedupe:
                continue
            raise ClusterError(f"duplicate edge {key}")
        out[key] = float(J)
    return CouplingGraph(N, tuple((i, j, J) for (i, j), J in sorted(out.items())))


def _grid_edges(rows, cols, periodic_rows, periodic_cols, diagonal=False):
    def site(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols or (periodic_cols and cols > 1):
                edges.append((site(r, c), site(r, (c + 1) % cols)))
            if r + 1 < rows or (periodic_rows and rows > 1):
                edges.append((site(r, c), site((r + 1) % rows, c)))
            if diagonal:
                inside = (r + 1 < rows or periodic_rows) and (c + 1 < cols or periodic_cols)
                if inside:
                    edges.append((site(r, c), site((r + 1) % rows, (c + 1) % cols)))
    return edges


def build_cluster(spec: ClusterSpec) -> CouplingGraph:
    """Build the canonical coupling graph for a cluster specification.

    Presets use a uniform coupling ``spec.J``. Periodic wraps on a length-2
    direction would repeat an existing bond; such repeats are merged.
    """
    if spec.kind not in KINDS:
        raise ClusterError(f"unknown cluster kind {spec.kind!r}")
    if spec.boundary not in BOUNDARIES:
        raise ClusterError(f"unknown boundary {spec.boundary!r}")
    N = int(spec.N)
    if N < 2:
        raise ClusterError("a cluster needs at least two sites")
    periodic = spec.boundary == "periodic"

    if spec.kind == "custom":
        if spec.custom_edges is None:
            raise ClusterError("custom cluster requires custom_edges")
        return _canonical(N, spec.custom_edges, dedupe=False)

    if spec.kind == "chain":
        pairs = [(k, k + 1) for k in range(N - 1)]
        if periodic and N > 2:
            pairs.append((N - 1, 0))
    else:
        dims = spec.dimensions
        if dims is None and spec.kind == "ladder":
            if N % 2:
                raise ClusterError("ladder needs an even number of sites")
            dims = (2, N // 2)
        if dims is None:
            raise ClusterError(f"{spec.kind} cluster requires dimensions")
        rows, cols = int(dims[0]), int(dims[1])
        if rows * cols != N:
            raise ClusterError(f"dimensions {rows}x{cols} inconsistent with N={N}")
        if spec.kind == "ladder":
            if rows != 2:
                raise ClusterError("ladder dimensions must be 2xL")
            # legs run along columns; rungs never wrap
            pairs = _grid_edges(rows, cols, False, periodic)
        else:
            pairs = _grid_edges(rows, cols, periodic, periodic, diagonal=spec.kind == "triangular")
    return _canonical(N, ((i, j, spec.J) for i, j in pairs), dedupe=True)


def coupling_sum(graph: CouplingGraph) -> float:
    """Sum of ``J_ij`` over ordered pairs ``i != j``, i.e. twice the edge sum."""
    return 2.0 * sum(J for _, _, J in graph.edges)


def parse_preset(text: str) -> ClusterSpec:
    """Parse ``kind:size:boundary`` strings such as ``ladder:2x6:periodic``."""
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ClusterError(f"bad cluster preset {text!r}")
    kind, size = parts[0], parts[1]
    boundary = parts[2] if len(parts) == 3 else "periodic"
    if "x" in size:
        try:
            rows, cols = (int(v) for v in size.split("x"))
        except ValueError as exc:
            raise ClusterError(f"bad dimensions {size!r}") from exc
        return ClusterSpec(kind, rows * cols, boundary, (rows, cols))
    try:
        N = int(size)
    except ValueError as exc:
        raise ClusterError(f"bad site count {size!r}") from exc
    return ClusterSpec(kind, N, boundary)


def read_cluster_file(path: str | os.PathLike) -> CouplingGraph:
    N = None
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if N is None:
                if len(tok) != 2 or tok[0] != "N":
                    raise ClusterError(f"{path}:{lineno}: expected 'N <count>'")
                N = int(tok[1])
                continue
            if len(tok) != 3:
                raise ClusterError(f"{path}:{lineno}: expected '<i> <j> <J>'")
            edges.append((int(tok[0]), int(tok[1]), float(tok[2])))
    if N is None:
        raise ClusterError(f"{path}: missing 'N <count>' line")
    return build_cluster(ClusterSpec("custom", N, custom_edges=edges))


def write_cluster_file(graph: CouplingGraph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"N {graph.N}\n")
        for i, j, J in graph.edges:
            fh.write(f"{i} {j} {J!r}\n")


def load_cluster(source: str | ClusterSpec | CouplingGraph) -> CouplingGraph:
    """Resolve a preset string, cluster file path, spec or graph to a graph."""
    if isinstance(source, CouplingGraph):
        return source
    if isinstance(source, ClusterSpec):
        return build_cluster(source)
    if os.path.exists(source):
        return read_cluster_file(source)
    return build_cluster(parse_preset(source))


PRESETS = {
    "chain": "chain:12:periodic",
    "ladder": "ladder:2x6:periodic",
    "square": "square:3x4:periodic",
    "triangular": "triangular:3x4:periodic",
}
