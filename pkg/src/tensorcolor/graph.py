"""Simple undirected graphs, tensor products and the counting queries used everywhere.

Vertices are the integers ``0..n-1``.  Adjacency is kept as sorted tuples so that
neighbourhood intersections are linear merges; a dense 0/1 matrix and the matrix of
all pairwise common-neighbour counts are built lazily for the bulk passes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import InvalidParams, SizeCap

Edge = tuple[int, int]
EXPANDER_CAP = 22


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through ``str`` so ``0.01`` becomes ``1/100`` rather than its
    binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def edge_set(pairs: Iterable[Sequence[int]]) -> frozenset[Edge]:
    out = set()
    for u, v in pairs:
        if u == v:
            raise InvalidParams(f"self-pair ({u}, {v}) in edge set")
        out.add(norm_edge(int(u), int(v)))
    return frozenset(out)


def vertex_set(vertices: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(vertices)))


class Graph:
    """Immutable simple loopless graph."""

    __slots__ = ("n", "adj", "_nbr_sets", "_matrix", "_common", "_edges")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise InvalidParams("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidParams(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidParams(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        self._nbr_sets = tuple(frozenset(s) for s in nbrs)
        self._matrix = None
        self._common = None
        self._edges = None

    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Iterable[int]]) -> "Graph":
        edges = [(u, v) for u, row in enumerate(adjacency) for v in row if u < v]
        g = cls(len(adjacency), edges)
        for u, row in enumerate(adjacency):
            if set(row) != g._nbr_sets[u]:
                raise InvalidParams("adjacency is not symmetric")
        return g

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._nbr_sets[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr_sets[u]

    def edges(self) -> list[Edge]:
        if self._edges is None:
            self._edges = [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]
        return self._edges

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def adjacency_matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = np.zeros((self.n, self.n), dtype=np.float64)
            for u, row in enumerate(self.adj):
                if row:
                    m[u, list(row)] = 1.0
            self._matrix = m
        return self._matrix

    def common_neighbor_counts(self) -> np.ndarray:
        """``C[u, v] = |Γ(u) ∩ Γ(v)|`` for all pairs (diagonal holds degrees)."""
        if self._common is None:
            a = self.adjacency_matrix()
            # float64 matmul is exact for counts far below 2**53
            self._common = np.rint(a @ a).astype(np.int64)
        return self._common

    def induced_edges(self, vertices: Iterable[int]) -> frozenset[Edge]:
        vs = set(vertices)
        return frozenset((u, v) for u in vs for v in self.adj[u] if u < v and v in vs)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def is_bipartite(self) -> bool:
        side = [-1] * self.n
        for s in range(self.n):
            if side[s] != -1:
                continue
            side[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for v in self.adj[u]:
                    if side[v] == -1:
                        side[v] = 1 - side[u]
                        stack.append(v)
                    elif side[v] == side[u]:
                        return False
        return True


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def tensor_product(F: Graph, G: Graph) -> Graph:
    """F × G with vertex (f, g) encoded as ``f * G.n + g``."""
    ng = G.n
    edges = []
    for f1, f2 in F.edges():
        for g1, g2 in G.edges():
            edges.append((f1 * ng + g1, f2 * ng + g2))
            edges.append((f1 * ng + g2, f2 * ng + g1))
    return Graph(F.n * ng, edges)


def intersection_size(X: Graph, u: int, v: int) -> int:
    a, b = X.adj[u], X.adj[v]
    i = j = count = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            count += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return count


def triple_intersection_size(X: Graph, u: int, v: int, w: int) -> int:
    small = min((X.adj[u], X.adj[v], X.adj[w]), key=len)
    sv, sw, su = X.neighbor_set(v), X.neighbor_set(w), X.neighbor_set(u)
    return sum(1 for x in small if x in su and x in sv and x in sw)


def volume(X: Graph, S: Iterable[int]) -> int:
    return sum(len(X.adj[v]) for v in S)


def edges_between(X: Graph, S: Iterable[int], T: Iterable[int]) -> int:
    """Number of edges with one endpoint in S and the other in T (S, T disjoint)."""
    S = set(S)
    T = set(T)
    if len(S) > len(T):
        S, T = T, S
    return sum(1 for u in S for v in X.adj[u] if v in T)


def cut_size(X: Graph, S: Iterable[int]) -> int:
    S = set(S)
    return sum(1 for u in S for v in X.adj[u] if v not in S)


def symmetric_difference(E1: Iterable[Edge], E2: Iterable[Edge]) -> int:
    return len(set(E1) ^ set(E2))


def _subset_chunks(n: int, lo: int, hi: int, chunk: int = 1 << 20):
    for start in range(lo, hi, chunk):
        yield np.arange(start, min(hi, start + chunk), dtype=np.int64)


def _exact(p: int, q: int, total: int, cut: np.ndarray, vol: np.ndarray):
    """Cast to Python ints when p·vol or q·cut could overflow int64."""
    if max(p, q) * max(total, 1) >= 1 << 62:
        return cut.astype(object), vol.astype(object)
    return cut, vol


def _cut_and_volume(G: Graph, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vol = np.zeros(masks.shape, dtype=np.int64)
    for v, d in enumerate(G.degrees()):
        if d:
            vol += ((masks >> v) & 1) * d
    cut = np.zeros(masks.shape, dtype=np.int64)
    for u, v in G.edges():
        cut += ((masks >> u) ^ (masks >> v)) & 1
    return cut, vol


def is_alpha_edge_expander(G: Graph, alpha, cap: int = EXPANDER_CAP) -> bool:
    """Exhaustive check that cut(S) ≥ α·min(vol S, vol S̄) for every nonempty proper S."""
    alpha = as_fraction(alpha)
    if G.n > cap:
        raise SizeCap(f"exhaustive expansion check capped at {cap} vertices (got {G.n})")
    if G.n <= 1:
        return True
    p, q = alpha.numerator, alpha.denominator
    total = 2 * G.num_edges
    # S and its complement give the same inequality: keep masks without the top vertex
    for masks in _subset_chunks(G.n, 1, 1 << (G.n - 1)):
        cut, vol = _exact(p, q, total, *_cut_and_volume(G, masks))
        if np.any(q * cut < p * np.minimum(vol, total - vol)):
            return False
    return True


def is_small_set_expander(G: Graph, delta, alpha, cap: int = EXPANDER_CAP) -> bool:
    """Exhaustive check that cut(S) ≥ α·vol(S) for every nonempty proper S with |S| ≤ δn."""
    delta, alpha = as_fraction(delta), as_fraction(alpha)
    if G.n > cap:
        raise SizeCap(f"exhaustive expansion check capped at {cap} vertices (got {G.n})")
    max_size = min(G.n - 1, (delta.numerator * G.n) // delta.denominator)
    if max_size < 1:
        return True
    p, q = alpha.numerator, alpha.denominator
    for masks in _subset_chunks(G.n, 1, (1 << G.n) - 1):
        small = np.bitwise_count(masks.astype(np.uint64)) <= max_size
        if not small.any():
            continue
        masks = masks[small]
        cut, vol = _exact(p, q, 2 * G.num_edges, *_cut_and_volume(G, masks))
        if np.any(q * cut < p * vol):
            return False
    return True


def second_eigenvalue(G: Graph, tol: float = 1e-9, max_iter: int = 100_000, seed: int = 0) -> float:
    """Second largest eigenvalue of D^-1/2 A D^-1/2 by deflated power iteration.

    Advisory only: by Cheeger, the graph's conductance is at least ``(1 - λ2) / 2``.
    Requires a graph without isolated vertices.
    """
    deg = np.array(G.degrees(), dtype=np.float64)
    if G.n < 2 or np.any(deg == 0):
        raise InvalidParams("spectral diagnostic needs ≥2 vertices and no isolated vertex")
    inv_sqrt = 1.0 / np.sqrt(deg)
    N = inv_sqrt[:, None] * G.adjacency_matrix() * inv_sqrt[None, :]
    lazy = 0.5 * (np.eye(G.n) + N)
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)
    x = np.random.default_rng(seed).standard_normal(G.n)
    x -= top * (top @ x)
    x /= np.linalg.norm(x)
    value = 0.0
    for _ in range(max_iter):
        y = lazy @ x
        y -= top * (top @ y)
        new_value = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return -1.0
        x = y / norm
        if abs(new_value - value) < tol:
            value = new_value
            break
        value = new_value
    return 2.0 * value - 1.0


def cheeger_lower_bound(G: Graph, **kwargs) -> float:
    return (1.0 - second_eigenvalue(G, **kwargs)) / 2.0


# ---------------------------------------------------------------- DIMACS text

def write_dimacs(G: Graph, fh: TextIO, comment: str | None = None) -> None:
    if comment:
        for line in comment.splitlines():
            fh.write(f"c {line}\n")
    fh.write(f"p edge {G.n} {G.num_edges}\n")
    for u, v in sorted(G.edges()):
        fh.write(f"e {u + 1} {v + 1}\n")


def read_dimacs(fh: TextIO) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(fh, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "edge":
                raise InvalidParams(f"line {lineno}: bad problem line {line!r}")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None:
                raise InvalidParams(f"line {lineno}: edge before problem line")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise InvalidParams(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise InvalidParams("missing 'p edge' line")
    return Graph(n, edges)


def dumps_dimacs(G: Graph) -> str:
    import io

    buf = io.StringIO()
    write_dimacs(G, buf)
    return buf.getvalue()
