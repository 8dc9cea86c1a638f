"""Candidate edge graph C, its triangles and the compatibility graph on them.

Two vertices of H are joined in C when their degrees are ε-similar and their
neighbourhoods overlap in roughly half the larger degree.  Triangles of C are
linked when the six H-edges between them look like K3 × K2.  All threshold
tests are evaluated on integers after clearing the denominator of ε.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded
from .graph import Graph, as_fraction, intersection_size
from .oracles import confusable

Triangle = tuple[int, int, int]
DEFAULT_TRIANGLE_CAP = 2_000_000


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def labels(self) -> list[int]:
        """Component ids numbered 0.. in order of each component's smallest member."""
        ids: dict[int, int] = {}
        out = []
        for x in range(len(self.parent)):
            r = self.find(x)
            if r not in ids:
                ids[r] = len(ids)
            out.append(ids[r])
        return out


def epsilon_similar_degree(H: Graph, u: int, v: int, epsilon) -> bool:
    eps = as_fraction(epsilon)
    hi, lo = max(H.degree(u), H.degree(v)), min(H.degree(u), H.degree(v))
    return eps.denominator * (hi - lo) <= 2 * eps.numerator * hi


def is_candidate_edge(H: Graph, u: int, v: int, epsilon) -> bool:
    """(1-6ε)·d/2 ≤ |I_H(u,v)| ≤ d/(2(1-ε)) with d the larger degree, plus similar degrees."""
    eps = as_fraction(epsilon)
    if not epsilon_similar_degree(H, u, v, eps):
        return False
    d = max(H.degree(u), H.degree(v))
    if d == 0:
        return False  # isolated vertices satisfy the bounds vacuously
    inter = intersection_size(H, u, v)
    return (1 - 6 * eps) * d / 2 <= inter and inter * 2 * (1 - eps) <= d


def candidate_matrix(H: Graph, epsilon) -> np.ndarray:
    """Boolean matrix of all candidate pairs, same inequalities as ``is_candidate_edge``."""
    eps = as_fraction(epsilon)
    p, q = eps.numerator, eps.denominator
    deg = np.array(H.degrees(), dtype=np.int64)
    hi = np.maximum(deg[:, None], deg[None, :])
    lo = np.minimum(deg[:, None], deg[None, :])
    inter = H.common_neighbor_counts()
    ok = (hi > 0) & (q * (hi - lo) <= 2 * p * hi)
    ok &= (q - 6 * p) * hi <= 2 * q * inter
    ok &= 2 * (q - p) * inter <= q * hi
    np.fill_diagonal(ok, False)
    return ok


@dataclass(frozen=True)
class CandidateGraph:
    base: Graph
    epsilon: Fraction
    edges: Graph
    components: tuple[int, ...]  # component id per vertex

    def component_members(self) -> list[tuple[int, ...]]:
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(self.components):
            groups.setdefault(c, []).append(v)
        return [tuple(groups[c]) for c in sorted(groups)]


def build_candidate_graph(H: Graph, epsilon) -> CandidateGraph:
    eps = as_fraction(epsilon)
    mask = candidate_matrix(H, eps)
    us, vs = np.nonzero(np.triu(mask, 1))
    C = Graph(H.n, zip(us.tolist(), vs.tolist()))
    uf = UnionFind(H.n)
    for u, v in C.edges():
        uf.union(u, v)
    return CandidateGraph(H, eps, C, tuple(uf.labels()))


def enumerate_triangles(C: CandidateGraph | Graph, cap: int = DEFAULT_TRIANGLE_CAP) -> list[Triangle]:
    X = C.edges if isinstance(C, CandidateGraph) else C
    out: list[Triangle] = []
    for u in range(X.n):
        nu = X.neighbor_set(u)
        for v in X.adj[u]:
            if v <= u:
                continue
            for w in X.adj[v]:
                if w > v and w in nu:
                    out.append((u, v, w))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} triangles in the candidate graph")
    return out


def compatible(H: Graph, T1: Sequence[int], T2: Sequence[int]):
    """Indexing of T2 against sorted T1 realising the K3 × K2 pattern, or None.

    Returns the lexicographically first ``(v1, v2, v3)`` with
    ``(u_i, v_j) ∈ E(H)  ⟺  i ≠ j`` where ``(u1, u2, u3) = sorted(T1)``.
    """
    us = sorted(T1)
    if set(us) & set(T2):
        return None
    for vs in permutations(sorted(T2)):
        if all(H.has_edge(us[i], vs[j]) == (i != j) for i in range(3) for j in range(3)):
            return vs
    return None


@dataclass
class TriangleComponents:
    triangles: list[Triangle]
    adjacency: "CSRAdjacency"  # compatibility neighbours, ascending triangle index
    component_of: list[int]
    components: list[list[int]]  # triangle indices per component, ascending
    covered: list[tuple[int, ...]]  # U_j per component

    def has_overlap(self, j: int) -> bool:
        seen: set[int] = set()
        for t in self.components[j]:
            for x in self.triangles[t]:
                if x in seen:
                    return True
                seen.add(x)
        return False

    def ordered(self) -> list[int]:
        """Component indices by descending |U_j|, ties by smallest triangle."""
        return sorted(
            range(len(self.components)),
            key=lambda j: (-len(self.covered[j]), self.triangles[self.components[j][0]]),
        )


class CSRAdjacency:
    """Read-only neighbour lists stored as one sorted CSR index array."""

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = indptr
        self.indices = indices

    @classmethod
    def from_pairs(cls, n: int, rows: np.ndarray, cols: np.ndarray) -> "CSRAdjacency":
        r = np.concatenate([rows, cols])
        c = np.concatenate([cols, rows])
        m = sp.csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices)

    @classmethod
    def from_sets(cls, sets: Sequence[Iterable[int]]) -> "CSRAdjacency":
        rows = [np.full(len(s), i, dtype=np.int64) for i, s in enumerate(sets)]
        cols = [np.fromiter(s, dtype=np.int64, count=len(s)) for s in sets]
        if not sets:
            return cls(np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64))
        return cls.from_pairs(len(sets), np.concatenate(rows), np.concatenate(cols))

    def __len__(self) -> int:
        return len(self.indptr) - 1

    def __getitem__(self, i: int) -> list[int]:
        return self.indices[self.indptr[i]:self.indptr[i + 1]].tolist()

    def num_pairs(self) -> int:
        return len(self.indices) // 2

    def as_scipy(self) -> sp.csr_matrix:
        n = len(self)
        return sp.csr_matrix((np.ones(len(self.indices), dtype=np.int8), self.indices, self.indptr), shape=(n, n))


def _fast_compatibility(H: Graph, C: Graph, triangles: list[Triangle]) -> CSRAdjacency:
    """Compatible partners of each triangle, generated from the K3×K2 pattern directly.

    A partner (v1, v2, v3) of (u1, u2, u3) must have v_j adjacent to exactly the two
    u_i with i != j, so v_j lies in W_j = N(u_i) ∩ N(u_k) minus N(u_j); it must also be
    a triangle of C.  The candidates W_1 × W_2 × W_3 are screened in one boolean
    tensor product per triangle.
    """
    n = H.n
    if not triangles:
        return CSRAdjacency.from_sets([])
    Hm = H.adjacency_matrix() > 0
    Cm = C.adjacency_matrix() > 0
    tri = np.array(triangles, dtype=np.int64)
    keys = (tri[:, 0] * n + tri[:, 1]) * n + tri[:, 2]  # ascending: triangles are sorted
    rows, cols = [], []
    for i, (x, y, z) in enumerate(triangles):
        n0, n1, n2 = Hm[x], Hm[y], Hm[z]
        outside = np.ones(n, dtype=bool)
        outside[[x, y, z]] = False
        i0 = np.flatnonzero(n1 & n2 & ~n0 & outside)
        if not len(i0):
            continue
        i1 = np.flatnonzero(n0 & n2 & ~n1 & outside)
        if not len(i1):
            continue
        i2 = np.flatnonzero(n0 & n1 & ~n2 & outside)
        if not len(i2):
            continue
        c01 = Cm[np.ix_(i0, i1)]
        c02 = Cm[np.ix_(i0, i2)]
        c12 = Cm[np.ix_(i1, i2)]
        a, b, c = np.nonzero(c01[:, :, None] & c02[:, None, :] & c12[None, :, :])
        if not len(a):
            continue
        p, r, t = i0[a], i1[b], i2[c]
        lo = np.minimum(np.minimum(p, r), t)
        hi = np.maximum(np.maximum(p, r), t)
        q = (lo * n + (p + r + t - lo - hi)) * n + hi
        q = q[q > keys[i]]  # the relation is symmetric; record each pair once
        j = np.searchsorted(keys, q)
        assert np.array_equal(keys[j], q), "partner triple is not a triangle of C"
        if len(j):
            rows.append(np.full(len(j), i, dtype=np.int64))
            cols.append(j)
    if not rows:
        return CSRAdjacency.from_pairs(len(triangles), np.zeros(0, np.int64), np.zeros(0, np.int64))
    return CSRAdjacency.from_pairs(len(triangles), np.concatenate(rows), np.concatenate(cols))


def _pairwise_compatibility(H: Graph, triangles: list[Triangle]) -> list[set[int]]:
    """Reference construction: prune by disjointness and ≥6 cross H-edges, then test."""
    adj: list[set[int]] = [set() for _ in triangles]
    for i, t1 in enumerate(triangles):
        s1 = set(t1)
        nbrs = [H.neighbor_set(x) for x in t1]
        for j in range(i + 1, len(triangles)):
            t2 = triangles[j]
            if s1.intersection(t2):
                continue
            if sum(1 for y in t2 for nb in nbrs if y in nb) < 6:
                continue
            if compatible(H, t1, t2) is not None:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def triangle_components(
    H: Graph,
    triangles: list[Triangle],
    C: CandidateGraph | Graph | None = None,
    method: str = "fast",
) -> TriangleComponents:
    """Connected components of the compatibility graph on ``triangles``.

    ``method="fast"`` needs the candidate graph (triangles are looked up in it);
    ``method="pairwise"`` is the quadratic reference.
    """
    triangles = sorted(triangles)
    if method == "fast":
        if C is None:
            raise ValueError("fast compatibility construction needs the candidate graph")
        X = C.edges if isinstance(C, CandidateGraph) else C
        adj = _fast_compatibility(H, X, triangles)
    elif method == "pairwise":
        adj = _pairwise_compatibility(H, triangles)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not isinstance(adj, CSRAdjacency):
        adj = CSRAdjacency.from_sets(adj)
    if triangles:
        _, raw = connected_components(adj.as_scipy(), directed=False)
    else:
        raw = np.zeros(0, dtype=np.int64)
    # renumber components by their smallest triangle index
    ids: dict[int, int] = {}
    comp_of = [ids.setdefault(int(r), len(ids)) for r in raw]
    members: list[list[int]] = [[] for _ in range(len(ids))]
    for i, c in enumerate(comp_of):
        members[c].append(i)
    covered = [tuple(sorted({x for i in m for x in triangles[i]})) for m in members]
    return TriangleComponents(triangles, adj, comp_of, members, covered)


def is_atomic(C: CandidateGraph, S: Iterable[int]) -> bool:
    S = set(S)
    inside: dict[int, bool] = {}
    for v, c in enumerate(C.components):
        flag = v in S
        if inside.setdefault(c, flag) != flag:
            return False
    return True


# ---------------------------------------------------------------- ground truth

class TriangleKind(enum.Enum):
    CORE = "core"
    QUASI_CORE = "quasi-core"
    MONOCHROME = "monochrome"
    OTHER = "other"

    @property
    def is_quasi_core(self) -> bool:
        return self in (TriangleKind.CORE, TriangleKind.QUASI_CORE)


def classify_triangle_ground_truth(inst, T: Sequence[int]) -> TriangleKind:
    """Evaluate the core / quasi-core / monochrome definitions with the hidden labels.

    Equal G-classes count as confusable with each other (a vertex is
    indistinguishable from itself).
    """
    eps = inst.epsilon
    colors = [inst.color(v) for v in T]
    gs = [inst.g_class(v) for v in T]
    G, H = inst.G, inst.H
    if len(set(colors)) == 3:
        if len(set(gs)) == 1:
            return TriangleKind.CORE
        pairs = [(gs[i], gs[j]) for i in range(3) for j in range(i + 1, 3)]
        if all(a == b or confusable(G, a, b, eps) for a, b in pairs):
            return TriangleKind.QUASI_CORE
        return TriangleKind.OTHER
    if len(set(colors)) == 1:
        d = max(H.degree(v) for v in T)
        common = G.common_neighbor_counts()
        for i in range(3):
            for j in range(i + 1, 3):
                inter = int(common[gs[i], gs[j]])
                if not ((1 - 8 * eps) * d / 4 <= inter <= (1 + 9 * eps) * d / 4):
                    return TriangleKind.OTHER
        return TriangleKind.MONOCHROME
    return TriangleKind.OTHER


def diagnostic_dump(tc: TriangleComponents, inst=None) -> str:
    rows = []
    for i, t in enumerate(tc.triangles):
        row = {"triangle": list(t), "component": tc.component_of[i]}
        if inst is not None:
            row["kind"] = classify_triangle_ground_truth(inst, t).value
        rows.append(row)
    return json.dumps({"triangles": rows, "components": len(tc.components)}, indent=1)
