"""Propagation coloring of a triangle component and the core factoring step."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .candidate import TriangleComponents
from .errors import Fail
from .graph import Graph, as_fraction, norm_edge, symmetric_difference, volume
from .matching import MatchResult, bottleneck_matching, tripartite_weights

CLASS_NAMES = "abc"


@dataclass(frozen=True)
class Partition3:
    """Class (0, 1, 2) per assigned vertex; unassigned vertices are absent."""

    assignment: dict

    def cls(self, v: int):
        return self.assignment.get(v)

    def classes(self, within: Iterable[int] | None = None) -> tuple[list[int], list[int], list[int]]:
        verts = self.assignment if within is None else within
        out: tuple[list[int], list[int], list[int]] = ([], [], [])
        for v in sorted(verts):
            c = self.assignment.get(v)
            if c is not None:
                out[c].append(v)
        return out

    def is_coloring_of(self, H: Graph, U: Iterable[int] | None = None) -> bool:
        U = set(self.assignment) if U is None else set(U)
        if any(v not in self.assignment for v in U):
            return False
        return all(self.assignment[x] != self.assignment[y] for x, y in H.induced_edges(U))


def color_component(H: Graph, tc: TriangleComponents, j: int, allow_overlap: bool = False) -> Partition3:
    """Propagate a 3-partition from the smallest triangle of component ``j``.

    A newly reached triangle takes, vertex by vertex, the class of the unique
    H-non-neighbour inside the already colored triangle it was reached from.
    Raises ``Fail`` on a conflict, a non-unique non-neighbour, or (unless
    ``allow_overlap``) triangles of the component sharing a vertex.
    """
    members = tc.components[j]
    if not members:
        raise ValueError("empty component")
    if not allow_overlap and tc.has_overlap(j):
        raise Fail("coloring", "triangles of the component share a vertex")
    tris = tc.triangles
    seed = members[0]
    assignment = {v: c for c, v in enumerate(tris[seed])}
    seen = {seed}
    queue = deque([seed])
    while queue:
        t = queue.popleft()
        src = tris[t]
        for s in tc.adjacency[t]:
            if s in seen:
                continue
            seen.add(s)
            for v in tris[s]:
                far = [x for x in src if not H.has_edge(v, x)]
                if len(far) != 1:
                    raise Fail("coloring", f"vertex {v} has {len(far)} non-neighbours in triangle {src}")
                c = assignment[far[0]]
                if assignment.setdefault(v, c) != c:
                    raise Fail("coloring", f"vertex {v} receives two different classes")
            queue.append(s)
    return Partition3(assignment)


@dataclass
class ComponentFactorization:
    U: tuple[int, ...]
    color_map: dict  # vertex -> 0/1/2
    g_map: dict  # vertex -> local G~ id
    g_tilde: Graph
    h_tilde: frozenset
    matchings: tuple[MatchResult, MatchResult] | None = None
    error: int = 0  # |E(H[U]) Δ h_tilde|
    meta: dict = field(default_factory=dict)

    def triples(self) -> list[tuple[int, int, int]]:
        out = [[None, None, None] for _ in range(self.g_tilde.n)]
        for v, g in self.g_map.items():
            out[g][self.color_map[v]] = v
        return [tuple(t) for t in out]

    def implied_edges(self) -> frozenset:
        """Edges of K3 × g_tilde pulled back through (color_map, g_map)."""
        tr = self.triples()
        edges = set()
        for g, h in self.g_tilde.edges():
            for i in range(3):
                for k in range(3):
                    if i != k:
                        edges.add(norm_edge(tr[g][i], tr[h][k]))
        return frozenset(edges)


def core_factor(
    H: Graph,
    tc: TriangleComponents,
    j: int,
    U: Iterable[int],
    epsilon,
    strict: bool = False,
    allow_overlap: bool = False,
    partition: Partition3 | None = None,
) -> ComponentFactorization:
    """Factor H[U] as K3 × G~ using the coloring of component ``j``.

    ``strict`` switches the final test to the edge-count form
    260ε|E(H[U])| + |U| instead of the volume form. Raises ``Fail`` with the
    failing stage in ``.stage``.
    """
    eps = as_fraction(epsilon)
    U = tuple(sorted(set(U)))
    if not U:
        raise ValueError("U must be nonempty")
    part = partition if partition is not None else color_component(H, tc, j, allow_overlap)
    if any(part.cls(v) is None for v in U):
        raise Fail("class-sizes", "U is not covered by the component")
    A, B, C = part.classes(U)
    if not len(A) == len(B) == len(C):
        raise Fail("class-sizes", f"class sizes {len(A)}, {len(B)}, {len(C)} differ")
    if not part.is_coloring_of(H, U):
        raise Fail("proper-coloring", "partition is not a 3-coloring of H[U]")

    wab, wbc = tripartite_weights(H, A, B, C)
    m1, m2 = bottleneck_matching(wab), bottleneck_matching(wbc)
    floor = 1 - 6 * eps
    if m1.objective < floor or m2.objective < floor:
        raise Fail("matching", f"matching quality {min(m1.objective, m2.objective)} below {floor}")

    inv1 = {m1.pairing[i]: i for i in range(len(A))}
    triples = [(A[inv1[b]], B[b], C[m2.pairing[b]]) for b in range(len(B))]
    color_map, g_map = {}, {}
    for g, t in enumerate(triples):
        for c, v in enumerate(t):
            color_map[v] = c
            g_map[v] = g
    g_edges, h_edges = [], set()
    for g in range(len(triples)):
        for h in range(g + 1, len(triples)):
            cross = [(x, y) for i, x in enumerate(triples[g]) for k, y in enumerate(triples[h]) if i != k]
            if any(H.has_edge(x, y) for x, y in cross):
                g_edges.append((g, h))
                h_edges.update(norm_edge(x, y) for x, y in cross)
    h_tilde = frozenset(h_edges)
    error = symmetric_difference(H.induced_edges(U), h_tilde)
    base = len(H.induced_edges(U)) if strict else volume(H, U)
    bound = 260 * eps * base + len(U)
    if error > bound:
        raise Fail("error-check", f"|E(H[U]) Δ H~| = {error} exceeds {bound}")
    return ComponentFactorization(
        U, color_map, g_map, Graph(len(triples), g_edges), h_tilde, (m1, m2), error,
        {"bound": bound},
    )
