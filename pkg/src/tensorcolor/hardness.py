"""Reductions from 3-coloring to near-tensor 3-coloring, with self-checks.

3-coloring → ε-loose 3-coloring with equality (clouds of equality-linked
copies) → graph on V × [3]^3.  Points of [3]^L are tuples over {0,1,2},
encoded base 3 with the first coordinate most significant.  Assignments of
the equality instance take values in {1, 2, 3}: they name a coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Mapping, Sequence

from .errors import Inconsistent, InvalidParams, NotAProperColoring, UnsatisfiedAssignment
from .graph import Edge, Graph, as_fraction, complete_graph, tensor_product

C_LOOSE = Fraction(1, 4)
CUBE = list(product(range(3), repeat=3))
SQUARE = list(product(range(3), repeat=2))


def code(x: Sequence[int]) -> int:
    out = 0
    for c in x:
        out = 3 * out + c
    return out


def decode(k: int, L: int) -> tuple[int, ...]:
    digits = []
    for _ in range(L):
        k, r = divmod(k, 3)
        digits.append(r)
    return tuple(reversed(digits))


def same_rule(x, y) -> bool:
    """Intra-cloud and equality edges: every coordinate differs."""
    return all(a != b for a, b in zip(x, y))


def cross_rule(x, y) -> bool:
    """Coloring-constraint edges: x_i != y_j whenever i != j."""
    return all(x[i] != y[j] for i in range(len(x)) for j in range(len(y)) if i != j)


SAME_PAIRS = [(code(x), code(y)) for x in CUBE for y in CUBE if same_rule(x, y)]
CROSS_PAIRS = [(code(x), code(y)) for x in CUBE for y in CUBE if cross_rule(x, y)]


@dataclass(frozen=True)
class EqualityInstance:
    n: int
    e_neq: frozenset
    e_eq: frozenset
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.e_neq & self.e_eq:
            raise InvalidParams("a pair cannot carry both constraint kinds")
        for u, v in self.e_neq | self.e_eq:
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidParams(f"bad constraint {(u, v)}")

    def counts(self, v: int) -> tuple[int, int]:
        """(equality constraints, coloring constraints) at v."""
        a = sum(1 for e in self.e_eq if v in e)
        b = sum(1 for e in self.e_neq if v in e)
        return a, b

    def looseness(self) -> list[Fraction]:
        a = [0] * self.n
        b = [0] * self.n
        for u, v in self.e_eq:
            a[u] += 1
            a[v] += 1
        for u, v in self.e_neq:
            b[u] += 1
            b[v] += 1
        return [Fraction(b[v], a[v] + b[v]) if a[v] + b[v] else Fraction(0) for v in range(self.n)]

    def is_loose(self, epsilon) -> bool:
        eps = as_fraction(epsilon)
        return all(f <= eps for f in self.looseness())

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        return (all(assignment[u] != assignment[v] for u, v in self.e_neq)
                and all(assignment[u] == assignment[v] for u, v in self.e_eq))

    def to_dict(self) -> dict:
        return {"n": self.n, "e_neq": sorted(map(list, self.e_neq)),
                "e_eq": sorted(map(list, self.e_eq)), "meta": self.meta}


def plain_instance(G3: Graph) -> EqualityInstance:
    """Coloring constraints only; no clouds."""
    return EqualityInstance(G3.n, frozenset(G3.edges()), frozenset(), {"mode": "plain"})


def make_equality_instance(G3: Graph, epsilon) -> EqualityInstance:
    """Attach ⌈d_v/ε⌉ equality-linked cloud vertices to every vertex v."""
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise InvalidParams(f"epsilon must lie in (0, 1), got {eps}")
    eq: list[Edge] = []
    clouds = []
    nxt = G3.n
    for v in range(G3.n):
        size = math.ceil(G3.degree(v) / eps)
        members = list(range(nxt, nxt + size))
        eq.extend((v, c) for c in members)
        clouds.append(members)
        nxt += size
    return EqualityInstance(nxt, frozenset(G3.edges()), frozenset(eq),
                            {"mode": "with-clouds", "epsilon": str(eps), "clouds": clouds, "base_n": G3.n})


@dataclass(frozen=True)
class ReducedGraph:
    base: EqualityInstance
    graph: Graph

    @staticmethod
    def vertex(v: int, x: Sequence[int]) -> int:
        return 27 * v + code(x)

    @staticmethod
    def label(k: int) -> tuple[int, tuple[int, ...]]:
        v, r = divmod(k, 27)
        return v, decode(r, 3)


def tensor_reduction(inst: EqualityInstance) -> ReducedGraph:
    edges = []
    for v in range(inst.n):
        b = 27 * v
        edges.extend((b + x, b + y) for x, y in SAME_PAIRS if x < y)
    for u, v in inst.e_eq:
        edges.extend((27 * u + x, 27 * v + y) for x, y in SAME_PAIRS)
    for u, v in inst.e_neq:
        edges.extend((27 * u + x, 27 * v + y) for x, y in CROSS_PAIRS)
    return ReducedGraph(inst, Graph(27 * inst.n, edges))


def _check_assignment(inst: EqualityInstance, assignment: Sequence[int]) -> None:
    if len(assignment) != inst.n or any(a not in (1, 2, 3) for a in assignment):
        raise InvalidParams("assignment must give each vertex a value in {1, 2, 3}")
    if not inst.satisfied_by(assignment):
        raise UnsatisfiedAssignment("assignment violates a constraint")


def completeness_factor(inst: EqualityInstance, assignment: Sequence[int]) -> tuple[Graph, list[int]]:
    """G' on V × [3]^2 and π as a list: ``pi[y * |V(G')| + g]`` is the image of (y, g).

    π inserts the K3 coordinate y at position assignment[v] of the cube point.
    """
    _check_assignment(inst, assignment)
    edges = []
    same2 = [(code(x), code(y)) for x in SQUARE for y in SQUARE if same_rule(x, y)]
    for v in range(inst.n):
        edges.extend((9 * v + x, 9 * v + y) for x, y in same2 if x < y)
    for u, v in inst.e_eq:
        edges.extend((9 * u + x, 9 * v + y) for x, y in same2)
    for u, v in inst.e_neq:
        edges.extend((9 * u + x, 9 * v + y) for x in range(9) for y in range(9))
    gp = Graph(9 * inst.n, edges)
    pi = [0] * (3 * gp.n)
    for y in range(3):
        for g in range(gp.n):
            v, r = divmod(g, 9)
            x = list(decode(r, 2))
            x.insert(assignment[v] - 1, y)
            pi[y * gp.n + g] = ReducedGraph.vertex(v, x)
    return gp, pi


def pushed_product(GPrime: Graph, pi: Sequence[int]) -> Graph:
    """π(K3 × G') as a graph on the reduced vertex set."""
    P = tensor_product(complete_graph(3), GPrime)
    return Graph(len(pi), ((pi[a], pi[b]) for a, b in P.edges()))


def nearness_fractions(red: ReducedGraph, GPrime: Graph, pi: Sequence[int]) -> list[Fraction]:
    """Per-vertex fraction of π(K3 × G') edges missing from the reduced graph.

    Raises ``Inconsistent`` if the reduced graph has an edge outside π(K3 × G').
    """
    P = pushed_product(GPrime, pi)
    H = red.graph
    extra = H.edge_set() - P.edge_set()
    if extra:
        raise Inconsistent(f"{len(extra)} reduced-graph edges are not in the product")
    return [Fraction(P.degree(v) - H.degree(v), P.degree(v)) if P.degree(v) else Fraction(0)
            for v in range(H.n)]


def coloring_from_factor(GPrime: Graph, pi: Sequence[int]) -> list[int]:
    """Color each reduced vertex by its K3 coordinate under π."""
    colors = [0] * len(pi)
    for k, h in enumerate(pi):
        colors[h] = k // GPrime.n
    return colors


def _as_table(L: int, coloring) -> list[int]:
    if isinstance(coloring, Mapping):
        return [coloring[decode(k, L)] for k in range(3 ** L)]
    table = list(coloring)
    if len(table) != 3 ** L:
        raise InvalidParams(f"expected {3 ** L} colors, got {len(table)}")
    return table


def decode_dictator(L: int, coloring):
    """(i, η) with coloring(x) = η[x_i] for all x, i 1-based; None if no such pair.

    ``coloring`` is a sequence indexed by code(x) or a mapping from tuples.
    Raises ``NotAProperColoring`` unless it properly colors the L-fold K3 tensor.
    """
    table = _as_table(L, coloring)
    points = [decode(k, L) for k in range(3 ** L)]
    if any(c not in (0, 1, 2) for c in table):
        raise NotAProperColoring("colors must be 0, 1 or 2")
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if table[a] == table[b] and same_rule(points[a], points[b]):
                raise NotAProperColoring(f"{points[a]} and {points[b]} are adjacent and share a color")
    for i in range(L):
        eta = [None, None, None]
        ok = True
        for k, x in enumerate(points):
            if eta[x[i]] is None:
                eta[x[i]] = table[k]
            elif eta[x[i]] != table[k]:
                ok = False
                break
        if ok and sorted(eta) == [0, 1, 2]:
            return i + 1, tuple(eta)
    return None


def proper_colorings_of_power(L: int):
    """All proper 3-colorings of the L-fold K3 tensor, by exhaustive enumeration."""
    n = 3 ** L
    points = [decode(k, L) for k in range(n)]
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if same_rule(points[a], points[b])]
    for table in product(range(3), repeat=n):
        if all(table[a] != table[b] for a, b in edges):
            yield table


def dictator_tables(L: int):
    """The 6L dictator colorings η ∘ x_i."""
    for i in range(L):
        for eta in permutations(range(3)):
            yield tuple(eta[decode(k, L)[i]] for k in range(3 ** L))


def soundness_extract(red: ReducedGraph, colors: Sequence[int]) -> list[int]:
    """Decode each 27-copy block to its dictator coordinate; that is the assignment.

    Raises ``NotAProperColoring`` on an improper input and ``Inconsistent`` if
    decoding fails or the decoded assignment violates a constraint.
    """
    H = red.graph
    if len(colors) != H.n or any(colors[u] == colors[v] for u, v in H.edges()):
        raise NotAProperColoring("input is not a proper coloring of the reduced graph")
    phi = []
    for v in range(red.base.n):
        got = decode_dictator(3, colors[27 * v:27 * v + 27])
        if got is None:
            raise Inconsistent(f"block of vertex {v} is not a dictator coloring")
        phi.append(got[0])
    if not red.base.satisfied_by(phi):
        raise Inconsistent("decoded assignment violates a constraint")
    return phi
