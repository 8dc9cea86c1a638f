"""Independent brute-force references used to check the fast paths."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

from .errors import SizeCap
from .graph import Graph, as_fraction, intersection_size

COLORING_CAP = 150
BOTTLENECK_CAP = 8
ALL = 0b111


def brute_force_3coloring(H: Graph, cap: int = COLORING_CAP):
    """A proper 3-coloring (list of 0..2) or None.

    Backtracking over bitmask domains with forward checking and unit
    propagation; branches on the smallest domain, ties by higher degree then id.
    """
    if H.n > cap:
        raise SizeCap(f"backtracking 3-coloring capped at {cap} vertices (got {H.n})")
    n = H.n
    if n == 0:
        return []
    deg = H.degrees()
    adj = H.adj

    def assign(dom: list[int], fixed: list[bool], v: int, c: int) -> bool:
        queue = [(v, c)]
        while queue:
            x, col = queue.pop()
            bit = 1 << col
            if not dom[x] & bit:
                return False
            if fixed[x]:
                continue
            dom[x] = bit
            fixed[x] = True
            for y in adj[x]:
                if dom[y] & bit:
                    if fixed[y]:
                        return False
                    dom[y] &= ~bit
                    if dom[y] == 0:
                        return False
                    if dom[y] & (dom[y] - 1) == 0:
                        queue.append((y, dom[y].bit_length() - 1))
        return True

    def pick(dom: list[int], fixed: list[bool]) -> int:
        best, key = -1, None
        for v in range(n):
            if not fixed[v]:
                k = (dom[v].bit_count(), -deg[v], v)
                if key is None or k < key:
                    best, key = v, k
        return best

    def solve(dom: list[int], fixed: list[bool]):
        v = pick(dom, fixed)
        if v < 0:
            return dom
        for c in range(3):
            if dom[v] >> c & 1:
                d2, f2 = dom[:], fixed[:]
                if assign(d2, f2, v, c):
                    found = solve(d2, f2)
                    if found is not None:
                        return found
        return None

    dom, fixed = [ALL] * n, [False] * n
    # color permutation symmetry: the first branching vertex may take color 0
    if not assign(dom, fixed, pick(dom, fixed), 0):
        return None
    result = solve(dom, fixed)
    if result is None:
        return None
    return [d.bit_length() - 1 for d in result]


def exhaustive_3coloring(H: Graph, cap: int = 12):
    """Second, independent encoding: scan all 3^n assignments in lexicographic order."""
    if H.n > cap:
        raise SizeCap(f"exhaustive 3-coloring capped at {cap} vertices (got {H.n})")
    edges = H.edges()
    for colors in product(range(3), repeat=H.n):
        if all(colors[u] != colors[v] for u, v in edges):
            return list(colors)
    return None


def is_proper_coloring(H: Graph, colors) -> bool:
    return len(colors) == H.n and all(colors[u] != colors[v] for u, v in H.edges())


def brute_force_bottleneck(weights, cap: int = BOTTLENECK_CAP) -> Fraction:
    """max over all k! perfect matchings of the minimum matched weight."""
    rows = [list(r) for r in getattr(weights, "weights", weights)]
    k = len(rows)
    if k > cap:
        raise SizeCap(f"exhaustive bottleneck capped at k={cap} (got {k})")
    return max(min(rows[i][p[i]] for i in range(k)) for p in permutations(range(k)))


def disjunction(G: Graph, g1: int, g2: int, g3: int) -> int:
    """|(Γ(g1) ∪ Γ(g2) ∪ Γ(g3)) minus Γ(g1) ∩ Γ(g2) ∩ Γ(g3)|."""
    a, b, c = G.neighbor_set(g1), G.neighbor_set(g2), G.neighbor_set(g3)
    return len((a | b | c) - (a & b & c))


def confusable(G: Graph, g1: int, g2: int, epsilon) -> bool:
    """|I_G(g1,g2)| > (1 - 9ε)·max degree, strictly."""
    eps = as_fraction(epsilon)
    return intersection_size(G, g1, g2) > (1 - 9 * eps) * max(G.degree(g1), G.degree(g2))
