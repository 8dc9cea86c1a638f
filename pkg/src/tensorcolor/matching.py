"""Bottleneck (max-min) perfect matching on complete weighted bipartite graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import SizeMismatch
from .graph import Graph, as_fraction

INF = float("inf")


@dataclass(frozen=True)
class WeightedBipartite:
    weights: tuple  # weights[i][j] for left i, right j; exact rationals ≥ 0

    @classmethod
    def from_rows(cls, rows) -> "WeightedBipartite":
        return cls(tuple(tuple(as_fraction(w) for w in row) for row in rows))

    @property
    def left_size(self) -> int:
        return len(self.weights)

    @property
    def right_size(self) -> int:
        return len(self.weights[0]) if self.weights else 0


@dataclass(frozen=True)
class MatchResult:
    pairing: tuple[int, ...]  # pairing[left] = right
    objective: Fraction


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum matching; returns ``match_left`` with -1 for unmatched vertices.

    Neighbour lists are scanned in the order given, so the result is a
    deterministic function of the input.
    """
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    for u in range(n_left):
        for v in adj[u]:
            if match_r[v] == -1:
                match_l[u], match_r[v] = v, u
                break
    dist = [0.0] * n_left
    while True:
        queue = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            return match_l
        pos = [0] * n_left

        def augment(u: int) -> bool:
            # iterative DFS along the BFS layers
            stack = [u]
            path = []
            while stack:
                x = stack[-1]
                advanced = False
                while pos[x] < len(adj[x]):
                    v = adj[x][pos[x]]
                    pos[x] += 1
                    w = match_r[v]
                    if w == -1:
                        path.append((x, v))
                        for a, b in path:
                            match_l[a], match_r[b] = b, a
                        return True
                    if dist[w] == dist[x] + 1:
                        path.append((x, v))
                        stack.append(w)
                        advanced = True
                        break
                if not advanced:
                    dist[x] = INF
                    stack.pop()
                    if path:
                        path.pop()
            return False

        for u in range(n_left):
            if match_l[u] == -1:
                augment(u)


def _as_int_arrays(W: WeightedBipartite) -> tuple[np.ndarray, np.ndarray]:
    num = np.array([[w.numerator for w in row] for row in W.weights], dtype=object)
    den = np.array([[w.denominator for w in row] for row in W.weights], dtype=object)
    return num, den


def _perfect_at(num, den, t: Fraction):
    ok = num * t.denominator >= den * t.numerator
    adj = [np.flatnonzero(row.astype(bool)).tolist() for row in ok]
    match = hopcroft_karp(adj, num.shape[1])
    return match if all(m >= 0 for m in match) else None


def bottleneck_matching(W: WeightedBipartite) -> MatchResult:
    """Perfect matching maximising its minimum weight.

    Binary search over the sorted distinct weights; each probe asks for a
    perfect matching among pairs with weight ≥ threshold.
    """
    k = W.left_size
    if k < 1 or any(len(row) != k for row in W.weights):
        raise SizeMismatch(f"need a square k×k weight table with k ≥ 1 (got {k} rows)")
    if any(w < 0 for row in W.weights for w in row):
        raise ValueError("weights must be non-negative")
    num, den = _as_int_arrays(W)
    values = sorted({w for row in W.weights for w in row})
    lo, hi = 0, len(values) - 1  # values[lo] is always feasible (complete graph)
    best = _perfect_at(num, den, values[0])
    assert best is not None
    feasible = {0: True}
    while lo < hi:
        mid = (lo + hi + 1) // 2
        match = _perfect_at(num, den, values[mid])
        feasible[mid] = match is not None
        if match is not None:
            lo, best = mid, match
        else:
            hi = mid - 1
    # thresholded feasibility is monotone in t
    assert all(f for i, f in feasible.items() if i <= lo) and not any(f for i, f in feasible.items() if i > lo)
    objective = min(W.weights[i][best[i]] for i in range(k))
    assert objective == values[lo]
    return MatchResult(tuple(best), objective)


def pair_weight(H: Graph, u: int, v: int) -> Fraction:
    d = max(H.degree(u), H.degree(v))
    if d == 0:
        return Fraction(0)
    return Fraction(2 * int(H.common_neighbor_counts()[u, v]), d)


def tripartite_weights(H: Graph, A, B, C) -> tuple[WeightedBipartite, WeightedBipartite]:
    """Weights 2|I_H(u,v)| / max(deg u, deg v) on A×B and B×C (0 when both degrees are 0)."""
    if not len(A) == len(B) == len(C):
        raise SizeMismatch("color classes must have equal sizes")
    common = H.common_neighbor_counts()
    deg = H.degrees()

    def table(X, Y):
        rows = []
        for x in X:
            row = []
            for y in Y:
                d = max(deg[x], deg[y])
                row.append(Fraction(2 * int(common[x, y]), d) if d else Fraction(0))
            rows.append(tuple(row))
        return WeightedBipartite(tuple(rows))

    return table(A, B), table(B, C)
