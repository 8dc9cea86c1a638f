"""Main reconstruction loop, full 3-coloring, k-component coloring and ε search."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .candidate import (
    DEFAULT_TRIANGLE_CAP,
    CandidateGraph,
    TriangleComponents,
    build_candidate_graph,
    enumerate_triangles,
    is_atomic,
    triangle_components,
)
from .errors import CapExceeded, Fail, IncompleteCover, InvalidParams, NotNearTensor
from .factoring import ComponentFactorization, Partition3, color_component, core_factor
from .graph import Graph, as_fraction, edges_between, norm_edge, symmetric_difference, volume

log = logging.getLogger(__name__)

EPS_LIMIT = Fraction(1, 40)
DEFAULT_COMPONENT_CAP = 1_000_000
METRICS_HEADER = "# tensorcolor-metrics v1"
METRICS_COLUMNS = ["n", "m", "epsilon", "error_delta", "error_ratio", "component_counts", "wall_time"]


def check_epsilon(epsilon) -> Fraction:
    eps = as_fraction(epsilon)
    if not 0 <= eps < EPS_LIMIT:
        raise InvalidParams(f"epsilon must lie in [0, 1/40), got {eps}")
    return eps


@dataclass
class Structure:
    """C, its triangles and the compatibility components for one (H, ε)."""

    C: CandidateGraph
    tc: TriangleComponents


def analyze(H: Graph, epsilon, triangle_cap: int = DEFAULT_TRIANGLE_CAP,
            component_cap: int = DEFAULT_COMPONENT_CAP) -> Structure:
    C = build_candidate_graph(H, epsilon)
    tris = enumerate_triangles(C, cap=triangle_cap)
    tc = triangle_components(H, tris, C)
    if len(tc.components) > component_cap:
        raise CapExceeded(f"{len(tc.components)} triangle components exceed the cap {component_cap}")
    return Structure(C, tc)


@dataclass
class Reconstruction:
    n: int
    components: list[ComponentFactorization]
    g_tilde: Graph
    h_tilde: frozenset
    error_delta: int
    epsilon_used: Fraction
    color_map: dict = field(default_factory=dict)  # global
    g_map: dict = field(default_factory=dict)  # global ids into g_tilde
    stats: dict = field(default_factory=dict)

    def bound_applies(self, m: int) -> bool:
        """The 550ε bound is only claimed when ε·|E(H)| ≥ |V(H)|."""
        return self.epsilon_used * m >= self.n

    def within_bound(self, m: int) -> bool:
        return self.error_delta <= 550 * self.epsilon_used * m

    def implied_edges(self) -> frozenset:
        triples = {}
        for v, g in self.g_map.items():
            triples.setdefault(g, [None] * 3)[self.color_map[v]] = v
        out = set()
        for g, h in self.g_tilde.edges():
            for i in range(3):
                for k in range(3):
                    if i != k:
                        out.add(norm_edge(triples[g][i], triples[h][k]))
        return frozenset(out)

    def coloring(self) -> list[int]:
        return [self.color_map[v] for v in range(self.n)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon_used": str(self.epsilon_used),
            "error_delta": self.error_delta,
            "components": [
                {
                    "vertices": list(cf.U),
                    "color_map": [cf.color_map[v] for v in cf.U],
                    "g_map": [cf.g_map[v] for v in cf.U],
                    "g_tilde_edges": [list(e) for e in cf.g_tilde.edges()],
                }
                for cf in self.components
            ],
            "h_tilde_edges": [list(e) for e in sorted(self.h_tilde)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def assemble(H: Graph, components: list[ComponentFactorization], eps: Fraction, stats=None) -> Reconstruction:
    """Disjoint union of component factorizations, G~ ids offset in acceptance order."""
    color_map, g_map, g_edges, h = {}, {}, [], set()
    offset = 0
    for cf in components:
        for v in cf.U:
            color_map[v] = cf.color_map[v]
            g_map[v] = cf.g_map[v] + offset
        g_edges.extend((a + offset, b + offset) for a, b in cf.g_tilde.edges())
        h |= cf.h_tilde
        offset += cf.g_tilde.n
    h_tilde = frozenset(h)
    delta = symmetric_difference(H.edge_set(), h_tilde)
    return Reconstruction(H.n, components, Graph(offset, g_edges), h_tilde, delta, eps,
                          color_map, g_map, dict(stats or {}))


def reconstruction_from_dict(d: dict) -> Reconstruction:
    """Rebuild from JSON; the stored error_delta is kept as is (verify recomputes it)."""
    comps = []
    for c in d["components"]:
        U = tuple(c["vertices"])
        cmap = dict(zip(U, c["color_map"]))
        gmap = dict(zip(U, c["g_map"]))
        k = max(gmap.values(), default=-1) + 1
        gt = Graph(k, c["g_tilde_edges"])
        cf = ComponentFactorization(U, cmap, gmap, gt, frozenset())
        cf.h_tilde = cf.implied_edges()
        comps.append(cf)
    color_map, g_map, g_edges, offset = {}, {}, [], 0
    for cf in comps:
        for v in cf.U:
            color_map[v] = cf.color_map[v]
            g_map[v] = cf.g_map[v] + offset
        g_edges.extend((a + offset, b + offset) for a, b in cf.g_tilde.edges())
        offset += cf.g_tilde.n
    h_tilde = frozenset(tuple(e) for e in d["h_tilde_edges"])
    return Reconstruction(d["n"], comps, Graph(offset, g_edges), h_tilde, d["error_delta"],
                          as_fraction(d["epsilon_used"]), color_map, g_map)


def main_reconstruct(
    H: Graph,
    epsilon,
    *,
    triangle_cap: int = DEFAULT_TRIANGLE_CAP,
    component_cap: int = DEFAULT_COMPONENT_CAP,
    strict_cut: bool = False,
    strict_error: bool = False,
    check_atomic: bool = False,
    structure: Structure | None = None,
) -> Reconstruction:
    """Factor H into a disjoint union of K3 × G~ pieces.

    Components of the triangle graph are tried largest first; a factored
    piece is accepted unless its cut to the still-unclaimed vertices is too
    dense. ``strict_cut`` rejects on cut ≥ bound (which also rejects an empty
    cut at ε = 0); the default rejects only on cut > bound.
    Raises ``IncompleteCover`` (carrying the partial result) when vertices remain.
    """
    eps = check_epsilon(epsilon)
    st = structure or analyze(H, eps, triangle_cap, component_cap)
    tc = st.tc
    S = set(range(H.n))
    accepted: list[ComponentFactorization] = []
    stats = {"components": len(tc.components), "triangles": len(tc.triangles), "skipped": {}}

    def skip(reason):
        stats["skipped"][reason] = stats["skipped"].get(reason, 0) + 1

    cut_factor = 5 * eps / (1 - eps)
    for j in tc.ordered():
        if not S:
            break
        if tc.has_overlap(j):
            skip("overlap")
            continue
        U = [v for v in tc.covered[j] if v in S]
        if not U:
            skip("empty")
            continue
        try:
            cf = core_factor(H, tc, j, U, eps, strict=strict_error)
        except Fail as exc:
            skip(exc.stage)
            continue
        rest = S.difference(U)
        cut = edges_between(H, U, rest)
        bound = cut_factor * min(volume(H, U), volume(H, rest))
        if cut > bound or (strict_cut and cut >= bound):
            skip("cut")
            continue
        accepted.append(cf)
        S = rest
        if check_atomic:
            assert is_atomic(st.C, U) and is_atomic(st.C, S), "accepted set is not atomic"
    stats["accepted"] = len(accepted)
    rec = assemble(H, accepted, eps, stats)
    if S:
        raise IncompleteCover(sorted(S), rec)
    return rec


def _proper(H: Graph, colors) -> bool:
    return all(colors[u] != colors[v] for u, v in H.edges())


def full_3_coloring(H: Graph, epsilon, *, allow_overlap: bool = False,
                    structure: Structure | None = None, **caps) -> list[int]:
    """A proper 3-coloring read off a single triangle component covering V(H)."""
    eps = check_epsilon(epsilon)
    st = structure or analyze(H, eps, **caps)
    tc = st.tc
    for j in tc.ordered():
        if len(tc.covered[j]) != H.n:
            continue
        try:
            part = color_component(H, tc, j, allow_overlap)
        except Fail:
            continue
        colors = [part.cls(v) for v in range(H.n)]
        if None not in colors and _proper(H, colors):
            return colors
    raise Fail("coloring", "no triangle component yields a full 3-coloring")


def _exact_covers(cands: list[tuple[int, frozenset]], n: int, k: int):
    """Collections of ≤ k pairwise disjoint candidate sets whose union is range(n)."""
    by_vertex: dict[int, list[int]] = {}
    for i, (_, s) in enumerate(cands):
        for v in s:
            by_vertex.setdefault(v, []).append(i)

    def search(covered: frozenset, chosen: list[int]):
        if len(covered) == n:
            yield list(chosen)
            return
        if len(chosen) == k:
            return
        v = next(x for x in range(n) if x not in covered)
        for i in by_vertex.get(v, []):
            s = cands[i][1]
            if covered.isdisjoint(s):
                chosen.append(i)
                yield from search(covered | s, chosen)
                chosen.pop()

    yield from search(frozenset(), [])


PERMS = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def color_with_k_core_components(H: Graph, epsilon, k: int, *,
                                 structure: Structure | None = None, **caps) -> list[int]:
    """Glue the colorings of up to k vertex-disjoint components covering V(H).

    Each chosen component must be internally consistent; the first one keeps
    its class names and every other one is tried under all 6 renamings.
    """
    eps = check_epsilon(epsilon)
    if k < 0:
        raise InvalidParams("k must be non-negative")
    if H.num_edges == 0:
        return [0] * H.n
    if k == 0:
        raise Fail("coloring", "k = 0 cannot color a graph with edges")
    st = structure or analyze(H, eps, **caps)
    tc = st.tc
    cands: list[tuple[Partition3, frozenset]] = []
    for j in tc.ordered():
        try:
            part = color_component(H, tc, j)
        except Fail:
            continue
        U = frozenset(tc.covered[j])
        if part.is_coloring_of(H, U):
            cands.append((part, U))
    for cover in _exact_covers(cands, H.n, k):
        parts = [cands[i][0] for i in cover]
        owner = {}
        for idx, i in enumerate(cover):
            for v in cands[i][1]:
                owner[v] = idx
        cross = [(u, v) for u, v in H.edges() if owner[u] != owner[v]]
        for rest in product(PERMS, repeat=len(parts) - 1):
            perms = [PERMS[0], *rest]
            colors = [perms[owner[v]][parts[owner[v]].cls(v)] for v in range(H.n)]
            if all(colors[u] != colors[v] for u, v in cross):
                return colors
    raise Fail("coloring", f"no combination of ≤ {k} components gives a proper coloring")


def epsilon_grid(lo_exp: int = 20) -> list[Fraction]:
    """Ascending candidates: 2^-t for t = lo_exp..6, topped by 1/41 just under 1/40."""
    return [Fraction(1, 2 ** t) for t in range(lo_exp, 5, -1)] + [Fraction(1, 41)]


def _succeeds(H: Graph, eps: Fraction, **kw):
    try:
        rec = main_reconstruct(H, eps, **kw)
    except IncompleteCover:
        return None
    return rec if rec.within_bound(H.num_edges) else None


def epsilon_search(H: Graph, grid=None, **kw) -> tuple[Fraction, Reconstruction]:
    """Smallest grid ε at which reconstruction covers V(H) within the 550ε bound."""
    grid = list(grid or epsilon_grid())
    top = _succeeds(H, grid[-1], **kw)
    if top is None:
        raise NotNearTensor(f"reconstruction fails even at epsilon = {grid[-1]}")
    lo, hi, best = 0, len(grid) - 1, top
    while lo < hi:
        mid = (lo + hi) // 2
        rec = _succeeds(H, grid[mid], **kw)
        log.debug("epsilon %s -> %s", grid[mid], "ok" if rec else "fail")
        if rec is not None:
            hi, best = mid, rec
        else:
            lo = mid + 1
    return grid[hi], best


def metrics_row(H: Graph, rec: Reconstruction | None, epsilon, wall_time: float) -> dict:
    m = H.num_edges
    eps = as_fraction(epsilon)
    if rec is None:
        delta, ratio, counts = "", "", ""
    else:
        delta = rec.error_delta
        ratio = f"{delta / m:.6g}" if m else "0"
        counts = f"{rec.stats.get('accepted', len(rec.components))}/{rec.stats.get('components', '')}"
    return {"n": H.n, "m": m, "epsilon": str(eps), "error_delta": delta, "error_ratio": ratio,
            "component_counts": counts, "wall_time": f"{wall_time:.3f}"}


def write_metrics(fh, rows, header: bool = True) -> None:
    if header:
        fh.write(METRICS_HEADER + "\n")
    w = csv.DictWriter(fh, fieldnames=METRICS_COLUMNS + [c for c in (rows[0] if rows else {}) if c not in METRICS_COLUMNS],
                       lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)


def read_metrics(text: str) -> list[dict]:
    lines = text.splitlines()
    if not lines or lines[0] != METRICS_HEADER:
        raise ValueError("missing metrics version header")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def timed_reconstruct(H: Graph, epsilon=None, **kw):
    """(reconstruction, epsilon, seconds); ε found by search when not given."""
    t0 = time.perf_counter()
    if epsilon is None:
        eps, rec = epsilon_search(H, **kw)
    else:
        eps, rec = as_fraction(epsilon), main_reconstruct(H, epsilon, **kw)
    return rec, eps, time.perf_counter() - t0
