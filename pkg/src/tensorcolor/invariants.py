"""Ground-truth checks of the structural guarantees on labeled instances.

Every check returns a list of human-readable violations (empty when the
guarantee holds).  They need the hidden labels, so they are test and
diagnostic tools, not part of the reconstruction itself.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .candidate import (
    CandidateGraph,
    TriangleComponents,
    TriangleKind,
    classify_triangle_ground_truth,
    compatible,
    is_atomic,
)
from .errors import Fail
from .factoring import core_factor
from .graph import edges_between, volume
from .instances import LabeledInstance
from .oracles import disjunction
from .pipeline import Structure, analyze


def intersection_bounds(inst: LabeledInstance, pairs) -> list[str]:
    """I_K3·I_G − 3ε·deg_H(u) ≤ I_H(u,v) ≤ I_K3·I_G, u the higher-degree end."""
    H, G, eps = inst.H, inst.G, inst.epsilon
    ch, cg = H.common_neighbor_counts(), G.common_neighbor_counts()
    out = []
    for u, v in pairs:
        if H.degree(u) < H.degree(v):
            u, v = v, u
        k3 = 2 if inst.color(u) == inst.color(v) else 1
        full = k3 * int(cg[inst.g_class(u), inst.g_class(v)])
        got = int(ch[u, v])
        if not (full - 3 * eps * H.degree(u) <= got <= full):
            out.append(f"intersection of {u},{v} is {got}, product value {full}")
    return out


def degree_bounds(inst: LabeledInstance) -> list[str]:
    """deg_H(u)/2 ≤ deg_G(g) ≤ deg_H(u) / (2(1 − ε))."""
    H, G, eps = inst.H, inst.G, inst.epsilon
    out = []
    for u in range(H.n):
        dg, dh = G.degree(inst.g_class(u)), H.degree(u)
        if not (dh <= 2 * dg and 2 * (1 - eps) * dg <= dh):
            out.append(f"vertex {u}: deg_H {dh}, deg_G {dg}")
    return out


def core_triples_in_c(inst: LabeledInstance, C: CandidateGraph) -> list[str]:
    out = []
    for g, t in inst.core_triples().items():
        for i in range(3):
            for j in range(i + 1, 3):
                if not C.edges.has_edge(t[i], t[j]):
                    out.append(f"core triple of g={g} misses C-edge {t[i]}-{t[j]}")
    return out


def c_edge_cases(inst: LabeledInstance, C: CandidateGraph) -> list[str]:
    """Same color: I_G within (1−6ε, 1+8ε)·deg/4; different colors: same with deg/2."""
    H, G, eps = inst.H, inst.G, inst.epsilon
    cg = G.common_neighbor_counts()
    out = []
    for u, v in C.edges.edges():
        d = max(H.degree(u), H.degree(v))
        share = 4 if inst.color(u) == inst.color(v) else 2
        inter = int(cg[inst.g_class(u), inst.g_class(v)])
        if not ((1 - 6 * eps) * d <= share * inter <= (1 + 8 * eps) * d):
            out.append(f"C-edge {u}-{v}: I_G={inter}, deg={d}, colors equal={share == 4}")
    return out


def triangle_kinds(inst: LabeledInstance, tc: TriangleComponents) -> list[TriangleKind]:
    return [classify_triangle_ground_truth(inst, t) for t in tc.triangles]


def no_other_triangles(kinds, tc) -> list[str]:
    return [f"triangle {tc.triangles[i]} is neither quasi-core nor monochrome"
            for i, k in enumerate(kinds) if k is TriangleKind.OTHER]


def homogeneous_components(kinds, tc) -> list[str]:
    out = []
    for j, members in enumerate(tc.components):
        flavours = {kinds[i].is_quasi_core for i in members if kinds[i] is not TriangleKind.OTHER}
        if len(flavours) > 1:
            out.append(f"component {j} mixes quasi-core and monochrome triangles")
    return out


def core_components(kinds, tc) -> list[int]:
    return [j for j, m in enumerate(tc.components) if all(kinds[i].is_quasi_core for i in m)]


def contains_own_core_triples(inst, tc, cores) -> list[str]:
    """A core component holds the core triple of every G-class it touches."""
    index = {t: i for i, t in enumerate(tc.triangles)}
    out = []
    for j in cores:
        members = set(tc.components[j])
        for v in tc.covered[j]:
            g = inst.g_class(v)
            i = index.get(tuple(sorted(inst.core_triple(g))))
            if i is None or i not in members:
                out.append(f"component {j} covers {v} but not the core triple of g={g}")
    return out


def discrete_covering(inst, C: CandidateGraph, tc, cores) -> list[str]:
    """A core component holds every core triple of a C-component it touches, or none of it."""
    comp_vertices: dict[int, list[int]] = {}
    for v, c in enumerate(C.components):
        comp_vertices.setdefault(c, []).append(v)
    index = {t: i for i, t in enumerate(tc.triangles)}
    out = []
    for j in cores:
        members = set(tc.components[j])
        covered = set(tc.covered[j])
        for ci, verts in comp_vertices.items():
            if covered.isdisjoint(verts):
                continue
            for g in sorted({inst.g_class(v) for v in verts}):
                t = tuple(sorted(inst.core_triple(g)))
                if set(t) <= set(verts) and index.get(t) not in members:
                    out.append(f"component {j} touches C-component {ci} but lacks core triple of g={g}")
    return out


def compatibility_symmetric(H, tc, limit: int = 2000) -> list[str]:
    out = []
    count = 0
    for i in range(len(tc.triangles)):
        for j in tc.adjacency[i]:
            if j <= i:
                continue
            a, b = tc.triangles[i], tc.triangles[j]
            if (compatible(H, a, b) is None) != (compatible(H, b, a) is None) or compatible(H, a, b) is None:
                out.append(f"compatibility of {a} and {b} is not symmetric")
            count += 1
            if count >= limit:
                return out
    return out


def core_cut(inst, tc, cores) -> list[str]:
    H, eps = inst.H, inst.epsilon
    out = []
    for j in cores:
        U = set(tc.covered[j])
        Z = set(range(H.n)) - U
        cut = edges_between(H, U, Z)
        bound = 5 * eps / (1 - eps) * min(volume(H, U), volume(H, Z))
        if cut > bound:
            out.append(f"component {j}: cut {cut} exceeds {bound}")
    return out


@dataclass
class FactoringReport:
    violations: dict = field(default_factory=lambda: {
        "never-fails": [], "output-consistent": [], "triple-degrees": [], "disjunction": [],
        "weak-links": [], "match-quality": [], "atomic": [],
    })
    factored: int = 0
    overlapping: int = 0


def factoring_checks(inst: LabeledInstance, st: Structure, cores) -> FactoringReport:
    """Run core factoring on each core component with U = U_j and audit the result."""
    H, G, eps = inst.H, inst.G, inst.epsilon
    rep = FactoringReport()
    v = rep.violations
    for j in cores:
        U = st.tc.covered[j]
        if not is_atomic(st.C, U):
            v["atomic"].append(f"U of core component {j} is not atomic")
        overlap = st.tc.has_overlap(j)
        rep.overlapping += overlap
        try:
            cf = core_factor(H, st.tc, j, U, eps, allow_overlap=overlap)
        except Fail as exc:
            v["never-fails"].append(f"component {j}: {exc}")
            continue
        rep.factored += 1
        if cf.implied_edges() != cf.h_tilde:
            v["output-consistent"].append(f"component {j}: H~ differs from K3 × G~")
        floor = 1 - 6 * eps
        for m in cf.matchings:
            if m.objective < floor:
                v["match-quality"].append(f"component {j}: objective {m.objective}")
        triples = cf.triples()
        for t in triples:
            degs = [H.degree(x) for x in t]
            if (1 - 14 * eps) * max(degs) > min(degs):
                v["triple-degrees"].append(f"triple {t}: degrees {degs}")
            gs = [inst.g_class(x) for x in t]
            dj = disjunction(G, *gs)
            if dj > 50 * eps * min(degs):
                v["disjunction"].append(f"triple {t}: disjunction {dj}")
        weak = 0
        for a in range(len(triples)):
            for b in range(a + 1, len(triples)):
                hits = sum(H.has_edge(triples[a][i], triples[b][k])
                           for i in range(3) for k in range(3) if i != k)
                weak += 0 < hits < 6
        if weak > 52 * eps * volume(H, U):
            v["weak-links"].append(f"component {j}: {weak} weakly linked pairs")
    return rep


def check_instance(inst: LabeledInstance, structure: Structure | None = None) -> dict[str, list[str]]:
    """All ground-truth structural checks on one instance; name -> violations."""
    st = structure or analyze(inst.H, inst.epsilon)
    C, tc, H = st.C, st.tc, inst.H
    kinds = triangle_kinds(inst, tc)
    cores = core_components(kinds, tc)
    out = {
        "intersection-bounds": intersection_bounds(inst, C.edges.edges()),
        "degree-bounds": degree_bounds(inst),
        "core-triples-in-C": core_triples_in_c(inst, C),
        "C-edge-cases": c_edge_cases(inst, C),
        "triangle-types": no_other_triangles(kinds, tc),
        "homogeneous-components": homogeneous_components(kinds, tc),
        "quasi-core-holds-core": contains_own_core_triples(inst, tc, cores),
        "discrete-covering": discrete_covering(inst, C, tc, cores),
        "compatibility-symmetric": compatibility_symmetric(H, tc),
        "core-cut": core_cut(inst, tc, cores),
    }
    rep = factoring_checks(inst, st, cores)
    out.update(rep.violations)
    return out


def kind_counts(inst: LabeledInstance, tc: TriangleComponents) -> Counter:
    return Counter(k.value for k in triangle_kinds(inst, tc))
