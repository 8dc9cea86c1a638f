import pytest

from tensorcolor.candidate import build_candidate_graph
from tensorcolor.graph import Graph
from tensorcolor.instances import make_instance, noisy_hypercube, random_regular, relabel_shuffle
from tensorcolor.invariants import check_instance, degree_bounds, intersection_bounds, kind_counts
from tensorcolor.pipeline import analyze

CASES = [
    (20, 6, "0", "random"),
    (30, 10, "1/100", "roundrobin"),
    (40, 24, "1/41", "random"),
    (40, 24, "1/41", "confusable"),
    (50, 26, "1/50", "roundrobin"),
]


@pytest.mark.parametrize("n,d,eps,strategy", CASES)
def test_no_violations(n, d, eps, strategy):
    inst = relabel_shuffle(make_instance(random_regular(n, d, seed=n), eps, strategy, seed=d), seed=1)
    report = check_instance(inst)
    assert {k: v for k, v in report.items() if v} == {}


def test_hypercube_instance():
    inst = make_instance(noisy_hypercube(6, "1/2"), "1/41", "random", seed=4)
    assert {k: v for k, v in check_instance(inst).items() if v} == {}


def test_bounds_hold_on_all_pairs():
    inst = make_instance(random_regular(20, 12, seed=1), "1/41", "roundrobin", seed=1)
    n = inst.H.n
    assert intersection_bounds(inst, [(u, v) for u in range(n) for v in range(u + 1, n)]) == []
    assert degree_bounds(inst) == []


def test_checks_catch_a_planted_violation():
    inst = make_instance(random_regular(20, 6, seed=0), 0)
    # pretend one vertex lost all of its edges: degree bound must flag it
    H = Graph(inst.H.n, [e for e in inst.H.edges() if 0 not in e])
    broken = type(inst)(H, inst.G, inst.deleted, inst.labels, inst.epsilon)
    assert degree_bounds(broken)


def test_twin_vertices_give_quasi_core_triangles():
    # K_{6,6} has twins on each side; the extra 6-cycle through vertex 0 adds variety
    left, right = range(6), range(6, 12)
    edges = [(a, b) for a in left for b in right] + [(0, 12), (12, 13), (13, 14), (14, 15), (15, 16), (16, 0)]
    inst = make_instance(Graph(17, edges), "1/100")
    st = analyze(inst.H, inst.epsilon)
    counts = kind_counts(inst, st.tc)
    assert counts["quasi-core"] > 0 and counts.get("other", 0) == 0
    C = build_candidate_graph(inst.H, inst.epsilon)
    assert C.edges.num_edges > 0
