from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tensorcolor.candidate import (
    TriangleKind,
    build_candidate_graph,
    classify_triangle_ground_truth,
    compatible,
    enumerate_triangles,
    epsilon_similar_degree,
    is_atomic,
    is_candidate_edge,
    triangle_components,
)
from tensorcolor.errors import CapExceeded
from tensorcolor.graph import Graph, complete_graph, tensor_product
from tensorcolor.instances import STRATEGIES, make_instance, random_regular

K3 = complete_graph(3)


def star_pair(d1, d2):
    """Vertices 0 and 1 with d1 and d2 private leaves."""
    edges = [(0, 2 + i) for i in range(d1)] + [(1, 2 + d1 + i) for i in range(d2)]
    return Graph(2 + d1 + d2, edges)


def test_similar_degree_examples():
    assert epsilon_similar_degree(star_pair(5, 5), 0, 1, 0)
    assert not epsilon_similar_degree(star_pair(100, 97), 0, 1, "0.01")
    assert epsilon_similar_degree(star_pair(100, 98), 0, 1, "0.01")


def test_candidate_edge_examples():
    P = tensor_product(K3, complete_graph(4))
    assert is_candidate_edge(P, 1, 5, 0)  # core triple of g = 1
    assert not is_candidate_edge(P, 0, 1, 0)  # same color, two intersections per common g
    assert not is_candidate_edge(star_pair(10, 2), 0, 1, "1/41")


def test_candidate_graph_examples():
    assert build_candidate_graph(Graph(6), 0).edges.num_edges == 0
    C6 = tensor_product(K3, complete_graph(2))
    C = build_candidate_graph(C6, 0)
    for g in range(2):
        assert C.edges.has_edge(g, 2 + g) and C.edges.has_edge(g, 4 + g) and C.edges.has_edge(2 + g, 4 + g)


@settings(max_examples=10)
@given(st.integers(0, 50), st.sampled_from(["0", "1/100", "1/41"]), st.sampled_from(STRATEGIES))
def test_bulk_candidates_match_pairwise(seed, eps, strategy):
    inst = make_instance(random_regular(16, 6 + 2 * (seed % 4), seed=seed), eps, strategy, seed)
    C = build_candidate_graph(inst.H, eps)
    n = inst.H.n
    for u in range(n):
        for v in range(u + 1, n):
            assert C.edges.has_edge(u, v) == is_candidate_edge(inst.H, u, v, eps)


def test_triangle_examples():
    assert enumerate_triangles(Graph(4, [(0, 1), (1, 2), (2, 3)])) == []
    assert enumerate_triangles(K3) == [(0, 1, 2)]
    with pytest.raises(CapExceeded):
        enumerate_triangles(complete_graph(8), cap=3)


def test_exact_instance_has_all_core_triples(small_exact):
    tris = set(enumerate_triangles(build_candidate_graph(small_exact.H, 0)))
    assert set(small_exact.core_triples().values()) <= tris


def test_compatible_examples():
    G = Graph(2, [(0, 1)])
    P = tensor_product(K3, G)  # core triples (0, 2, 4) and (1, 3, 5)
    assert compatible(P, (0, 2, 4), (1, 3, 5)) == (1, 3, 5)
    cut = Graph(6, [e for e in P.edges() if e != (0, 3)])
    assert compatible(cut, (0, 2, 4), (1, 3, 5)) is None
    assert compatible(P, (0, 2, 4), (0, 3, 5)) is None


def test_compatible_returns_the_color_matching():
    P = tensor_product(K3, complete_graph(3))
    # pairs vertex (c, 0) with (c, 1) for every color c, whatever order T2 is given in
    assert compatible(P, (0, 3, 6), (7, 1, 4)) == (1, 4, 7)


def test_component_examples(small_exact):
    inst = small_exact
    C = build_candidate_graph(inst.H, 0)
    tc = triangle_components(inst.H, enumerate_triangles(C), C)
    index = {t: i for i, t in enumerate(tc.triangles)}
    comps = {tc.component_of[index[t]] for t in inst.core_triples().values()}
    assert len(comps) == 1

    single = triangle_components(K3, [(0, 1, 2)], K3)
    assert single.components == [[0]] and single.covered == [(0, 1, 2)]

    P = tensor_product(K3, Graph(2, [(0, 1)]))
    severed = Graph(6)
    tc2 = triangle_components(severed, [(0, 2, 4), (1, 3, 5)], method="pairwise")
    assert len(tc2.components) == 2
    tc3 = triangle_components(P, [(0, 2, 4), (1, 3, 5)], method="pairwise")
    assert len(tc3.components) == 1


@settings(max_examples=12)
@given(st.integers(0, 40), st.sampled_from(["0", "1/100", "1/41"]), st.sampled_from(STRATEGIES))
def test_fast_compatibility_equals_pairwise(seed, eps, strategy):
    inst = make_instance(random_regular(12 + 2 * (seed % 3), 6, seed=seed), eps, strategy, seed)
    C = build_candidate_graph(inst.H, eps)
    tris = enumerate_triangles(C)
    fast = triangle_components(inst.H, tris, C)
    slow = triangle_components(inst.H, tris, method="pairwise")
    assert fast.components == slow.components
    assert [sorted(fast.adjacency[i]) for i in range(len(tris))] == [sorted(slow.adjacency[i]) for i in range(len(tris))]


def test_atomic_examples(small_exact):
    C = build_candidate_graph(small_exact.H, 0)
    n = small_exact.H.n
    assert is_atomic(C, []) and is_atomic(C, range(n))
    comp = C.component_members()[0]
    assert is_atomic(C, comp)
    if len(comp) > 1:
        assert not is_atomic(C, comp[: len(comp) // 2])


def test_classify_core_and_twin_quasi_core():
    # vertices 0 and 1 of G have identical neighbourhoods {2, 3, 4}
    G = Graph(6, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 5), (3, 5), (4, 5), (2, 3)])
    inst = make_instance(G, "1/100")
    assert classify_triangle_ground_truth(inst, inst.core_triple(0)) is TriangleKind.CORE
    mixed = (0 * 6 + 0, 1 * 6 + 1, 2 * 6 + 0)
    assert classify_triangle_ground_truth(inst, mixed) is TriangleKind.QUASI_CORE
    # at eps = 0 the strict confusability test fails, so the same triangle is "other"
    exact = make_instance(G, 0)
    assert classify_triangle_ground_truth(exact, mixed) is TriangleKind.OTHER


def test_classify_needs_fraction_epsilon():
    inst = make_instance(complete_graph(4), Fraction(0))
    assert classify_triangle_ground_truth(inst, inst.core_triple(2)) is TriangleKind.CORE
