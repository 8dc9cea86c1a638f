import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tensorcolor.errors import Fail, IncompleteCover, InvalidParams, NotNearTensor
from tensorcolor.graph import Graph, complete_graph, tensor_product
from tensorcolor.instances import make_instance, random_regular, relabel_shuffle, two_cliques_bridged
from tensorcolor.oracles import is_proper_coloring
from tensorcolor.pipeline import (
    METRICS_HEADER,
    analyze,
    color_with_k_core_components,
    epsilon_grid,
    epsilon_search,
    full_3_coloring,
    main_reconstruct,
    metrics_row,
    read_metrics,
    reconstruction_from_dict,
    write_metrics,
)
from tensorcolor.rng import Xoshiro256

K3 = complete_graph(3)


def severed_two_cliques(size=5):
    """K3 × (two K_size bridged) with the six tensor edges over the bridge removed."""
    G = two_cliques_bridged(size)
    P = tensor_product(K3, G)
    a, b = size - 1, size
    bridge = {tuple(sorted((s * G.n + a, t * G.n + b))) for s in range(3) for t in range(3) if s != t}
    return Graph(P.n, [e for e in P.edges() if e not in bridge])


@pytest.mark.parametrize("n,d,seed", [(20, 6, 0), (20, 10, 1), (50, 6, 2)])
def test_exact_recovery(n, d, seed):
    H = relabel_shuffle(make_instance(random_regular(n, d, seed=seed), 0), seed).H
    rec = main_reconstruct(H, 0, check_atomic=True)
    assert rec.error_delta == 0
    assert rec.h_tilde == H.edge_set() == rec.implied_edges()
    assert is_proper_coloring(H, rec.coloring())
    assert is_proper_coloring(H, full_3_coloring(H, 0))


def test_recovered_base_graph_is_isomorphic_in_size(small_exact):
    rec = main_reconstruct(small_exact.H, 0)
    assert rec.g_tilde.n == small_exact.G.n
    assert sorted(rec.g_tilde.degrees()) == sorted(small_exact.G.degrees())


def test_edgeless_input_is_incomplete():
    with pytest.raises(IncompleteCover) as exc:
        main_reconstruct(Graph(9), 0)
    assert exc.value.uncovered == list(range(9))
    assert exc.value.partial.components == []


def test_epsilon_range_is_checked(small_exact):
    for bad in ["1/40", "-1/100", "1/2"]:
        with pytest.raises(InvalidParams):
            main_reconstruct(small_exact.H, bad)


def test_strict_cut_rejects_the_empty_cut(small_exact):
    # the literal >= test rejects a zero cut against a zero bound
    with pytest.raises(IncompleteCover):
        main_reconstruct(small_exact.H, 0, strict_cut=True)


def test_noisy_reconstruction(small_noisy):
    inst = small_noisy
    rec = main_reconstruct(inst.H, inst.epsilon, check_atomic=True)
    assert rec.within_bound(inst.H.num_edges)
    assert is_proper_coloring(inst.H, rec.coloring())
    assert rec.h_tilde == rec.implied_edges()


def test_structure_can_be_shared(small_noisy):
    st_ = analyze(small_noisy.H, small_noisy.epsilon)
    a = main_reconstruct(small_noisy.H, small_noisy.epsilon, structure=st_)
    b = main_reconstruct(small_noisy.H, small_noisy.epsilon)
    assert a.to_dict() == b.to_dict()


def test_two_cliques_need_two_components():
    H = severed_two_cliques()
    for eps in [0, "1/100"]:
        with pytest.raises(Fail) as exc:
            full_3_coloring(H, eps)
        assert exc.value.stage == "coloring"
        with pytest.raises(Fail):
            color_with_k_core_components(H, eps, 1)
        assert is_proper_coloring(H, color_with_k_core_components(H, eps, 2))


def test_k_component_edge_cases(small_exact):
    with pytest.raises(Fail):
        color_with_k_core_components(small_exact.H, 0, 0)
    assert color_with_k_core_components(Graph(4), 0, 0) == [0, 0, 0, 0]
    with pytest.raises(InvalidParams):
        color_with_k_core_components(small_exact.H, 0, -1)
    assert is_proper_coloring(small_exact.H, color_with_k_core_components(small_exact.H, 0, 1))


def test_epsilon_grid():
    grid = epsilon_grid()
    assert grid == sorted(grid)
    assert grid[0] == Fraction(1, 2**20) and grid[-1] == Fraction(1, 41)
    assert all(0 < e < Fraction(1, 40) for e in grid)


def test_epsilon_search_on_exact_tensor(small_exact):
    eps, rec = epsilon_search(small_exact.H)
    assert eps == epsilon_grid()[0]
    assert rec.error_delta == 0


def test_epsilon_search_rejects_non_tensors():
    with pytest.raises(NotNearTensor):
        epsilon_search(complete_graph(30))
    r = Xoshiro256(1)
    gnp = Graph(60, [(u, v) for u in range(60) for v in range(u + 1, 60) if r.bernoulli(Fraction(1, 2))])
    with pytest.raises(NotNearTensor):
        epsilon_search(gnp)


def test_bound_applicability():
    rec = main_reconstruct(make_instance(complete_graph(4), 0).H, 0)
    assert not rec.bound_applies(10**9)  # eps = 0
    rec.epsilon_used = Fraction(1, 50)
    assert rec.bound_applies(600) and not rec.bound_applies(599)


def test_json_round_trip(small_noisy):
    rec = main_reconstruct(small_noisy.H, small_noisy.epsilon)
    back = reconstruction_from_dict(json.loads(rec.to_json()))
    assert back.h_tilde == rec.h_tilde
    assert back.coloring() == rec.coloring()
    assert back.error_delta == rec.error_delta


def test_metrics_csv():
    H = make_instance(random_regular(20, 6, seed=0), 0).H
    rec = main_reconstruct(H, 0)
    rows = [metrics_row(H, rec, 0, 0.5), metrics_row(H, None, "1/41", 1.0)]
    buf = io.StringIO()
    write_metrics(buf, rows)
    text = buf.getvalue()
    assert text.splitlines()[0] == METRICS_HEADER
    back = read_metrics(text)
    assert back[0]["error_delta"] == "0" and back[0]["component_counts"] == f"1/{rec.stats['components']}"
    assert back[1]["error_delta"] == ""
    with pytest.raises(ValueError):
        read_metrics("n,m\n1,2\n")


@settings(max_examples=6)
@given(st.integers(0, 10**6))
def test_relabeling_does_not_change_quality(seed):
    inst = make_instance(random_regular(20, 8, seed=seed % 3), 0)
    out = relabel_shuffle(inst, seed)
    assert main_reconstruct(out.H, 0).error_delta == 0
    assert is_proper_coloring(out.H, full_3_coloring(out.H, 0))
