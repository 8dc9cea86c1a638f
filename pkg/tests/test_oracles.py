from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given

from tensorcolor.errors import SizeCap
from tensorcolor.graph import Graph, complete_graph, tensor_product
from tensorcolor.instances import odd_cycle, random_regular
from tensorcolor.oracles import (
    brute_force_3coloring,
    brute_force_bottleneck,
    confusable,
    disjunction,
    exhaustive_3coloring,
    is_proper_coloring,
)

from .test_graph import graphs


def test_coloring_examples():
    assert brute_force_3coloring(complete_graph(4)) is None
    colors = brute_force_3coloring(odd_cycle(5))
    assert is_proper_coloring(odd_cycle(5), colors)
    H = tensor_product(complete_graph(3), random_regular(30, 7 - 1, seed=4))
    assert is_proper_coloring(H, brute_force_3coloring(H))
    assert brute_force_3coloring(Graph(0)) == []


@given(graphs(9))
def test_backtracking_agrees_with_exhaustive(G):
    fast, slow = brute_force_3coloring(G), exhaustive_3coloring(G)
    assert (fast is None) == (slow is None)
    if fast is not None:
        assert is_proper_coloring(G, fast)


def test_coloring_caps():
    with pytest.raises(SizeCap):
        exhaustive_3coloring(Graph(13))
    with pytest.raises(SizeCap):
        brute_force_3coloring(Graph(151))


def test_bottleneck_examples():
    assert brute_force_bottleneck([[Fraction(3, 7)]]) == Fraction(3, 7)
    w = [[Fraction(9, 10), Fraction(2, 10)], [Fraction(3, 10), Fraction(8, 10)]]
    assert brute_force_bottleneck(w) == Fraction(4, 5)
    with pytest.raises(SizeCap):
        brute_force_bottleneck([[0] * 9] * 9)


def test_bottleneck_counts_every_permutation():
    # the best matching is the anti-diagonal, found only by trying all of them
    w = [[0, 0, 5], [0, 5, 0], [5, 0, 0]]
    assert brute_force_bottleneck(w) == 5
    assert len(list(permutations(range(3)))) == 6


def test_disjunction_examples():
    K4 = complete_graph(4)
    assert disjunction(K4, 1, 1, 1) == 0
    assert disjunction(K4, 0, 1, 2) == 3
    twins = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert disjunction(twins, 0, 1, 0) == 0


def test_confusable_examples():
    twins = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert confusable(twins, 0, 1, "1/100")
    assert not confusable(twins, 0, 1, 0)  # strict inequality at eps = 0
    apart = Graph(4, [(0, 2), (1, 3)])
    assert not confusable(apart, 0, 1, "1/10")
