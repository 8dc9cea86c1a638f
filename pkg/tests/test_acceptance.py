"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines are printed even with output capture on) or
directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from functools import lru_cache
from itertools import product

import pytest

from tensorcolor.errors import Fail, IncompleteCover
from tensorcolor.graph import Graph, complete_graph, tensor_product
from tensorcolor.hardness import (
    C_LOOSE,
    coloring_from_factor,
    completeness_factor,
    decode_dictator,
    make_equality_instance,
    nearness_fractions,
    plain_instance,
    proper_colorings_of_power,
    soundness_extract,
    tensor_reduction,
)
from tensorcolor.instances import make_instance, noisy_hypercube, odd_cycle, random_regular, relabel_shuffle, two_cliques_bridged
from tensorcolor.invariants import check_instance
from tensorcolor.matching import WeightedBipartite, bottleneck_matching
from tensorcolor.oracles import brute_force_3coloring, brute_force_bottleneck, is_proper_coloring
from tensorcolor.pipeline import analyze, color_with_k_core_components, full_3_coloring, main_reconstruct
from tensorcolor.rng import Xoshiro256

K3 = complete_graph(3)

# criterion 2 and 3 family: d = 100 is impossible on 100 vertices, 64 stands in for it
BOUND_DEGREES = (50, 64)
BOUND_EPSILONS = (Fraction(1, 200), Fraction(1, 100), Fraction(1, 50))
BOUND_STRATEGIES = ("random", "roundrobin")


def line(n: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}"


# ---------------------------------------------------------------- 1

def exact_family():
    out = []
    for n, d in product((20, 50), (6, 10)):
        seed, found = 0, 0
        while found < 5:
            G = random_regular(n, d, seed=seed)
            seed += 1
            if G.is_connected() and not G.is_bipartite():
                out.append(G)
                found += 1
    return out


def criterion_1():
    graphs = exact_family()
    bad = []
    for i, G in enumerate(graphs):
        H = relabel_shuffle(make_instance(G, 0), seed=i).H
        rec = main_reconstruct(H, 0)
        colors = full_3_coloring(H, 0)
        if rec.error_delta != 0 or not is_proper_coloring(H, colors):
            bad.append(i)
    return not bad and len(graphs) == 20, f"{len(graphs) - len(bad)}/{len(graphs)} exact recoveries with proper colorings"


# ---------------------------------------------------------------- 2 and 3

def bound_cells():
    combos = list(product(BOUND_DEGREES, BOUND_EPSILONS, BOUND_STRATEGIES))
    return [(*combos[i % len(combos)], i) for i in range(20)]


@lru_cache(maxsize=None)
def bound_family():
    """(instance, structure) for the 20 cells, built once and shared."""
    out = []
    for d, eps, strategy, seed in bound_cells():
        inst = make_instance(random_regular(100, d, seed=seed), eps, strategy, seed=seed)
        out.append((inst, analyze(inst.H, eps)))
    return tuple(out)


def criterion_2():
    applicable = within = incomplete = 0
    worst = Fraction(0)
    for inst, st in bound_family():
        m = inst.H.num_edges
        try:
            rec = main_reconstruct(inst.H, inst.epsilon, structure=st)
        except IncompleteCover:
            incomplete += 1
            continue
        worst = max(worst, Fraction(rec.error_delta, m))
        if rec.bound_applies(m):
            applicable += 1
            within += rec.within_bound(m)
    ok = incomplete == 0 and within == applicable
    return ok, (f"{within}/{applicable} applicable instances within 550*eps*|E(H)|, "
                f"{incomplete} incomplete covers, max error/|E(H)| = {float(worst):.4g}")


def criterion_3():
    good = 0
    for inst, st in bound_family():
        try:
            colors = full_3_coloring(inst.H, inst.epsilon, structure=st)
        except Fail:
            continue
        good += all(colors[u] != colors[v] for u, v in inst.H.edges())
    return good == 20, f"{good}/20 proper 3-colorings (d in {BOUND_DEGREES})"


# ---------------------------------------------------------------- 4

def invariant_family(count: int = 100):
    rng = Xoshiro256(2024)
    # positive eps only: at eps = 0 the strict confusability test excludes twins (see criterion_4)
    eps_choices = [Fraction(1, 200), Fraction(1, 100), Fraction(1, 50), Fraction(1, 41)]
    strategies = ["random", "roundrobin", "confusable"]
    for i in range(count):
        eps = rng.choice(eps_choices)
        strategy = rng.choice(strategies)
        if i % 10 == 9:
            G = noisy_hypercube(6, Fraction(1, 2))
        else:
            n = 20 + 2 * rng.below(21)
            d = 6 + rng.below(n // 2 - 5)
            if n * d % 2:
                d += 1
            G = random_regular(n, d, seed=i)
        inst = make_instance(G, eps, strategy, seed=i)
        yield relabel_shuffle(inst, seed=i)


def criterion_4():
    total, failed = 0, {}
    for inst in invariant_family():
        total += 1
        for name, v in check_instance(inst).items():
            if v:
                failed[name] = failed.get(name, 0) + len(v)
    detail = f"{total} instances, " + ("zero violations" if not failed else f"violations {failed}")
    # reported, not counted: twins (x and its complement) at eps = 0 give "other" triangles
    boundary = make_instance(noisy_hypercube(6, Fraction(1, 2)), 0)
    others = len(check_instance(boundary)["triangle-types"])
    detail += f"; eps=0 hypercube boundary case: {others} twin triangles outside the strict definitions"
    return not failed and total == 100, detail


# ---------------------------------------------------------------- 5

def criterion_5():
    rng = Xoshiro256(5)
    mismatches = 0
    for _ in range(500):
        k = 1 + rng.below(7)
        den = 1 + rng.below(12)
        rows = [[Fraction(rng.below(den + 1), den) for _ in range(k)] for _ in range(k)]
        if bottleneck_matching(WeightedBipartite.from_rows(rows)).objective != brute_force_bottleneck(rows):
            mismatches += 1
    return mismatches == 0, f"{500 - mismatches}/500 objectives equal the brute force"


# ---------------------------------------------------------------- 6

def criterion_6():
    parts = []
    c5 = plain_instance(odd_cycle(5))
    red = tensor_reduction(c5)
    colors = brute_force_3coloring(red.graph)
    a = colors is not None and c5.satisfied_by(soundness_extract(red, colors))
    parts.append(f"(a) C5 {'ok' if a else 'bad'}")

    b = brute_force_3coloring(tensor_reduction(plain_instance(complete_graph(4))).graph) is None
    parts.append(f"(b) K4 {'non-colorable' if b else 'colorable?'}")

    eps = Fraction(1, 5)
    inst = make_equality_instance(odd_cycle(5), C_LOOSE * eps)
    base = [1, 2, 1, 2, 3]
    full = base + [base[v] for v, cloud in enumerate(inst.meta["clouds"]) for _ in cloud]
    red = tensor_reduction(inst)
    gp, pi = completeness_factor(inst, full)
    worst = max(nearness_fractions(red, gp, pi))
    c = worst < eps and is_proper_coloring(red.graph, coloring_from_factor(gp, pi))
    parts.append(f"(c) max missing fraction {worst} = {float(worst):.4f} < {eps}")
    return a and b and c, "; ".join(parts)


# ---------------------------------------------------------------- 7

def criterion_7():
    colorings = list(proper_colorings_of_power(2))
    exceptions = sum(1 for c in colorings if decode_dictator(2, c) is None)
    return exceptions == 0 and colorings, (f"{len(colorings)} proper colorings of K3 x K3 among 3^9, "
                                           f"{exceptions} non-dictators")


# ---------------------------------------------------------------- 8

def severed_two_cliques(size: int = 5) -> Graph:
    G = two_cliques_bridged(size)
    P = tensor_product(K3, G)
    a, b = size - 1, size
    bridge = {tuple(sorted((s * G.n + a, t * G.n + b))) for s in range(3) for t in range(3) if s != t}
    return Graph(P.n, [e for e in P.edges() if e not in bridge])


def criterion_8():
    H = severed_two_cliques()
    try:
        full_3_coloring(H, 0)
        fails = False
    except Fail:
        fails = True
    colors = color_with_k_core_components(H, 0, 2)
    ok = fails and is_proper_coloring(H, colors)
    return ok, f"full coloring {'FAILs' if fails else 'succeeds'}, k=2 coloring proper={is_proper_coloring(H, colors)}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.fixture
def emit(capsys):
    def _emit(n, ok, detail):
        with capsys.disabled():
            print("\n" + line(n, bool(ok), detail))
    return _emit


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n, emit):
    ok, detail = CRITERIA[n - 1]()
    emit(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    status = 0
    for n, fn in enumerate(CRITERIA, 1):
        t0 = time.perf_counter()
        ok, detail = fn()
        print(line(n, bool(ok), f"{detail} [{time.perf_counter() - t0:.1f}s]"), flush=True)
        status |= not ok
    sys.exit(status)
