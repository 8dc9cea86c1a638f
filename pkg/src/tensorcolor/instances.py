"""Base graphs, ε-bounded deletion adversaries and labelled instances.

An instance hides the factor ``G``, the deleted edge set and the label map
``v -> (color, g)``; the algorithms only ever see ``inst.H``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import GenerationFailed, InvalidParams
from .graph import Graph, as_fraction, complete_graph, edge_set, norm_edge, tensor_product
from .rng import Xoshiro256

K3 = complete_graph(3)
STRATEGIES = ("random", "roundrobin", "confusable")
KINDS = ("regular", "hypercube", "complete", "odd-cycle", "two-cliques")
RETRY_CAP = 1000


# ---------------------------------------------------------------- base graphs

def _random_regular_edges(n: int, d: int, rng: Xoshiro256):
    """One pairing-model attempt; stubs forming loops or multi-edges are re-paired."""
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        leftover: Counter = Counter()
        rng.shuffle(stubs)
        for i in range(0, len(stubs), 2):
            a, b = stubs[i], stubs[i + 1]
            e = norm_edge(a, b)
            if a != b and e not in edges:
                edges.add(e)
            else:
                leftover[a] += 1
                leftover[b] += 1
        if leftover and not any(
            norm_edge(a, b) not in edges for a, b in combinations(sorted(leftover), 2)
        ):
            return None
        stubs = [v for v in sorted(leftover) for _ in range(leftover[v])]
    return edges


def random_regular(n: int, d: int, seed: int) -> Graph:
    if not 0 < d < n or (n * d) % 2:
        raise InvalidParams(f"random regular graph needs 0 < d < n and n*d even (n={n}, d={d})")
    rng = Xoshiro256(seed)
    for _ in range(RETRY_CAP):
        edges = _random_regular_edges(n, d, rng)
        if edges is None:
            continue
        g = Graph(n, edges)
        if g.is_connected():
            return g
    raise GenerationFailed(f"no connected {d}-regular graph on {n} vertices after {RETRY_CAP} attempts")


def noisy_hypercube(ell: int, beta) -> Graph:
    """Vertices {0,1}^ℓ, adjacent iff Hamming distance is exactly βℓ.

    For even βℓ the graph splits into the even- and odd-weight halves.
    """
    beta = as_fraction(beta)
    dist = beta * ell
    if ell < 1 or dist.denominator != 1 or not 0 < dist <= ell:
        raise InvalidParams(f"noisy hypercube needs βℓ a positive integer ≤ ℓ (ℓ={ell}, β={beta})")
    k = int(dist)
    n = 1 << ell
    return Graph(n, [(x, y) for x in range(n) for y in range(x + 1, n) if (x ^ y).bit_count() == k])


def odd_cycle(n: int) -> Graph:
    if n < 3 or n % 2 == 0:
        raise InvalidParams(f"odd cycle needs odd n ≥ 3 (got {n})")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def two_cliques_bridged(n: int) -> Graph:
    """Two copies of K_n (vertices 0..n-1 and n..2n-1) joined by the edge (n-1, n)."""
    if n < 2:
        raise InvalidParams(f"clique size must be ≥ 2 (got {n})")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges += [(u + n, v + n) for u, v in edges]
    edges.append((n - 1, n))
    return Graph(2 * n, edges)


def gen_base_graph(kind: str, seed: int = 0, **params) -> Graph:
    """Build a base graph ``G``.

    kinds: ``regular`` (n, d), ``hypercube`` (ell, beta), ``complete`` (n),
    ``odd-cycle`` (n), ``two-cliques`` (n = clique size).
    """
    try:
        if kind == "regular":
            return random_regular(int(params["n"]), int(params["d"]), seed)
        if kind == "hypercube":
            return noisy_hypercube(int(params["ell"]), params["beta"])
        if kind == "complete":
            n = int(params["n"])
            if n < 2:
                raise InvalidParams("complete graph needs n ≥ 2")
            return complete_graph(n)
        if kind == "odd-cycle":
            return odd_cycle(int(params["n"]))
        if kind == "two-cliques":
            return two_cliques_bridged(int(params["n"]))
    except KeyError as exc:
        raise InvalidParams(f"missing parameter {exc} for graph kind {kind!r}") from None
    raise InvalidParams(f"unknown graph kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------- instances

@dataclass(frozen=True)
class LabeledInstance:
    H: Graph
    G: Graph
    deleted: frozenset
    labels: tuple  # labels[v] = (color in 0..2, g in V(G))
    epsilon: Fraction
    seed: int = 0
    strategy: str = "random"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_g(self) -> int:
        return self.G.n

    def color(self, v: int) -> int:
        return self.labels[v][0]

    def g_class(self, v: int) -> int:
        return self.labels[v][1]

    def core_triple(self, g: int) -> tuple[int, ...]:
        return tuple(sorted(v for v, (_, gv) in enumerate(self.labels) if gv == g))

    def core_triples(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for v, (_, g) in enumerate(self.labels):
            out.setdefault(g, []).append(v)
        return {g: tuple(sorted(vs)) for g, vs in sorted(out.items())}

    def product_edges(self) -> frozenset:
        """E(K3 × G) transported to H's vertex ids through the labels."""
        where = {lab: v for v, lab in enumerate(self.labels)}
        out = set()
        for g1, g2 in self.G.edges():
            for t1 in range(3):
                for t2 in range(3):
                    if t1 != t2:
                        out.add(norm_edge(where[(t1, g1)], where[(t2, g2)]))
        return frozenset(out)

    def product_degree(self, v: int) -> int:
        return 2 * self.G.degree(self.g_class(v))

    def budget(self, v: int) -> int:
        e = self.epsilon
        return (e.numerator * self.product_degree(v)) // e.denominator

    def deleted_degrees(self) -> list[int]:
        counts = [0] * self.H.n
        for u, v in self.deleted:
            counts[u] += 1
            counts[v] += 1
        return counts

    def to_dict(self, blind: bool = False) -> dict:
        d = {
            "format": "tensorcolor-instance v1",
            "n": self.H.n,
            "epsilon": str(self.epsilon),
            "seed": self.seed,
            "strategy": self.strategy,
            "h_edges": [list(e) for e in sorted(self.H.edges())],
        }
        if not blind:
            d["ground_truth"] = {
                "n_g": self.G.n,
                "g_edges": [list(e) for e in sorted(self.G.edges())],
                "labels": [list(lab) for lab in self.labels],
                "deleted_edges": [list(e) for e in sorted(self.deleted)],
            }
        if self.meta:
            d["meta"] = self.meta
        return d

    def to_json(self, blind: bool = False) -> str:
        return json.dumps(self.to_dict(blind), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledInstance":
        gt = d.get("ground_truth")
        if gt is None:
            raise InvalidParams("instance has no ground_truth section (blind file)")
        H = Graph(int(d["n"]), d["h_edges"])
        G = Graph(int(gt["n_g"]), gt["g_edges"])
        return cls(
            H=H,
            G=G,
            deleted=edge_set(gt["deleted_edges"]),
            labels=tuple((int(c), int(g)) for c, g in gt["labels"]),
            epsilon=as_fraction(d["epsilon"]),
            seed=int(d.get("seed", 0)),
            strategy=d.get("strategy", "random"),
            meta=d.get("meta", {}),
        )


def graph_from_instance_dict(d: dict) -> Graph:
    """The observable graph H of an instance file (blind or not)."""
    return Graph(int(d["n"]), d["h_edges"])


def _delete_random(P: Graph, budget: list[int], eps: Fraction, rng: Xoshiro256) -> set:
    deleted: set = set()
    stacks: list[list] = [[] for _ in range(P.n)]
    count = [0] * P.n
    for e in P.edges():
        if rng.bernoulli(eps):
            deleted.add(e)
            for x in e:
                stacks[x].append(e)
                count[x] += 1
    changed = True
    while changed:
        changed = False
        for v in range(P.n):
            while count[v] > budget[v]:
                e = stacks[v].pop()
                if e not in deleted:
                    continue
                deleted.discard(e)
                count[e[0]] -= 1
                count[e[1]] -= 1
                changed = True
    return deleted


def _delete_round_robin(P: Graph, budget: list[int], rng: Xoshiro256) -> set:
    deleted: set = set()
    left = list(budget)
    queues = []
    for v in range(P.n):
        nb = list(P.adj[v])
        rng.shuffle(nb)
        queues.append(nb)
    pos = [0] * P.n
    progress = True
    while progress:
        progress = False
        for v in range(P.n):
            if left[v] <= 0:
                continue
            q = queues[v]
            while pos[v] < len(q):
                w = q[pos[v]]
                pos[v] += 1
                e = norm_edge(v, w)
                if e not in deleted and left[w] > 0:
                    deleted.add(e)
                    left[v] -= 1
                    left[w] -= 1
                    progress = True
                    break
    return deleted


def _delete_confusable(G: Graph, budget: list[int], rng: Xoshiro256) -> set:
    """Greedy: for same-color pairs with large |I_G|, strip each side's private edges.

    Best effort only, bounded by the per-vertex budget.
    """
    n = G.n
    common = G.common_neighbor_counts()
    pairs = [
        (-int(common[g1, g2]), rng.next_u64(), g1, g2)
        for g1 in range(n)
        for g2 in range(g1 + 1, n)
        if 0 < common[g1, g2] < max(G.degree(g1), G.degree(g2))
    ]
    pairs.sort()
    left = list(budget)
    deleted: set = set()
    for _, _, g1, g2 in pairs:
        s1, s2 = G.neighbor_set(g1), G.neighbor_set(g2)
        for t in range(3):
            for g, private in ((g1, sorted(s1 - s2)), (g2, sorted(s2 - s1))):
                x = t * n + g
                for h in private:
                    if left[x] <= 0:
                        break
                    for t2 in range(3):
                        y = t2 * n + h
                        if t2 == t or left[x] <= 0 or left[y] <= 0:
                            continue
                        e = norm_edge(x, y)
                        if e not in deleted:
                            deleted.add(e)
                            left[x] -= 1
                            left[y] -= 1
        if not any(left):
            break
    return deleted


def make_instance(G: Graph, epsilon, strategy: str = "random", seed: int = 0) -> LabeledInstance:
    """Delete edges from K3 × G, at most ⌊ε·deg_P(v)⌋ at each vertex v."""
    eps = as_fraction(epsilon)
    if not 0 <= eps < 1:
        raise InvalidParams(f"epsilon must lie in [0, 1) (got {eps})")
    if strategy not in STRATEGIES:
        raise InvalidParams(f"unknown deletion strategy {strategy!r}; expected one of {STRATEGIES}")
    P = tensor_product(K3, G)
    budget = [(eps.numerator * P.degree(v)) // eps.denominator for v in range(P.n)]
    rng = Xoshiro256(seed)
    if not any(budget):
        deleted: set = set()
    elif strategy == "random":
        deleted = _delete_random(P, budget, eps, rng)
    elif strategy == "roundrobin":
        deleted = _delete_round_robin(P, budget, rng)
    else:
        deleted = _delete_confusable(G, budget, rng)
    H = Graph(P.n, [e for e in P.edges() if e not in deleted])
    labels = tuple((v // G.n, v % G.n) for v in range(P.n))
    inst = LabeledInstance(H, G, frozenset(deleted), labels, eps, seed, strategy)
    check_budget(inst)
    return inst


def check_budget(inst: LabeledInstance) -> None:
    for v, d in enumerate(inst.deleted_degrees()):
        if d > inst.budget(v):
            raise AssertionError(f"vertex {v} lost {d} edges, budget {inst.budget(v)}")


def relabel_shuffle(inst: LabeledInstance, seed: int, permutation=None) -> LabeledInstance:
    """Rename H's vertices by a uniform permutation (``perm[old] = new``)."""
    n = inst.H.n
    perm = list(permutation) if permutation is not None else Xoshiro256(seed).permutation(n)
    if sorted(perm) != list(range(n)):
        raise InvalidParams("permutation must be a bijection on V(H)")
    H = Graph(n, [(perm[u], perm[v]) for u, v in inst.H.edges()])
    labels = [None] * n
    for v, lab in enumerate(inst.labels):
        labels[perm[v]] = lab
    deleted = frozenset(norm_edge(perm[u], perm[v]) for u, v in inst.deleted)
    return LabeledInstance(H, inst.G, deleted, tuple(labels), inst.epsilon, inst.seed, inst.strategy, dict(inst.meta))
