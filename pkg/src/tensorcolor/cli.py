"""Command-line front end: gen, reconstruct, color, reduce, verify, bench, oracle."""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import hardness, oracles
from .errors import (
    CapExceeded,
    Fail,
    IncompleteCover,
    InvalidParams,
    NotNearTensor,
    SizeCap,
    TensorColorError,
)
from .graph import Graph, as_fraction, read_dimacs, symmetric_difference, write_dimacs
from .instances import KINDS, STRATEGIES, gen_base_graph, graph_from_instance_dict, make_instance, relabel_shuffle
from .matching import WeightedBipartite, bottleneck_matching
from .pipeline import (
    DEFAULT_COMPONENT_CAP,
    DEFAULT_TRIANGLE_CAP,
    METRICS_COLUMNS,
    color_with_k_core_components,
    full_3_coloring,
    main_reconstruct,
    metrics_row,
    reconstruction_from_dict,
    timed_reconstruct,
    write_metrics,
)

log = logging.getLogger("tensorcolor")

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_NOT_NEAR, EXIT_CAP, EXIT_VERIFY = 0, 1, 2, 3, 4, 5
K_CAP = 4
COMMANDS = ("gen", "reconstruct", "color", "reduce", "verify", "bench", "oracle")


@dataclass
class RunConfig:
    """A subcommand plus its resolved options; stored as JSON for reruns."""

    command: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        if d.get("command") not in COMMANDS:
            raise InvalidParams(f"config names unknown command {d.get('command')!r}")
        return cls(d["command"], dict(d.get("options", {})))

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("command", "config", "dump_config", "func")}
        return cls(ns.command, opts)


# ---------------------------------------------------------------- io helpers

def _read_text(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    p = Path(path)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(p)


def load_graph(path) -> tuple[Graph, dict | None]:
    """H from an instance JSON or a DIMACS file; the parsed JSON is returned too."""
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        d = json.loads(text)
        return graph_from_instance_dict(d), d
    return read_dimacs(io.StringIO(text)), None


def _epsilon(value, doc: dict | None = None, required: bool = True):
    if value is not None:
        return as_fraction(value)
    if doc is not None and "epsilon" in doc:
        return as_fraction(doc["epsilon"])
    if required:
        raise InvalidParams("--epsilon is required for this input")
    return None


def _caps(a) -> dict:
    return {"triangle_cap": a.triangle_cap, "component_cap": a.component_cap}


# ---------------------------------------------------------------- commands

def cmd_gen(a) -> int:
    params = {"n": a.n, "d": a.d, "ell": a.ell, "beta": a.beta}
    params = {k: v for k, v in params.items() if v is not None}
    G = gen_base_graph(a.g_type, seed=a.seed, **params)
    inst = make_instance(G, a.epsilon, a.strategy, seed=a.seed)
    if a.shuffle_seed is not None:
        inst = relabel_shuffle(inst, a.shuffle_seed)
    _write_text(a.output, inst.to_json())
    if a.dimacs:
        with open(a.dimacs, "w") as fh:
            write_dimacs(inst.H, fh, comment=f"tensorcolor gen {a.g_type} epsilon={inst.epsilon} seed={a.seed}")
    return EXIT_OK


def _append_metrics(path, row: dict) -> None:
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as fh:
        if fresh:
            write_metrics(fh, [row])
        else:
            csv.DictWriter(fh, fieldnames=METRICS_COLUMNS, lineterminator="\n",
                           extrasaction="ignore").writerow(row)


def cmd_reconstruct(a) -> int:
    H, doc = load_graph(a.input)
    eps = _epsilon(a.epsilon, None, required=False)
    t0 = time.perf_counter()
    try:
        rec, eps, wall = timed_reconstruct(H, eps, strict_cut=a.strict_cut, strict_error=a.strict_error, **_caps(a))
    except IncompleteCover as exc:
        if a.metrics:
            _append_metrics(a.metrics, metrics_row(H, None, eps or 0, time.perf_counter() - t0))
        print(f"incomplete cover: {len(exc.uncovered)} vertices left unclaimed", file=sys.stderr)
        return EXIT_MODEL
    _write_text(a.output, rec.to_json())
    m = H.num_edges
    row = metrics_row(H, rec, eps, wall)
    if a.metrics:
        _append_metrics(a.metrics, row)
    applies = rec.bound_applies(m)
    print(f"epsilon={eps} error_delta={rec.error_delta} error_ratio={row['error_ratio']} "
          f"bound={'ok' if rec.within_bound(m) else 'exceeded'}{'' if applies else ' (not applicable)'}",
          file=sys.stderr)
    return EXIT_OK


def cmd_color(a) -> int:
    H, doc = load_graph(a.input)
    eps = _epsilon(a.epsilon, doc)
    if a.k is not None:
        if a.k > a.k_cap:
            raise CapExceeded(f"k={a.k} exceeds the cap {a.k_cap}")
        colors = color_with_k_core_components(H, eps, a.k, **_caps(a))
    else:
        colors = full_3_coloring(H, eps, **_caps(a))
    if not oracles.is_proper_coloring(H, colors):
        raise AssertionError("produced coloring is not proper")
    _write_text(a.output, json.dumps({"n": H.n, "epsilon": str(eps), "colors": colors}))
    return EXIT_OK


def cmd_reduce(a) -> int:
    G3, _ = load_graph(a.input)
    if a.mode == "plain":
        inst = hardness.plain_instance(G3)
        looseness = None
    else:
        eps = _epsilon(a.epsilon)
        looseness = hardness.C_LOOSE * eps
        inst = hardness.make_equality_instance(G3, looseness)
    red = hardness.tensor_reduction(inst)
    to_stdout = a.output in (None, "-")
    with contextlib.nullcontext(sys.stdout) if to_stdout else open(a.output, "w") as fh:
        write_dimacs(red.graph, fh, comment=f"tensorcolor reduce mode={a.mode}")
    if a.sidecar:
        side = {
            "mode": a.mode,
            "epsilon": None if a.epsilon is None else str(as_fraction(a.epsilon)),
            "looseness": None if looseness is None else str(looseness),
            "base_n": G3.n,
            "encoding": "vertex (v, x) -> 27*v + 9*x1 + 3*x2 + x3, x in {0,1,2}^3",
            "instance": inst.to_dict(),
        }
        _write_text(a.sidecar, json.dumps(side))
    return EXIT_OK


def verify_reconstruction(H: Graph, d: dict) -> list[tuple[str, bool]]:
    rec = reconstruction_from_dict(d)
    seen: list[int] = []
    for cf in rec.components:
        seen.extend(cf.U)
    union = frozenset().union(*(cf.h_tilde for cf in rec.components)) if rec.components else frozenset()
    delta = symmetric_difference(H.edge_set(), rec.h_tilde)
    m = H.num_edges
    checks = [
        ("components partition V(H)", sorted(seen) == list(range(H.n))),
        ("each color class meets each triple once",
         all(sorted(cf.color_map[v] for v in t) == [0, 1, 2] for cf in rec.components for t in cf.triples())),
        ("h_tilde equals the union of component tensors", union == rec.h_tilde),
        ("h_tilde equals K3 x global G~", rec.implied_edges() == rec.h_tilde),
        ("stored error_delta matches", delta == rec.error_delta),
    ]
    if rec.bound_applies(m):
        checks.append(("error within 550*epsilon*|E(H)|", delta <= 550 * rec.epsilon_used * m))
    return checks


def cmd_verify(a) -> int:
    H, _ = load_graph(a.instance)
    d = json.loads(_read_text(a.input))
    if "colors" in d:
        checks = [("coloring has one color per vertex", len(d["colors"]) == H.n),
                  ("coloring is proper", oracles.is_proper_coloring(H, d["colors"]))]
    else:
        checks = verify_reconstruction(H, d)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_VERIFY


def _parse_family(text: str) -> tuple[str, dict]:
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        k, _, v = item.partition("=")
        params[k.strip()] = v.strip()
    if kind not in KINDS:
        raise InvalidParams(f"unknown family {kind!r}")
    return kind, params


def bench_cell(cell: tuple) -> dict:
    family, eps, seed, strategy, caps = cell
    kind, params = _parse_family(family)
    G = gen_base_graph(kind, seed=seed, **params)
    inst = make_instance(G, eps, strategy, seed=seed)
    H = inst.H
    t0 = time.perf_counter()
    status = "ok"
    try:
        rec = main_reconstruct(H, eps, **caps)
    except IncompleteCover:
        rec, status = None, "incomplete"
    except CapExceeded:
        rec, status = None, "cap"
    row = metrics_row(H, rec, eps, time.perf_counter() - t0)
    within = "" if rec is None else ("yes" if rec.within_bound(H.num_edges) else "no")
    applies = "yes" if eps * H.num_edges >= H.n else "no"
    row.update({"family": family, "seed": seed, "strategy": strategy, "status": status,
                "bound_applies": applies, "within_bound": within})
    return row


def threads() -> int:
    try:
        return max(1, int(os.environ.get("TENSORCOLOR_THREADS", "1")))
    except ValueError:
        raise InvalidParams("TENSORCOLOR_THREADS must be an integer") from None


def cmd_bench(a) -> int:
    eps_values = [as_fraction(e) for e in a.epsilons.split(",")]
    cells = [(fam, eps, seed, a.strategy, _caps(a)) for fam in a.family for eps in eps_values for seed in a.seeds]
    for fam in a.family:
        _parse_family(fam)
    workers = min(threads(), len(cells)) or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(bench_cell, cells))  # map keeps grid order
    else:
        rows = [bench_cell(c) for c in cells]
    buf = io.StringIO()
    write_metrics(buf, rows)
    _write_text(a.output, buf.getvalue())
    return EXIT_OK


def cmd_oracle(a) -> int:
    if a.op == "color":
        H, _ = load_graph(a.input)
        print(json.dumps({"colors": oracles.brute_force_3coloring(H, cap=a.cap)}))
    elif a.op == "bottleneck":
        rows = json.loads(_read_text(a.input))
        W = WeightedBipartite.from_rows(rows)
        brute = oracles.brute_force_bottleneck(W, cap=a.cap)
        fast = bottleneck_matching(W)
        print(json.dumps({"brute_force": str(brute), "bottleneck": str(fast.objective),
                          "pairing": list(fast.pairing)}))
    elif a.op == "disjunction":
        G, _ = load_graph(a.input)
        print(oracles.disjunction(G, *a.vertices[:3]))
    elif a.op == "confusable":
        G, _ = load_graph(a.input)
        print(json.dumps(oracles.confusable(G, a.vertices[0], a.vertices[1], _epsilon(a.epsilon))))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_caps(p) -> None:
    p.add_argument("--triangle-cap", type=int, default=DEFAULT_TRIANGLE_CAP)
    p.add_argument("--component-cap", type=int, default=DEFAULT_COMPONENT_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorcolor", description=__doc__)
    parser.add_argument("--config", help="JSON run config; its options become defaults")
    parser.add_argument("--dump-config", help="write the resolved run config here and continue")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen", help="generate a labelled instance")
    p.add_argument("--g-type", choices=KINDS, default="regular")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--beta")
    p.add_argument("--epsilon", default="0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    p.add_argument("--shuffle-seed", type=int)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--dimacs", help="also write H (ground truth stripped) as DIMACS")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reconstruct", help="factor H as K3 x G~")
    p.add_argument("input", nargs="?")
    p.add_argument("--epsilon", help="omit to search a grid of epsilon values")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--metrics", help="append a CSV metrics row here")
    p.add_argument("--strict-cut", action="store_true", help="reject components on cut >= bound")
    p.add_argument("--strict-error", action="store_true", help="use 260*eps*|E(H[U])| in the final check")
    _add_caps(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("color", help="3-color H")
    p.add_argument("input", nargs="?")
    p.add_argument("--epsilon")
    p.add_argument("--k", type=int, help="glue up to k components")
    p.add_argument("--k-cap", type=int, default=K_CAP)
    p.add_argument("-o", "--output", default="-")
    _add_caps(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("reduce", help="3-coloring instance -> near-tensor graph")
    p.add_argument("input", nargs="?")
    p.add_argument("--epsilon")
    p.add_argument("--mode", choices=("with-clouds", "plain"), default="with-clouds")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--sidecar", help="JSON bookkeeping for clouds and coordinates")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="re-check a reconstruction or coloring file")
    p.add_argument("input", nargs="?", help="reconstruction or coloring JSON")
    p.add_argument("--instance", required=False, help="instance JSON or DIMACS for H")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="sweep families x epsilons, write CSV")
    p.add_argument("--family", action="append", default=None,
                   help="e.g. regular:n=50,d=10 (repeatable)")
    p.add_argument("--epsilons", default="0.005,0.01,0.02")
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    p.add_argument("-o", "--output", default="-")
    _add_caps(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="brute-force references")
    p.add_argument("op", nargs="?", choices=("color", "bottleneck", "disjunction", "confusable"))
    p.add_argument("input", nargs="?")
    p.add_argument("vertices", nargs="*", type=int)
    p.add_argument("--epsilon")
    p.add_argument("--cap", type=int, default=oracles.COLORING_CAP)
    p.set_defaults(func=cmd_oracle)
    return parser


def parse_config(argv) -> tuple[argparse.Namespace, RunConfig]:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        cfg = RunConfig.from_json(Path(pre.config).read_text())
        if pre.command is None:
            argv = [*argv, cfg.command]
        parser = build_parser()
        sub = parser._subparsers._group_actions[0].choices[cfg.command]
        sub.set_defaults(**cfg.options)
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.error("a subcommand is required")
    return ns, RunConfig.from_namespace(ns)


def _validate(ns) -> None:
    if ns.command in ("reconstruct", "color", "reduce", "verify") and ns.input is None:
        raise InvalidParams(f"{ns.command} needs an input file")
    if ns.command == "verify" and ns.instance is None:
        raise InvalidParams("verify needs --instance")
    if ns.command == "bench" and not ns.family:
        ns.family = ["regular:n=30,d=8", "odd-cycle:n=7"]
    if ns.command == "oracle" and (ns.op is None or ns.input is None):
        raise InvalidParams("oracle needs an operation and an input")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns, cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.dump_config:
            Path(ns.dump_config).write_text(cfg.to_json())
        _validate(ns)
        return ns.func(ns)
    except IncompleteCover as exc:
        print(f"incomplete cover: {len(exc.uncovered)} vertices left unclaimed", file=sys.stderr)
        return EXIT_MODEL
    except Fail as exc:
        print(f"FAIL ({exc.stage}): {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NotNearTensor as exc:
        print(f"not near a tensor: {exc}", file=sys.stderr)
        return EXIT_NOT_NEAR
    except (CapExceeded, SizeCap) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (TensorColorError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
