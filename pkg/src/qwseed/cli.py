"""Command-line entry point.

Subcommands: sample, stconn, iso, spectrum, bfs, campaign. Exit status is 0 on
success, 2 on bad input and 3 when a size cap is hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from qwseed.constants import load_constants
from qwseed.errors import CapacityError, InputError
from qwseed.experiments import (
    ALGORITHMS,
    ExperimentPlan,
    FamilySpec,
    THEORY,
    emit_comparison_table,
    fit_scaling,
    rows_to_csv,
    rows_to_json,
    run_plan,
)
from qwseed.graph import Graph, QueryLedger, build_family, load_edge_list
from qwseed.iso import LabeledGraph, decide_isomorphic
from qwseed.sampler import (
    SamplerConfig,
    component_info,
    folklore_sample,
    seeded_sample,
    seeded_sample_with_degree_bound,
    walk_for,
)
from qwseed.seed import bfs_edge_search
from qwseed.spectral import analyze
from qwseed.stconn import decide_st

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY = 0, 2, 3


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--graph", metavar="FILE", help="edge-list file")
        src.add_argument("--family", metavar="KIND", help="cycle, complete, path, star, petersen, random_regular")
        p.add_argument("--size", type=int, help="family size parameter n")
        p.add_argument("--degree", type=int, default=3, help="degree for random_regular (default 3)")
        p.add_argument("--graph-seed", type=int, default=7, help="seed for random_regular (default 7)")
    p.add_argument("--gamma", type=float, help="gap lower bound; default is the exact gap")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--mode", choices=("circuit", "oracle"), default="oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--constants", metavar="PATH", help="JSON constants table overriding the defaults")


def _load_graph(args) -> Graph:
    if args.graph:
        try:
            text = Path(args.graph).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.graph}: {exc}") from exc
        return load_edge_list(text)
    kind = args.family
    if kind == "petersen":
        return build_family(kind)
    if args.size is None:
        raise InputError(f"--size is required for family {kind}")
    if kind == "random_regular":
        return build_family(kind, args.size, args.degree, args.graph_seed)
    return build_family(kind, args.size)


def _graph_name(args) -> str:
    if args.graph:
        return args.graph
    return args.family if args.size is None else f"{args.family}({args.size})"


def _config(args, g: Graph, start: int) -> SamplerConfig:
    constants = load_constants(args.constants)
    gamma = args.gamma if args.gamma is not None else min(1.0, component_info(g, start).spectral_gap)
    if gamma <= 0:
        raise InputError("the component of the start node has zero spectral gap (bipartite)")
    return SamplerConfig(
        gamma=gamma, epsilon=args.epsilon, mode=args.mode, rng_seed=args.seed,
        degree_bound=args.degree_bound, constants=constants,
    )  # fmt: skip


def _emit(args, record: dict) -> None:
    if args.format == "csv":
        keys = list(record)
        text = ",".join(keys) + "\n" + ",".join("" if record[k] is None else str(record[k]) for k in keys) + "\n"
    else:
        text = json.dumps(record, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args) -> int:
    g = _load_graph(args)
    cfg = _config(args, g, args.start)
    if args.algorithm == "folklore":
        res = folklore_sample(g, args.start, cfg)
    elif cfg.degree_bound is not None:
        res = seeded_sample_with_degree_bound(g, args.start, cfg)
    else:
        res = seeded_sample(g, args.start, cfg)
    record = res.to_json(_graph_name(args), cfg)
    if res.classical_query_equivalent is not None:
        record["classical_query_equivalent"] = res.classical_query_equivalent
    _emit(args, record)
    return EXIT_OK


def cmd_stconn(args) -> int:
    g = _load_graph(args)
    cfg = _config(args, g, args.s)
    gamma = args.gamma
    if gamma is None:
        gamma = min(cfg.gamma, component_info(g, args.t).spectral_gap)
    res = decide_st(g, args.s, args.t, gamma, args.epsilon, cfg)
    _emit(args, res.to_json(_graph_name(args), cfg))
    return EXIT_OK


def _read_small(path: str) -> LabeledGraph:
    try:
        return LabeledGraph.from_graph(load_edge_list(Path(path).read_text()))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def cmd_iso(args) -> int:
    g1, g2 = _read_small(args.g1), _read_small(args.g2)
    constants = load_constants(args.constants)
    cfg = SamplerConfig(gamma=args.gamma or 1.0, epsilon=args.epsilon, mode=args.mode, rng_seed=args.seed, constants=constants)
    ledger = QueryLedger()
    res = decide_isomorphic(g1, g2, args.gamma, args.epsilon, cfg, ledger, degree_shortcut=args.degree_shortcut)
    record = {"g1": args.g1, "g2": args.g2, "decision": res.decision, **res.ledger.as_dict()}
    if res.samples is not None:
        a, b = res.samples
        record.update(orbit_sizes=[a.orbit_size, b.orbit_size], gamma=a.gamma, fidelities=[a.fidelity, b.fidelity])
    if res.record is not None:
        record.update(swap_repetitions=res.record.repetitions, swap_ones=res.record.ones_observed)
    _emit(args, record)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = _load_graph(args)
    rep = analyze(g)
    record = {
        "graph": _graph_name(args),
        "n": g.n,
        "m": g.m,
        "spectral_gap": rep.spectral_gap,
        "is_bipartite": rep.is_bipartite,
        "components": rep.n_components,
        "eigenvalues": rep.eigenvalues.tolist(),
    }
    w = walk_for(g, load_constants(args.constants))
    if w.dim <= w.constants.dense_cap and rep.n_components == 1:
        record["phase_gap"] = w.spectrum.phase_gap
    _emit(args, record)
    return EXIT_OK


def cmd_bfs(args) -> int:
    g = _load_graph(args)
    ledger = QueryLedger()
    seed = bfs_edge_search(g, ledger, args.start, args.M)
    record = {
        "graph": _graph_name(args),
        "start": args.start,
        "M": args.M,
        "nodes": seed.nodes,
        "edges": [list(e) for e in seed.edges],
        "total_degree": seed.total_degree,
        "exhausted": seed.exhausted,
        **ledger.as_dict(),
    }
    _emit(args, record)
    return EXIT_OK


def cmd_campaign(args) -> int:
    try:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    except ValueError as exc:
        raise InputError(f"bad --sizes {args.sizes!r}") from exc
    algorithms = tuple(a for a in args.algorithms.split(",") if a)
    gamma: str | float = args.gamma_policy
    if args.gamma is not None:
        gamma = args.gamma
    plan = ExperimentPlan(
        family=FamilySpec(args.family, sizes, args.degree, args.graph_seed),
        seeds=tuple(range(args.seed, args.seed + args.seeds)),
        algorithms=algorithms,
        gamma=gamma,
        epsilon=args.epsilon,
        mode=args.mode,
        stream_pe=args.stream_pe,
        constants=load_constants(args.constants),
        workers=args.workers,
    )
    rows = run_plan(plan)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows, plan)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if len(sizes) >= 4 and not args.no_fit:
        size_metric = THEORY.get(args.family, ("m", {}))[0]
        fits = fit_scaling(rows, size_metric=size_metric)
        sys.stderr.write(emit_comparison_table(fits, args.family))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwseed", description="Seeded quantum-walk sampling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one quantum sample of the stationary edge state")
    _common(p)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--algorithm", choices=("seeded", "folklore"), default="seeded")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stconn", help="decide whether s and t are connected")
    _common(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_stconn)

    p = sub.add_parser("iso", help="decide whether two small graphs are isomorphic")
    _common(p, graph=False)
    p.add_argument("--g1", required=True, metavar="FILE")
    p.add_argument("--g2", required=True, metavar="FILE")
    p.add_argument("--degree-shortcut", action="store_true", help="reject on differing degree sequences")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("spectrum", help="spectral report of a graph and its walk")
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bfs", help="run the breadth-first edge search")
    _common(p)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=cmd_bfs)

    p = sub.add_parser("campaign", help="run a scaling campaign over a graph family")
    _common(p, graph=False)
    p.add_argument("--family", required=True, help="cycle, complete, random_regular or orbit")
    p.add_argument("--sizes", required=True, help="comma-separated, strictly increasing")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--graph-seed", type=int, default=7)
    p.add_argument("--seeds", type=int, default=10, help="number of rng seeds per size, counted from --seed")
    p.add_argument("--algorithms", default="seeded,folklore", help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--gamma-policy", choices=("true", "family-min"), default="true")
    p.add_argument("--stream-pe", action="store_true", help="stream circuit-mode phase estimation past the cap")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-fit", action="store_true")
    p.set_defaults(func=cmd_campaign, format="csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        sys.stderr.write(f"capacity error: {exc}\n")
        return EXIT_CAPACITY
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
