"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 size-limit
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    AllZeroError,
    ConfigError,
    DegenerateColumnError,
    DomainError,
    FormatError,
    InvariantError,
    MissingBlockError,
    NonFiniteError,
    TooLargeError,
    UndefinedRowError,
)
from .graph import CausalOrder, d_top, load_edge_csv
from .harness import (
    DEFAULT_EPSILON,
    ExperimentConfig,
    build_dataset,
    emit_results,
    expand_grid,
    iter_experiment,
    load_dataset,
    run_bound_sweep,
    run_experiment,
    save_bound_csv,
    save_dataset,
)
from .scm import standardize
from .scoring import ScoreParams
from .solver import SolverConfig, intersort
from .stats import distance_matrix, save_distance_csv, suggest_epsilon

_CONFIG_ERRORS = (ConfigError, DomainError, ValueError)
_DATA_ERRORS = (
    FormatError,
    MissingBlockError,
    InvariantError,
    NonFiniteError,
    DegenerateColumnError,
    AllZeroError,
    UndefinedRowError,
    OSError,
)


def _add_setting_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", choices=("linear", "rff", "nn"), default="linear")
    p.add_argument("--d", type=int, default=10, help="number of variables")
    p.add_argument("--graph-model", choices=("erdos_renyi", "barabasi_albert"),
                   default="erdos_renyi")
    p.add_argument("--edges-per-var", type=float, default=2.0)
    p.add_argument("--p-e", type=float, default=None,
                   help="edge probability override (otherwise edges-per-var / d)")
    p.add_argument("--ratio", type=float, default=1.0,
                   help="fraction of variables targeted by an intervention")
    p.add_argument("--policy", choices=("random", "most_children", "fewest_children"),
                   default="random")
    p.add_argument("--n-obs", type=int, default=5000)
    p.add_argument("--n-int", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalorder",
        description="Infer causal variable orderings from interventional data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a dataset directory")
    _add_setting_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("distances", help="compute the marginal-shift matrix")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True,
                   help="standardize by observational moments unless already done")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("intersort", help="infer a causal order from a dataset")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--domain", choices=tuple(DEFAULT_EPSILON), default="linear",
                   help="selects the default epsilon when --epsilon is absent")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--k", type=int, default=1, help="local-search neighborhood depth")
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out", default=None, help="result JSON path (default: stdout)")
    p.set_defaults(func=cmd_intersort)

    p = sub.add_parser("evaluate", help="misordered-edge count of an order vs a graph")
    p.add_argument("--graph", required=True, help="edge-list CSV (src,dst, 1-based)")
    p.add_argument("--d", type=int, required=True, help="number of variables")
    p.add_argument("--order", required=True,
                   help="JSON file with an 'order' list of 1-based ranks")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bounds", help="bound sweep with Monte Carlo comparison")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p-int", type=float, nargs="+", required=True)
    p.add_argument("--p-e", type=float, nargs="+", required=True,
                   help="edge probabilities (attachment counts for barabasi_albert)")
    p.add_argument("--graph-model", choices=("erdos_renyi", "barabasi_albert"),
                   default="erdos_renyi")
    p.add_argument("--graphs", type=int, default=20)
    p.add_argument("--draws", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--exact", action="store_true",
                   help="force exhaustive search (errors above the size limit)")
    p.add_argument("--no-refine", action="store_true",
                   help="greedy init only, skip the local search")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run a simulation grid end to end")
    _add_setting_flags(p)
    p.add_argument("--config", default=None,
                   help="JSON config; list-valued axes expand to a grid")
    p.add_argument("--seeds", type=int, nargs="+", default=None)
    p.add_argument("--seed", type=int, default=None, help="shorthand for a single seed")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig(
        domain=args.domain,
        d=args.d,
        ratio=args.ratio,
        seeds=(args.seed,),
        graph_model=args.graph_model,
        edges_per_var=args.edges_per_var,
        p_e=args.p_e,
        n_obs=args.n_obs,
        n_int=args.n_int,
        policy=args.policy,
        standardize_data=args.standardize,
    )
    ds = build_dataset(cfg, args.seed)
    save_dataset(ds, args.out_dir)
    print(f"wrote dataset ({ds.d} variables, {len(ds.targets)} targets) to {args.out_dir}")
    return 0


def _load_and_prepare(path: str, do_standardize: bool):
    ds = load_dataset(path)
    if do_standardize and not ds.standardized:
        ds = standardize(ds)
    return ds


def cmd_distances(args) -> int:
    ds = _load_and_prepare(args.data, args.standardize)
    dm = distance_matrix(ds)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_distance_csv(dm, out / "distances.csv", out / "distances_meta.json")
    print(f"wrote {out / 'distances.csv'}")
    try:
        print(f"suggested epsilon: {suggest_epsilon(dm):.6g}")
    except AllZeroError:
        pass
    return 0


def cmd_intersort(args) -> int:
    ds = _load_and_prepare(args.data, args.standardize)
    epsilon = DEFAULT_EPSILON[args.domain] if args.epsilon is None else args.epsilon
    cfg = SolverConfig(ScoreParams(epsilon, args.c), k=args.k)
    result = intersort(ds, cfg)
    record = json.dumps(result.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(record + "\n")
        print(f"wrote {args.out}")
    else:
        print(record)
    return 0


def cmd_evaluate(args) -> int:
    graph = load_edge_csv(args.graph, args.d)
    try:
        payload = json.loads(Path(args.order).read_text())
        ranks = [int(r) - 1 for r in payload["order"]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"{args.order}: expected JSON with an 'order' list") from exc
    order = CausalOrder(ranks)
    print(json.dumps({"d_top": d_top(graph, order), "num_edges": graph.num_edges}))
    return 0


def cmd_bounds(args) -> int:
    rows = run_bound_sweep(
        d=args.d,
        p_int_values=args.p_int,
        p_e_values=args.p_e,
        n_graphs=args.graphs,
        n_draws=args.draws,
        epsilon=args.epsilon,
        c=args.c,
        graph_model=args.graph_model,
        include_exact=True if args.exact else None,
        refine=not args.no_refine,
        seed=args.seed,
        jobs=args.jobs,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_bound_csv(rows, out / "bounds.csv")
    print(f"wrote {out / 'bounds.csv'} ({len(rows)} settings)")
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(config, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        configs = expand_grid(config)
    else:
        seeds = args.seeds if args.seeds else ([args.seed] if args.seed is not None else [0])
        configs = [
            ExperimentConfig(
                domain=args.domain,
                d=args.d,
                ratio=args.ratio,
                seeds=tuple(seeds),
                graph_model=args.graph_model,
                edges_per_var=args.edges_per_var,
                p_e=args.p_e,
                n_obs=args.n_obs,
                n_int=args.n_int,
                epsilon=args.epsilon,
                c=args.c,
                policy=args.policy,
                exact=args.exact,
            )
        ]
    records = []
    try:
        for cfg in configs:
            if args.jobs > 1:
                records.extend(run_experiment(cfg, jobs=args.jobs))
            else:
                for rec in iter_experiment(cfg):
                    records.append(rec)
    finally:
        # Flush whatever completed even if a later seed failed.
        if records:
            csv_path, json_path = emit_results(records, args.out_dir)
            print(f"wrote {csv_path} and {json_path} ({len(records)} records)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
