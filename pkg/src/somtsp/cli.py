"""Command-line front end.

Subcommands: generate, solve, oracle, evaluate, tune, plot. Every command is
file based and deterministic given its inputs; outputs are written atomically.
Exit codes: 0 success, 1 usage/validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
import traceback
from pathlib import Path

from .enhancements import (
    STRATEGY_ORDER,
    SWEEP_MULTIPLIERS,
    GridCell,
    best_outcome,
    run_grid,
)
from .evaluation import EvaluationError, adjacency_csv, edges_of_route, f1_score
from .fileio import atomic_write_json, atomic_write_text
from .instance import (
    AnchorStrategy,
    Instance,
    InstanceFormat,
    generate_instance,
    read_instance,
    write_instance,
)
from .oracle import (
    HELD_KARP_MAX,
    ReferenceTour,
    best_reference,
    brute_force_optimal,
    held_karp,
    nearest_neighbor_route,
    two_opt_improve,
)
from .plot import render_frames
from .som import Route, SolverConfig, run_som
from .tuning import SweepError, load_plan, render_table, result_to_dict, run_sweep

_ANCHOR_CHOICES = {
    "random": AnchorStrategy.RANDOM,
    "centermost": AnchorStrategy.CENTERMOST,
    "furthest": AnchorStrategy.FURTHEST_FROM_CENTROID,
}

# every domain validation error derives from ValueError; SweepError wraps
# per-cell failures and file problems surface as OSError
_VALIDATION_ERRORS = (ValueError, OSError, SweepError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse calls this for unknown flags etc.
        raise UsageError(message)


def load_instance_file(path: Path) -> Instance:
    path = Path(path)
    fmt = InstanceFormat.TSPLIB_EUC2D if path.suffix == ".tsp" else InstanceFormat.CSV
    with open(path) as fh:
        return read_instance(fh, fmt, instance_id=path.stem)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("solver hyperparameters")
    g.add_argument("--iterations", type=int, help="number of training iterations")
    g.add_argument("--neighborhood-discount", type=float, help="per-iteration neighborhood radius multiplier")
    g.add_argument("--learning-rate", type=float, help="initial learning rate")
    g.add_argument("--learning-rate-discount", type=float, help="per-iteration learning rate multiplier")
    g.add_argument("--population-multiplier", type=int, help="neurons per city")
    g.add_argument("--seed", type=int, help="RNG seed (default 0)")
    g.add_argument("--anchor", choices=sorted(_ANCHOR_CHOICES), help="anchor city selection strategy")
    g.add_argument("--radius-floor", type=float, help="stop once the radius falls below this")
    g.add_argument("--lr-floor", type=float, help="stop once the learning rate falls below this")


def config_from_args(args: argparse.Namespace) -> SolverConfig:
    overrides = {}
    for field, attr in (
        ("iterations", "iterations"),
        ("neighborhood_discount", "neighborhood_discount"),
        ("learning_rate", "learning_rate"),
        ("learning_rate_discount", "learning_rate_discount"),
        ("population_multiplier", "population_multiplier"),
        ("seed", "seed"),
        ("radius_floor", "radius_floor"),
        ("lr_floor", "lr_floor"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "anchor", None) is not None:
        overrides["anchor_strategy"] = _ANCHOR_CHOICES[args.anchor]
    return SolverConfig(**overrides)


# ---------------------------------------------------------------------------
# solve: results records
# ---------------------------------------------------------------------------


def solve_record(
    instance: Instance,
    config: SolverConfig,
    mode: str,
    jobs: int = 1,
    reference: ReferenceTour | None = None,
) -> dict:
    """Run the requested solve mode and assemble the results record.

    Everything in the record except `timing_ms` is a pure function of
    (instance, config, mode), so a record can be replayed and compared.
    """
    t0 = time.perf_counter()
    if mode == "single":
        cells = run_grid(
            instance, config, (config.anchor_strategy,), (config.population_multiplier,), jobs
        )
    elif mode == "multi_start":
        cells = run_grid(instance, config, STRATEGY_ORDER, (config.population_multiplier,), jobs)
    elif mode == "pop_sweep":
        cells = run_grid(instance, config, (config.anchor_strategy,), SWEEP_MULTIPLIERS, jobs)
    elif mode == "enhanced":
        cells = run_grid(instance, config, STRATEGY_ORDER, SWEEP_MULTIPLIERS, jobs)
    else:
        raise ValueError(f"unknown solve mode: {mode!r}")
    best = best_outcome(cells)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0

    record = {
        "instance_id": instance.id,
        "mode": mode,
        "config": config.to_dict(),
        "runs": [_run_entry(cell) for cell in cells],
        "best_route": list(best.route.order),
        "best_length": best.length,
        "f1": None,
        "reference_oracle": None,
        "timing_ms": elapsed_ms,
    }
    if reference is not None:
        report = f1_score(edges_of_route(best.route), edges_of_route(reference.route))
        record["f1"] = report.to_dict()
        record["reference_oracle"] = reference.kind.value
    return record


def _run_entry(cell: GridCell) -> dict:
    return {
        "strategy": cell.strategy.value,
        "multiplier": cell.multiplier,
        "length": cell.outcome.length,
        "steps": cell.outcome.wall_steps,
    }


def replay_record(record: dict, instance: Instance) -> dict:
    """Re-execute a results record from its own config echo."""
    config = SolverConfig.from_dict(record["config"])
    return solve_record(instance, config, record["mode"])


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = InstanceFormat.CSV if args.format == "csv" else InstanceFormat.TSPLIB_EUC2D
    suffix = ".csv" if fmt is InstanceFormat.CSV else ".tsp"
    for i in range(args.count):
        inst = generate_instance(args.n, args.seed + i, args.bounds)
        buf = io.StringIO()
        write_instance(inst, buf, fmt)
        path = out_dir / f"{inst.id}{suffix}"
        atomic_write_text(path, buf.getvalue())
        print(path)
    return 0


def _cmd_solve(args) -> int:
    instance = load_instance_file(args.instance)
    config = config_from_args(args)
    if args.enhanced:
        mode = "enhanced"
    elif args.multi_start:
        mode = "multi_start"
    elif args.pop_sweep:
        mode = "pop_sweep"
    else:
        mode = "single"
    reference = None
    if args.reference:
        reference = ReferenceTour.from_dict(json.loads(Path(args.reference).read_text()))
    record = solve_record(instance, config, mode, jobs=args.jobs, reference=reference)
    atomic_write_json(Path(args.out), record)
    print(
        f"{instance.id}: mode={mode} best_length={record['best_length']:.6f} "
        f"runs={len(record['runs'])} -> {args.out}"
    )
    return 0


def _cmd_oracle(args) -> int:
    instance = load_instance_file(args.instance)
    if args.method == "auto":
        ref = best_reference(instance)
    elif args.method == "brute-force":
        out = brute_force_optimal(instance)
        ref = ReferenceTour(instance.id, out.kind, out.route, out.length)
    elif args.method == "held-karp":
        out = held_karp(instance)
        ref = ReferenceTour(instance.id, out.kind, out.route, out.length)
    else:  # two-opt
        out = two_opt_improve(instance, nearest_neighbor_route(instance))
        ref = ReferenceTour(instance.id, out.kind, out.route, out.length)
    atomic_write_json(Path(args.out), ref.to_dict())
    print(f"{instance.id}: oracle={ref.kind.value} length={ref.length:.6f} -> {args.out}")
    return 0


def _route_from_result_file(path: Path) -> tuple[Route, str]:
    data = json.loads(Path(path).read_text())
    if "best_route" in data:
        return Route(tuple(data["best_route"])), data.get("instance_id", "?")
    if "route" in data:
        return Route(tuple(data["route"])), data.get("instance_id", "?")
    raise ValueError(f"{path}: neither a results record nor a reference tour")


def _cmd_evaluate(args) -> int:
    predicted, pid = _route_from_result_file(Path(args.predicted))
    reference, rid = _route_from_result_file(Path(args.reference))
    if len(predicted) != len(reference):
        raise EvaluationError(
            f"predicted tour has {len(predicted)} cities, reference has {len(reference)}"
        )
    report = f1_score(edges_of_route(predicted), edges_of_route(reference))
    if args.adjacency_out:
        atomic_write_text(Path(args.adjacency_out), adjacency_csv(edges_of_route(predicted), len(predicted)))
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_tune(args) -> int:
    plan = load_plan(Path(args.plan))
    result = run_sweep(plan, jobs=args.jobs)
    atomic_write_json(Path(args.out), result_to_dict(result))
    table = render_table(result, args.format)
    if args.table:
        atomic_write_text(Path(args.table), table)
    else:
        print(table, end="")
    print(f"best row: {result.best_row} -> {args.out}", file=sys.stderr)
    return 0


def _default_snapshot_steps(iterations: int) -> list[int]:
    # Progression echoing how the ring unfolds: start, 1%, 5%, 25%, final.
    steps = {0, iterations // 100, iterations // 20, iterations // 4, iterations}
    return sorted(steps)


def _cmd_plot(args) -> int:
    instance = load_instance_file(args.instance)
    config = config_from_args(args)
    if args.steps:
        try:
            steps = sorted({int(s) for s in args.steps.split(",")})
        except ValueError:
            raise UsageError(f"--steps expects comma-separated integers, got {args.steps!r}") from None
    else:
        steps = _default_snapshot_steps(config.iterations)
    result = run_som(instance, config, snapshot_steps=steps)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in render_frames(result.snapshots, instance, out_dir):
        print(path)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="somtsp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate uniform random instances")
    p.add_argument("--n", type=int, required=True, help="cities per instance")
    p.add_argument("--count", type=int, default=1, help="number of instances")
    p.add_argument("--seed", type=int, default=0, help="seed of the first instance; instance i uses seed+i")
    p.add_argument("--bounds", type=float, default=1.0, help="square side length")
    p.add_argument("--format", choices=("csv", "tsplib"), default="csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="solve an instance with the SOM")
    p.add_argument("--instance", required=True, help="instance file (.csv or .tsp)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--multi-start", action="store_true", help="best of three anchor strategies")
    mode.add_argument("--pop-sweep", action="store_true", help="best over population multipliers 1..20")
    mode.add_argument("--enhanced", action="store_true", help="best over the full 3x20 cross product")
    p.add_argument("--reference", help="reference tour JSON for F1 scoring")
    p.add_argument("--jobs", type=int, default=1, help="parallel solver runs")
    p.add_argument("--out", required=True, help="results record JSON path")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="compute a reference tour")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--method",
        choices=("auto", "brute-force", "held-karp", "two-opt"),
        default="auto",
        help=f"auto = exact up to n={HELD_KARP_MAX}, else 2-opt from nearest neighbor",
    )
    p.add_argument("--out", required=True, help="reference tour JSON path")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("evaluate", help="F1 of predicted tour edges vs a reference")
    p.add_argument("--predicted", required=True, help="results record or reference tour JSON")
    p.add_argument("--reference", required=True, help="reference tour JSON")
    p.add_argument("--adjacency-out", help="also dump the predicted dense adjacency matrix CSV")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("tune", help="run a sweep plan and render the results table")
    p.add_argument("--plan", required=True, help="sweep plan JSON")
    p.add_argument("--out", required=True, help="sweep result JSON path")
    p.add_argument("--table", help="write the rendered table here instead of stdout")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("plot", help="render SVG snapshots of the ring during training")
    p.add_argument("--instance", required=True)
    p.add_argument("--steps", help="comma-separated snapshot steps (default: 0,1%%,5%%,25%%,100%% of iterations)")
    p.add_argument("--out", required=True, help="output directory for SVG frames")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
