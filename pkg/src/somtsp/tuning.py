"""Hyperparameter sweep harness.

A sweep plan lists solver configurations (typically each varying one field of
a shared base), an instance set with attached reference tours, and the metric
to aggregate. Every row runs the plain solver on every instance; the harness
reports per-row means and flags the best row.
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .enhancements import run_single
from .evaluation import edges_of_route, f1_score
from .instance import Instance, InstanceFormat, read_instance
from .oracle import ReferenceTour
from .som import Route, SolverConfig


class PlanError(ValueError):
    """Malformed sweep plan."""


class SweepError(RuntimeError):
    """A sweep cell failed; the message identifies the (row, instance) cell."""


class Metric(enum.Enum):
    MEAN_F1 = "mean_f1"
    MEAN_LENGTH = "mean_length"


@dataclass(frozen=True)
class SweepPlan:
    base: SolverConfig
    rows: tuple[SolverConfig, ...]
    cases: tuple[tuple[Instance, Route], ...]
    metric: Metric

    def __post_init__(self):
        if not self.rows:
            raise PlanError("a sweep plan needs at least one row")
        if not self.cases:
            raise PlanError("a sweep plan needs at least one instance")


@dataclass(frozen=True)
class SweepRow:
    config: SolverConfig
    mean: float
    per_instance: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    metric: Metric
    rows: tuple[SweepRow, ...]
    best_row: int


def _cell_metric(task: tuple[Instance, Route, SolverConfig, Metric]) -> float:
    instance, reference, config, metric = task
    outcome = run_single(instance, config)
    if metric is Metric.MEAN_F1:
        return f1_score(edges_of_route(outcome.route), edges_of_route(reference)).f1
    return outcome.length


def run_sweep(plan: SweepPlan, jobs: int = 1) -> SweepResult:
    """Evaluate every row over every instance and aggregate the metric mean.

    Means use exact (order-independent) summation, so shuffling the instance
    set never changes them. The best row is the argmax of mean F1 or the
    argmin of mean length; ties go to the lowest row index.
    """
    tasks = [
        (row_idx, case_idx, (inst, ref, cfg, plan.metric))
        for row_idx, cfg in enumerate(plan.rows)
        for case_idx, (inst, ref) in enumerate(plan.cases)
    ]
    values: dict[tuple[int, int], float] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(r, c, pool.submit(_cell_metric, t)) for r, c, t in tasks]
            for r, c, fut in futures:
                try:
                    values[(r, c)] = fut.result()
                except Exception as exc:
                    raise SweepError(
                        f"row {r} failed on instance '{plan.cases[c][0].id}': {exc}"
                    ) from exc
    else:
        for r, c, task in tasks:
            try:
                values[(r, c)] = _cell_metric(task)
            except Exception as exc:
                raise SweepError(
                    f"row {r} failed on instance '{plan.cases[c][0].id}': {exc}"
                ) from exc

    rows = []
    for r, cfg in enumerate(plan.rows):
        per_instance = tuple(values[(r, c)] for c in range(len(plan.cases)))
        rows.append(SweepRow(cfg, math.fsum(per_instance) / len(per_instance), per_instance))

    best = 0
    for r in range(1, len(rows)):
        if plan.metric is Metric.MEAN_F1:
            if rows[r].mean > rows[best].mean:
                best = r
        else:
            if rows[r].mean < rows[best].mean:
                best = r
    return SweepResult(plan.metric, tuple(rows), best)


# ---------------------------------------------------------------------------
# Rendering.
# ---------------------------------------------------------------------------

_HYPER_COLUMNS = (
    ("Number of Iterations", "iterations"),
    ("Discount Rate of Initial Neighborhood", "neighborhood_discount"),
    ("Learning Rate", "learning_rate"),
    ("Discount Rate of Learning Rate", "learning_rate_discount"),
    ("Population Size Multiplier Factor", "population_multiplier"),
)


def _metric_header(metric: Metric) -> str:
    return "Mean F1 Score" if metric is Metric.MEAN_F1 else "Mean Tour Length"


def render_table(result: SweepResult, fmt: str = "markdown") -> str:
    """Render one line per sweep row, in plan order, with the best row flagged.

    Floats are written in shortest round-trip form, so re-parsing a CSV table
    reproduces the computed means exactly.
    """
    headers = [h for h, _ in _HYPER_COLUMNS] + [_metric_header(result.metric), "Best"]
    table = []
    for i, row in enumerate(result.rows):
        cells = [repr(getattr(row.config, attr)) for _, attr in _HYPER_COLUMNS]
        cells.append(repr(row.mean))
        cells.append("*" if i == result.best_row else "")
        table.append(cells)

    if fmt == "csv":
        lines = [",".join(headers)]
        lines += [",".join(cells) for cells in table]
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = ["| " + " | ".join(headers) + " |"]
        lines.append("|" + "|".join(" --- " for _ in headers) + "|")
        lines += ["| " + " | ".join(cells) + " |" for cells in table]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format: {fmt!r} (expected 'markdown' or 'csv')")


def result_to_dict(result: SweepResult) -> dict:
    return {
        "metric": result.metric.value,
        "best_row": result.best_row,
        "rows": [
            {
                "config": row.config.to_dict(),
                "mean": row.mean,
                "per_instance": list(row.per_instance),
            }
            for row in result.rows
        ],
    }


# ---------------------------------------------------------------------------
# Plan files.
#
# JSON schema: {"base": {config fields}, "rows": [{field overrides}, ...],
# "instances": "dir", "metric": "mean_f1" | "mean_length"}. The instance
# directory holds *.csv / *.tsp files, each with a <stem>.ref.json reference
# tour produced by the oracle command.
# ---------------------------------------------------------------------------


def load_instance_dir(directory: Path) -> tuple[tuple[Instance, Route], ...]:
    """Load all instances in a directory together with their reference tours."""
    directory = Path(directory)
    if not directory.is_dir():
        raise PlanError(f"instance directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix in (".csv", ".tsp"))
    if not files:
        raise PlanError(f"no instance files (*.csv, *.tsp) in {directory}")
    cases = []
    for path in files:
        fmt = InstanceFormat.CSV if path.suffix == ".csv" else InstanceFormat.TSPLIB_EUC2D
        with open(path) as fh:
            inst = read_instance(fh, fmt, instance_id=path.stem)
        ref_path = path.with_suffix(".ref.json")
        if not ref_path.exists():
            raise PlanError(f"instance {path.name} has no reference tour ({ref_path.name})")
        ref = ReferenceTour.from_dict(json.loads(ref_path.read_text()))
        if len(ref.route) != inst.n:
            raise PlanError(
                f"reference tour for {path.name} covers {len(ref.route)} cities, instance has {inst.n}"
            )
        cases.append((inst, ref.route))
    return tuple(cases)


def load_plan(path: Path) -> SweepPlan:
    """Read a sweep plan file; relative instance paths resolve against the plan."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(f"plan file is not valid JSON: {exc}") from exc
    for key in ("base", "rows", "instances", "metric"):
        if key not in data:
            raise PlanError(f"plan file is missing {key!r}")

    base = SolverConfig.from_dict(data["base"])
    rows = []
    for i, overrides in enumerate(data["rows"]):
        if not isinstance(overrides, dict):
            raise PlanError(f"row {i} must be an object of field overrides")
        merged = base.to_dict()
        merged.update(overrides)
        try:
            rows.append(SolverConfig.from_dict(merged))
        except Exception as exc:
            raise PlanError(f"row {i} is invalid: {exc}") from exc

    inst_dir = Path(data["instances"])
    if not inst_dir.is_absolute():
        inst_dir = path.parent / inst_dir
    try:
        metric = Metric(data["metric"])
    except ValueError:
        raise PlanError(f"unknown metric: {data['metric']!r}") from None
    return SweepPlan(base, tuple(rows), load_instance_dir(inst_dir), metric)
