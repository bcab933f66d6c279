#!/usr/bin/env python3
"""Desk-scale single-factor tuning experiment.

Builds an instance set with 2-opt references, then sweeps each hyperparameter
around the tuned baseline (one factor at a time) and prints the ranked table.
With the defaults this takes a few minutes; scale --instances / --iterations
up for tighter means.

Usage: python scripts/sweep_experiment.py [--instances K] [--n N]
                                          [--iterations I] [--out DIR]
"""

import argparse
from pathlib import Path

from somtsp.cli import main as cli_main
from somtsp.tuning import load_plan, render_table, result_to_dict, run_sweep
from somtsp.fileio import atomic_write_json, atomic_write_text


def build_rows(iterations):
    """One row per varied factor, echoing a hand-picked single-factor design."""
    return [
        {},  # the baseline itself
        {"iterations": max(1, iterations // 100)},
        {"neighborhood_discount": 0.997},
        {"neighborhood_discount": 0.99997},
        {"learning_rate": 0.4},
        {"learning_rate_discount": 1.0},
        {"population_multiplier": 2},
        {"population_multiplier": 4},
        {"population_multiplier": 8},
        {"population_multiplier": 16},
    ]


def cli():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=8)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--iterations", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="sweep_out")
    args = ap.parse_args()

    workdir = Path(args.out)
    inst_dir = workdir / "instances"
    rc = cli_main(
        [
            "generate",
            "--n", str(args.n),
            "--count", str(args.instances),
            "--seed", str(args.seed),
            "--out", str(inst_dir),
        ]
    )
    assert rc == 0
    for path in sorted(inst_dir.glob("*.csv")):
        rc = cli_main(
            ["oracle", "--instance", str(path), "--out", str(path.with_suffix(".ref.json"))]
        )
        assert rc == 0

    plan_path = workdir / "plan.json"
    atomic_write_json(
        plan_path,
        {
            "base": {"iterations": args.iterations, "seed": args.seed},
            "rows": build_rows(args.iterations),
            "instances": "instances",
            "metric": "mean_f1",
        },
    )
    result = run_sweep(load_plan(plan_path))
    atomic_write_json(workdir / "sweep.json", result_to_dict(result))
    table = render_table(result, "markdown")
    atomic_write_text(workdir / "table.md", table)
    print(table)
    print(f"best row: {result.best_row}; artifacts in {workdir}/")


if __name__ == "__main__":
    cli()
