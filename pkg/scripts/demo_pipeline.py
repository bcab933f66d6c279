#!/usr/bin/env python3
"""End-to-end demo on a throwaway workspace: generate a few instances,
compute references, run the enhanced solver, score it, and render frames.

Usage: python scripts/demo_pipeline.py [workdir]

Runs in under a minute; artifacts land in `workdir` (default ./demo_out).
"""

import json
import sys
from pathlib import Path

from somtsp.cli import main

N_CITIES = 30
N_INSTANCES = 3
ITERATIONS = 3000


def run(argv):
    print(f"$ somtsp {' '.join(argv)}")
    rc = main(argv)
    if rc != 0:
        sys.exit(rc)


def cli():
    workdir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
    inst_dir = workdir / "instances"
    run(
        [
            "generate",
            "--n", str(N_CITIES),
            "--count", str(N_INSTANCES),
            "--seed", "7",
            "--out", str(inst_dir),
        ]
    )

    for path in sorted(inst_dir.glob("*.csv")):
        ref = path.with_suffix(".ref.json")
        run(["oracle", "--instance", str(path), "--out", str(ref)])
        result = workdir / f"{path.stem}.result.json"
        run(
            [
                "solve",
                "--instance", str(path),
                "--enhanced",
                "--iterations", str(ITERATIONS),
                "--seed", "0",
                "--reference", str(ref),
                "--out", str(result),
            ]
        )
        record = json.loads(result.read_text())
        print(
            f"  -> best {record['best_length']:.4f} "
            f"(f1 vs {record['reference_oracle']} reference: {record['f1']['f1']:.3f})"
        )

    # a small single-factor sweep over the generated set
    plan = workdir / "plan.json"
    plan.write_text(
        json.dumps(
            {
                "base": {"iterations": ITERATIONS, "seed": 0},
                "rows": [
                    {"population_multiplier": 2},
                    {"population_multiplier": 6},
                    {"population_multiplier": 10},
                    {"learning_rate": 0.4},
                    {"iterations": ITERATIONS // 10},
                ],
                "instances": "instances",
                "metric": "mean_f1",
            },
            indent=2,
        )
    )
    run(["tune", "--plan", str(plan), "--out", str(workdir / "sweep.json")])

    # iteration frames for the first instance
    first = sorted(inst_dir.glob("*.csv"))[0]
    run(
        [
            "plot",
            "--instance", str(first),
            "--iterations", str(ITERATIONS),
            "--seed", "0",
            "--out", str(workdir / "frames"),
        ]
    )
    print(f"done; artifacts in {workdir}/")


if __name__ == "__main__":
    cli()
