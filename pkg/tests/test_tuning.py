import json
import math
from dataclasses import replace

import pytest

import somtsp.tuning as tuning_mod
from somtsp.enhancements import run_single
from somtsp.evaluation import edges_of_route, f1_score
from somtsp.instance import InstanceFormat, generate_instance, write_instance
from somtsp.oracle import best_reference
from somtsp.som import SolverConfig
from somtsp.tuning import (
    Metric,
    PlanError,
    SweepError,
    SweepPlan,
    load_plan,
    render_table,
    result_to_dict,
    run_sweep,
)

BASE = SolverConfig(iterations=200, seed=3)


def small_cases(count=3, n=7):
    cases = []
    for i in range(count):
        inst = generate_instance(n, seed=100 + i)
        cases.append((inst, best_reference(inst).route))
    return tuple(cases)


class TestRunSweep:
    def test_predicted_equals_reference_gives_one(self):
        inst = generate_instance(6, seed=0)
        # use the solver's own tour as the reference: a perfect prediction
        ref = run_single(inst, BASE).route
        plan = SweepPlan(BASE, (BASE,), ((inst, ref),), Metric.MEAN_F1)
        result = run_sweep(plan)
        assert result.rows[0].mean == 1.0
        assert result.best_row == 0

    def test_identical_rows_tie_to_first(self):
        plan = SweepPlan(BASE, (BASE, BASE), small_cases(2), Metric.MEAN_F1)
        result = run_sweep(plan)
        assert result.rows[0].mean == result.rows[1].mean
        assert result.best_row == 0

    def test_matches_manual_re_execution(self):
        cases = small_cases(5, n=8)
        rows = (
            BASE,
            replace(BASE, population_multiplier=3),
            replace(BASE, iterations=400),
        )
        plan = SweepPlan(BASE, rows, cases, Metric.MEAN_F1)
        result = run_sweep(plan)
        for cfg, row in zip(rows, result.rows):
            scores = []
            for inst, ref in cases:
                out = run_single(inst, cfg)
                scores.append(f1_score(edges_of_route(out.route), edges_of_route(ref)).f1)
            assert row.per_instance == tuple(scores)
            assert row.mean == math.fsum(scores) / len(scores)
        best = max(range(len(rows)), key=lambda i: (result.rows[i].mean, -i))
        assert result.best_row == best

    def test_mean_length_metric_minimizes(self):
        cases = small_cases(2)
        rows = (BASE, replace(BASE, population_multiplier=8))
        plan = SweepPlan(BASE, rows, cases, Metric.MEAN_LENGTH)
        result = run_sweep(plan)
        means = [r.mean for r in result.rows]
        assert result.best_row == means.index(min(means))
        for row, cfg in zip(result.rows, rows):
            want = [run_single(inst, cfg).length for inst, _ in cases]
            assert row.per_instance == tuple(want)

    def test_row_permutation_permutes_results(self):
        cases = small_cases(3)
        rows = (BASE, replace(BASE, population_multiplier=2), replace(BASE, iterations=350))
        a = run_sweep(SweepPlan(BASE, rows, cases, Metric.MEAN_F1))
        perm = (2, 0, 1)
        b = run_sweep(SweepPlan(BASE, tuple(rows[i] for i in perm), cases, Metric.MEAN_F1))
        for new_idx, old_idx in enumerate(perm):
            assert b.rows[new_idx].mean == a.rows[old_idx].mean
            assert b.rows[new_idx].per_instance == a.rows[old_idx].per_instance
        assert perm[b.best_row] == a.best_row or b.rows[b.best_row].mean == a.rows[a.best_row].mean

    def test_instance_order_invariant_means(self):
        cases = small_cases(4)
        plan_fwd = SweepPlan(BASE, (BASE,), cases, Metric.MEAN_F1)
        plan_rev = SweepPlan(BASE, (BASE,), tuple(reversed(cases)), Metric.MEAN_F1)
        assert run_sweep(plan_fwd).rows[0].mean == run_sweep(plan_rev).rows[0].mean

    def test_failing_cell_identifies_row_and_instance(self, monkeypatch):
        cases = small_cases(2)

        def exploding(task):
            inst, ref, cfg, metric = task
            if inst.id == cases[1][0].id and cfg.population_multiplier == 4:
                raise RuntimeError("cell failure")
            return 0.0

        monkeypatch.setattr(tuning_mod, "_cell_metric", exploding)
        rows = (BASE, replace(BASE, population_multiplier=4))
        with pytest.raises(SweepError) as exc:
            run_sweep(SweepPlan(BASE, rows, cases, Metric.MEAN_F1))
        msg = str(exc.value)
        assert "row 1" in msg
        assert cases[1][0].id in msg

    def test_empty_plan_rejected(self):
        with pytest.raises(PlanError):
            SweepPlan(BASE, (), small_cases(1), Metric.MEAN_F1)
        with pytest.raises(PlanError):
            SweepPlan(BASE, (BASE,), (), Metric.MEAN_F1)


class TestRenderTable:
    @pytest.fixture
    def result(self):
        plan = SweepPlan(
            BASE,
            (BASE, replace(BASE, population_multiplier=2)),
            small_cases(2),
            Metric.MEAN_F1,
        )
        return run_sweep(plan)

    def test_markdown_structure(self, result):
        text = render_table(result, "markdown")
        lines = text.strip().split("\n")
        assert len(lines) == 2 + len(result.rows)
        assert "Number of Iterations" in lines[0]
        assert "Mean F1 Score" in lines[0]
        flagged = [i for i, line in enumerate(lines[2:]) if line.rstrip().endswith("* |")]
        assert flagged == [result.best_row]

    def test_csv_round_trip_and_flag(self, result):
        text = render_table(result, "csv")
        lines = text.strip().split("\n")
        header = lines[0].split(",")
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == len(result.rows)
        metric_col = header.index("Mean F1 Score")
        parsed_means = [float(r[metric_col]) for r in rows]
        for parsed, row in zip(parsed_means, result.rows):
            assert parsed == row.mean  # repr round-trip is exact
        best_col = header.index("Best")
        flags = [r[best_col] for r in rows]
        assert flags.count("*") == 1
        assert flags.index("*") == parsed_means.index(max(parsed_means))

    def test_unknown_format(self, result):
        with pytest.raises(ValueError):
            render_table(result, "html")


class TestPlanLoading:
    def _write_instance_dir(self, directory, count=2, n=6):
        directory.mkdir(parents=True, exist_ok=True)
        for i in range(count):
            inst = generate_instance(n, seed=200 + i)
            path = directory / f"case{i}.csv"
            with open(path, "w") as fh:
                write_instance(inst, fh, InstanceFormat.CSV)
            ref = best_reference(inst)
            (directory / f"case{i}.ref.json").write_text(json.dumps(ref.to_dict()))

    def test_load_and_run(self, tmp_path):
        self._write_instance_dir(tmp_path / "instances")
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(
            json.dumps(
                {
                    "base": {"iterations": 150, "seed": 1},
                    "rows": [{}, {"population_multiplier": 2}],
                    "instances": "instances",
                    "metric": "mean_f1",
                }
            )
        )
        plan = load_plan(plan_file)
        assert len(plan.rows) == 2
        assert plan.rows[1].population_multiplier == 2
        assert plan.rows[0].iterations == 150
        result = run_sweep(plan)
        assert len(result.rows) == 2
        # result JSON is serializable
        json.dumps(result_to_dict(result))

    def test_missing_reference_rejected(self, tmp_path):
        d = tmp_path / "instances"
        self._write_instance_dir(d, count=1)
        (d / "case0.ref.json").unlink()
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(
            json.dumps({"base": {}, "rows": [{}], "instances": "instances", "metric": "mean_f1"})
        )
        with pytest.raises(PlanError):
            load_plan(plan_file)

    def test_unknown_metric_rejected(self, tmp_path):
        self._write_instance_dir(tmp_path / "instances", count=1)
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(
            json.dumps({"base": {}, "rows": [{}], "instances": "instances", "metric": "accuracy"})
        )
        with pytest.raises(PlanError):
            load_plan(plan_file)

    def test_bad_row_override_rejected(self, tmp_path):
        self._write_instance_dir(tmp_path / "instances", count=1)
        plan_file = tmp_path / "plan.json"
        plan_file.write_text(
            json.dumps(
                {"base": {}, "rows": [{"warp": 9}], "instances": "instances", "metric": "mean_f1"}
            )
        )
        with pytest.raises(PlanError):
            load_plan(plan_file)
