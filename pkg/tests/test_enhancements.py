from dataclasses import replace

import pytest

import somtsp.enhancements as enh
from somtsp.enhancements import (
    STRATEGY_ORDER,
    SWEEP_MULTIPLIERS,
    SweepRunError,
    best_outcome,
    enhanced_solve,
    multi_start_solve,
    population_sweep_solve,
    run_grid,
    run_single,
)
from somtsp.evaluation import route_length
from somtsp.instance import AnchorStrategy, generate_instance
from somtsp.som import SolverConfig

from conftest import make_instance

BASE = SolverConfig(iterations=300, seed=5)


class TestRunSingle:
    def test_length_matches_route(self):
        inst = generate_instance(9, seed=1)
        out = run_single(inst, BASE)
        assert out.length == pytest.approx(route_length(out.route, inst), abs=1e-9)
        assert out.config_used == BASE
        assert out.wall_steps <= BASE.iterations


class TestMultiStart:
    def test_single_city(self):
        inst = make_instance([(0.5, 0.5)])
        out = multi_start_solve(inst, BASE)
        assert out.length == 0.0
        assert out.route.order == (0,)

    def test_never_worse_than_random_alone(self):
        inst = generate_instance(12, seed=3)
        random_only = run_single(inst, replace(BASE, anchor_strategy=AnchorStrategy.RANDOM))
        out = multi_start_solve(inst, BASE)
        assert out.length <= random_only.length

    def test_equals_min_of_three_independent_runs(self):
        inst = generate_instance(10, seed=7)
        lengths = {
            s: run_single(inst, replace(BASE, anchor_strategy=s)).length for s in STRATEGY_ORDER
        }
        out = multi_start_solve(inst, BASE)
        assert out.length == min(lengths.values())
        # identical seed and hyperparameters in every member
        assert out.config_used.seed == BASE.seed
        assert out.config_used.population_multiplier == BASE.population_multiplier

    def test_tie_breaks_in_strategy_order(self):
        inst = make_instance([(0.5, 0.5)])  # every run has length 0
        out = multi_start_solve(inst, BASE)
        assert out.config_used.anchor_strategy is AnchorStrategy.RANDOM


class TestPopulationSweep:
    def test_single_city(self):
        inst = make_instance([(0.1, 0.2)])
        out = population_sweep_solve(inst, BASE)
        assert out.route.order == (0,)
        assert out.config_used.population_multiplier == 1  # tie -> lowest multiplier

    def test_never_worse_than_baseline_multiplier(self):
        inst = generate_instance(10, seed=2)
        baseline = run_single(inst, BASE)
        out = population_sweep_solve(inst, BASE)
        assert out.length <= baseline.length

    def test_equals_min_over_twenty_independent_runs(self):
        inst = generate_instance(8, seed=11)
        lengths = [
            run_single(inst, replace(BASE, population_multiplier=k)).length
            for k in SWEEP_MULTIPLIERS
        ]
        out = population_sweep_solve(inst, BASE)
        assert out.length == min(lengths)
        assert out.config_used.anchor_strategy is BASE.anchor_strategy


class TestEnhanced:
    def test_single_city(self):
        inst = make_instance([(0.9, 0.9)])
        out = enhanced_solve(inst, BASE)
        assert out.route.order == (0,)
        assert out.length == 0.0

    def test_dominates_both_sweeps(self):
        inst = generate_instance(10, seed=4)
        out = enhanced_solve(inst, BASE)
        assert out.length <= multi_start_solve(inst, BASE).length
        assert out.length <= population_sweep_solve(inst, BASE).length

    def test_equals_min_over_sixty_independent_runs(self):
        inst = generate_instance(10, seed=9)
        lengths = [
            run_single(
                inst, replace(BASE, anchor_strategy=s, population_multiplier=k)
            ).length
            for s in STRATEGY_ORDER
            for k in SWEEP_MULTIPLIERS
        ]
        out = enhanced_solve(inst, BASE)
        assert out.length == min(lengths)

    def test_deterministic(self):
        inst = generate_instance(9, seed=13)
        a = enhanced_solve(inst, BASE)
        b = enhanced_solve(inst, BASE)
        assert a.route.order == b.route.order
        assert a.length == b.length


class TestRunGrid:
    def test_grid_order(self):
        inst = generate_instance(5, seed=0)
        cells = run_grid(inst, BASE, STRATEGY_ORDER, (1, 2), jobs=1)
        assert [(c.strategy, c.multiplier) for c in cells] == [
            (s, k) for s in STRATEGY_ORDER for k in (1, 2)
        ]

    def test_parallel_output_matches_sequential(self):
        inst = generate_instance(6, seed=1)
        seq = run_grid(inst, BASE, STRATEGY_ORDER, (1, 3), jobs=1)
        par = run_grid(inst, BASE, STRATEGY_ORDER, (1, 3), jobs=2)
        assert [(c.strategy, c.multiplier, c.outcome.length, c.outcome.route.order) for c in seq] == [
            (c.strategy, c.multiplier, c.outcome.length, c.outcome.route.order) for c in par
        ]

    def test_failure_is_annotated(self, monkeypatch):
        inst = generate_instance(5, seed=0)

        real = enh.run_som

        def exploding(instance, config, snapshot_steps=None):
            if (
                config.population_multiplier == 2
                and config.anchor_strategy is AnchorStrategy.CENTERMOST
            ):
                raise RuntimeError("boom")
            return real(instance, config, snapshot_steps)

        monkeypatch.setattr(enh, "run_som", exploding)
        with pytest.raises(SweepRunError) as exc:
            run_grid(inst, BASE, STRATEGY_ORDER, (1, 2), jobs=1)
        assert exc.value.strategy is AnchorStrategy.CENTERMOST
        assert exc.value.multiplier == 2
        assert isinstance(exc.value.__cause__, RuntimeError)

    def test_best_outcome_rejects_empty(self):
        with pytest.raises(ValueError):
            best_outcome([])
