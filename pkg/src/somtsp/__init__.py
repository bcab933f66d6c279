"""Elastic-ring SOM heuristic for 2-D Euclidean TSP instances."""

from .enhancements import (
    RunOutcome,
    enhanced_solve,
    multi_start_solve,
    population_sweep_solve,
    run_single,
)
from .evaluation import F1Report, edges_of_route, f1_score, route_length
from .instance import (
    AnchorStrategy,
    Instance,
    InstanceFormat,
    Point,
    centroid,
    generate_instance,
    read_instance,
    select_anchor,
    write_instance,
)
from .oracle import (
    OracleKind,
    ReferenceTour,
    best_reference,
    brute_force_optimal,
    held_karp,
    nearest_neighbor_route,
    two_opt_improve,
)
from .som import (
    NeuronRing,
    Route,
    SolverConfig,
    TrainState,
    extract_route,
    init_ring,
    neighborhood_weight,
    run_som,
    train_iteration,
    winner_index,
)
from .tuning import Metric, SweepPlan, SweepResult, load_plan, render_table, run_sweep

__version__ = "0.1.0"
