"""Elastic-ring SOM solver.

A cyclic population of neurons is pulled toward randomly sampled cities with
a Gaussian winner-take-most update; the neighborhood radius (measured in
neuron-index units along the ring) and the learning rate both decay
geometrically per iteration. Once training stops, cities are read off the
ring in neuron order to form a tour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .instance import AnchorStrategy, Instance, Point, anchor_index, select_anchor


class ConfigError(ValueError):
    """Solver configuration violates a parameter range."""


class RingCorruptionError(RuntimeError):
    """A neuron position became NaN/inf during training; the run must abort."""


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of one solver run.

    Defaults are the tuned baseline: 100,000 iterations, neighborhood
    discount 0.9997, learning rate 0.8 with discount 0.99997, and 6 neurons
    per city. `radius_floor` / `lr_floor` stop training early once the decayed
    quantities are numerically inert; set them to 0 to disable.
    """

    iterations: int = 100_000
    neighborhood_discount: float = 0.9997
    learning_rate: float = 0.8
    learning_rate_discount: float = 0.99997
    population_multiplier: int = 6
    seed: int = 0
    anchor_strategy: AnchorStrategy = AnchorStrategy.RANDOM
    radius_floor: float = 1.0
    lr_floor: float = 1e-3

    def __post_init__(self):
        if not (isinstance(self.iterations, int) and self.iterations >= 1):
            raise ConfigError(f"iterations must be a positive integer, got {self.iterations!r}")
        for name in ("neighborhood_discount", "learning_rate", "learning_rate_discount"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 < float(v) <= 1.0):
                raise ConfigError(f"{name} must lie in (0, 1], got {v!r}")
        if not (isinstance(self.population_multiplier, int) and self.population_multiplier >= 1):
            raise ConfigError(
                f"population_multiplier must be a positive integer, got {self.population_multiplier!r}"
            )
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.anchor_strategy, AnchorStrategy):
            raise ConfigError(f"anchor_strategy must be an AnchorStrategy, got {self.anchor_strategy!r}")
        for name in ("radius_floor", "lr_floor"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and float(v) >= 0.0 and math.isfinite(float(v))):
                raise ConfigError(f"{name} must be a finite non-negative number, got {v!r}")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "neighborhood_discount": self.neighborhood_discount,
            "learning_rate": self.learning_rate,
            "learning_rate_discount": self.learning_rate_discount,
            "population_multiplier": self.population_multiplier,
            "seed": self.seed,
            "anchor_strategy": self.anchor_strategy.value,
            "radius_floor": self.radius_floor,
            "lr_floor": self.lr_floor,
        }

    @staticmethod
    def from_dict(data: dict) -> "SolverConfig":
        known = {
            "iterations",
            "neighborhood_discount",
            "learning_rate",
            "learning_rate_discount",
            "population_multiplier",
            "seed",
            "anchor_strategy",
            "radius_floor",
            "lr_floor",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "anchor_strategy" in kwargs and not isinstance(kwargs["anchor_strategy"], AnchorStrategy):
            try:
                kwargs["anchor_strategy"] = AnchorStrategy(kwargs["anchor_strategy"])
            except ValueError:
                raise ConfigError(f"unknown anchor strategy: {kwargs['anchor_strategy']!r}") from None
        return SolverConfig(**kwargs)


@dataclass(eq=False)
class NeuronRing:
    """Cyclic sequence of neuron positions, stored as an (m, 2) float64 array."""

    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2 or self.positions.shape[0] < 1:
            raise ValueError(f"ring positions must have shape (m, 2), got {self.positions.shape}")
        if not np.isfinite(self.positions).all():
            raise ValueError("ring positions must be finite")

    @property
    def m(self) -> int:
        return self.positions.shape[0]

    def copy(self) -> "NeuronRing":
        return NeuronRing(self.positions.copy())


@dataclass
class Route:
    """A Hamiltonian cycle as a permutation of city indices, read cyclically."""

    order: tuple[int, ...]

    def __post_init__(self):
        self.order = tuple(int(i) for i in self.order)
        n = len(self.order)
        if n < 1:
            raise ValueError("a route needs at least one city")
        if sorted(self.order) != list(range(n)):
            raise ValueError(f"route is not a permutation of 0..{n - 1}: {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def __hash__(self):
        return hash(self.order)


@dataclass
class TrainState:
    """Mutable per-run quantities: the ring plus the two decaying scalars.

    `anchor` is the city sampled at step 0 (also the ring's initial center).
    """

    ring: NeuronRing
    radius: float
    lr: float
    step: int
    anchor: int


class SomRun(NamedTuple):
    route: Route
    state: TrainState
    snapshots: list[tuple[int, np.ndarray]]


def init_ring(instance: Instance, config: SolverConfig, anchor: int | None = None) -> NeuronRing:
    """Place m = multiplier * n neurons evenly on a circle around the anchor city.

    The circle radius is a tenth of the city bounding-box diagonal, so the
    initial ring is small relative to the instance but already cyclic.
    """
    if anchor is None:
        anchor = select_anchor(instance, config.anchor_strategy, config.seed)
    coords = instance.coords
    m = config.population_multiplier * instance.n
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    circle_r = 0.1 * float(np.hypot(hi[0] - lo[0], hi[1] - lo[1]))
    center = coords[anchor]
    theta = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    positions = np.stack(
        [center[0] + circle_r * np.cos(theta), center[1] + circle_r * np.sin(theta)], axis=1
    )
    return NeuronRing(positions)


def initial_state(instance: Instance, config: SolverConfig, rng: np.random.Generator | None = None) -> TrainState:
    """Build the step-0 training state.

    When `rng` is given, a Random anchor consumes one draw from it, so the
    anchor pick and the subsequent training samples share a single stream.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    anchor = anchor_index(instance, config.anchor_strategy, rng)
    ring = init_ring(instance, config, anchor=anchor)
    return TrainState(ring=ring, radius=ring.m / 10.0, lr=config.learning_rate, step=0, anchor=anchor)


def winner_index(ring: NeuronRing, city: Point | np.ndarray) -> int:
    """Index of the neuron nearest to the city; distance ties go to the lowest index."""
    if isinstance(city, Point):
        city = np.array([city.x, city.y])
    diff = ring.positions - city
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def neighborhood_weight(ring_size: int, winner: int, j: int, radius: float) -> float:
    """Gaussian pull strength exp(-d^2 / (2 r^2)) at circular ring distance d."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not (0 <= winner < ring_size and 0 <= j < ring_size):
        raise ValueError(f"indices must lie in [0, {ring_size}), got {winner}, {j}")
    d = abs(winner - j)
    d = min(d, ring_size - d)
    return math.exp(-(d * d) / (2.0 * radius * radius))


def train_iteration(
    state: TrainState, instance: Instance, config: SolverConfig, rng: np.random.Generator
) -> TrainState:
    """One training step, mutating `state` in place (and returning it).

    Samples a city (the anchor at step 0, uniform afterwards), then moves every
    neuron toward it by lr * exp(-d^2 / (2 radius^2)) of the gap, where d is
    the circular ring distance to the winning neuron. Afterwards the radius and
    learning rate are multiplied by their discounts and the step advances.
    """
    n = instance.n
    if state.step == 0:
        city_idx = state.anchor
    else:
        city_idx = int(rng.integers(n))
    city = instance.coords[city_idx]

    pos = state.ring.positions
    diff = city - pos
    winner = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))

    m = pos.shape[0]
    ring_d = np.abs(np.arange(m) - winner)
    np.minimum(ring_d, m - ring_d, out=ring_d)
    gauss = np.exp((ring_d * ring_d) / (-2.0 * state.radius * state.radius))
    with np.errstate(invalid="ignore", over="ignore"):  # checked right below
        pos += (state.lr * gauss)[:, None] * diff

    if not np.isfinite(pos).all():
        raise RingCorruptionError(f"non-finite neuron position after step {state.step}")

    state.radius *= config.neighborhood_discount
    state.lr *= config.learning_rate_discount
    state.step += 1
    return state


def extract_route(ring: NeuronRing, instance: Instance) -> Route:
    """Read a tour off the ring.

    Each city is assigned to its nearest neuron (ties to the lowest neuron
    index); sorting cities by (assigned neuron, city index) yields the cyclic
    visiting order. This is a valid permutation even when neurons are shared.
    """
    coords = instance.coords
    diff = coords[:, None, :] - ring.positions[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    assigned = np.argmin(d2, axis=1)
    order = np.lexsort((np.arange(instance.n), assigned))
    return Route(tuple(int(i) for i in order))


def run_som(
    instance: Instance,
    config: SolverConfig,
    snapshot_steps: Iterable[int] | None = None,
) -> SomRun:
    """Train the ring on an instance and extract the resulting tour.

    Training runs until `config.iterations` steps or until the radius or
    learning rate falls below its floor. Deterministic given (instance,
    config).

    `snapshot_steps` requests copies of the ring after the given step counts
    (0 = the initial ring). Steps beyond the executed range collapse to one
    snapshot of the final ring, so a converged frame is always available.
    """
    wanted: set[int] = set()
    if snapshot_steps is not None:
        wanted = {int(s) for s in snapshot_steps}
        if any(s < 0 for s in wanted):
            raise ValueError("snapshot steps must be non-negative")

    rng = np.random.default_rng(config.seed)
    state = initial_state(instance, config, rng)
    snapshots: list[tuple[int, np.ndarray]] = []
    if 0 in wanted:
        snapshots.append((0, state.ring.positions.copy()))

    while (
        state.step < config.iterations
        and state.radius >= config.radius_floor
        and state.lr >= config.lr_floor
    ):
        train_iteration(state, instance, config, rng)
        if state.step in wanted:
            snapshots.append((state.step, state.ring.positions.copy()))

    if wanted and any(s > state.step for s in wanted) and (not snapshots or snapshots[-1][0] != state.step):
        snapshots.append((state.step, state.ring.positions.copy()))

    return SomRun(extract_route(state.ring, instance), state, snapshots)
