"""Reference tour producers.

Exact solvers (exhaustive search, Held-Karp) cover small instances; a
deterministic first-improvement 2-opt from a nearest-neighbor start stands in
as the pseudo-optimal reference where exact solving is infeasible. Every
reference records which producer made it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import route_length
from .instance import Instance
from .som import Route

BRUTE_FORCE_MAX = 10
HELD_KARP_MAX = 18

_CHUNK = 40_320  # permutations scored per vectorized batch


class OracleSizeError(ValueError):
    """Instance too large for the requested exact solver."""


class OracleKind(enum.Enum):
    BRUTE_FORCE = "brute_force"
    HELD_KARP = "held_karp"
    TWO_OPT = "two_opt"


@dataclass(frozen=True)
class OracleOutcome:
    """A reference tour with its length and the producer that made it."""

    route: Route
    length: float
    kind: OracleKind


@dataclass(frozen=True)
class ReferenceTour:
    """Persistable reference solution for an instance."""

    instance_id: str
    kind: OracleKind
    route: Route
    length: float

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "oracle": self.kind.value,
            "route": list(self.route.order),
            "length": self.length,
        }

    @staticmethod
    def from_dict(data: dict) -> "ReferenceTour":
        try:
            return ReferenceTour(
                instance_id=data["instance_id"],
                kind=OracleKind(data["oracle"]),
                route=Route(tuple(data["route"])),
                length=float(data["length"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed reference tour: {exc}") from exc


def _distance_matrix(instance: Instance) -> np.ndarray:
    c = instance.coords
    diff = c[:, None, :] - c[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def brute_force_optimal(instance: Instance) -> OracleOutcome:
    """Exhaustively score all (n-1)!/2 distinct cycles and return the shortest.

    Length ties resolve to the lexicographically smallest route starting at
    city 0. Enumeration fixes city 0 first and keeps only the orientation with
    the smaller second city, which visits each cycle exactly once.
    """
    n = instance.n
    if n > BRUTE_FORCE_MAX:
        raise OracleSizeError(f"brute force is limited to n <= {BRUTE_FORCE_MAX}, got {n}")
    if n <= 3:
        route = Route(tuple(range(n)))
        return OracleOutcome(route, route_length(route, instance), OracleKind.BRUTE_FORCE)

    coords = instance.coords
    best_len = np.inf
    best_route: tuple[int, ...] | None = None
    perms = (p for p in itertools.permutations(range(1, n)) if p[0] < p[-1])
    while True:
        chunk = list(itertools.islice(perms, _CHUNK))
        if not chunk:
            break
        tails = np.asarray(chunk, dtype=np.int64)
        routes = np.concatenate([np.zeros((len(chunk), 1), dtype=np.int64), tails], axis=1)
        pts = coords[routes]
        seg = pts - np.roll(pts, -1, axis=1)
        lengths = np.sqrt(np.einsum("ijk,ijk->ij", seg, seg)).sum(axis=1)
        i = int(np.argmin(lengths))
        if lengths[i] < best_len:
            best_len = float(lengths[i])
            best_route = tuple(int(v) for v in routes[i])
    assert best_route is not None
    route = Route(best_route)
    return OracleOutcome(route, route_length(route, instance), OracleKind.BRUTE_FORCE)


def held_karp(instance: Instance) -> OracleOutcome:
    """Exact dynamic program over (visited subset, endpoint) states."""
    n = instance.n
    if n > HELD_KARP_MAX:
        raise OracleSizeError(f"Held-Karp is limited to n <= {HELD_KARP_MAX}, got {n}")
    if n <= 3:
        route = Route(tuple(range(n)))
        return OracleOutcome(route, route_length(route, instance), OracleKind.HELD_KARP)

    dist = _distance_matrix(instance)
    k = n - 1  # cities 1..n-1; city 0 is the fixed start
    full = (1 << k) - 1
    dp = np.full((full + 1, k), np.inf)
    parent = np.full((full + 1, k), -1, dtype=np.int8)
    for j in range(k):
        dp[1 << j, j] = dist[0, j + 1]

    for mask in range(1, full + 1):
        mm = mask
        while mm:
            low = mm & -mm
            mm ^= low
            j = low.bit_length() - 1
            prev = mask ^ low
            if prev == 0:
                continue
            cand = dp[prev] + dist[1:, j + 1]
            best = int(np.argmin(cand))
            dp[mask, j] = cand[best]
            parent[mask, j] = best

    closing = dp[full] + dist[1:, 0]
    j = int(np.argmin(closing))
    total = float(closing[j])

    chain = []
    mask = full
    while j >= 0:
        chain.append(j + 1)
        mask, j = mask ^ (1 << j), int(parent[mask, j])
    chain.reverse()
    route = Route((0, *chain))
    recomputed = route_length(route, instance)
    assert abs(recomputed - total) <= 1e-9 * max(1.0, total)
    return OracleOutcome(route, recomputed, OracleKind.HELD_KARP)


def nearest_neighbor_route(instance: Instance, start: int = 0) -> Route:
    """Greedy construction from `start`; distance ties go to the lowest index."""
    n = instance.n
    dist = _distance_matrix(instance)
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    current = start
    for _ in range(n - 1):
        d = dist[current].copy()
        d[visited] = np.inf
        current = int(np.argmin(d))
        visited[current] = True
        order.append(current)
    return Route(tuple(order))


def two_opt_improve(instance: Instance, start_route: Route | Sequence[int]) -> OracleOutcome:
    """First-improvement 2-opt with a fixed scan order.

    Repeatedly reverses the tour segment between two edges whenever that
    shortens the tour by more than 1e-12 (the margin guards against
    floating-point cycling), until a full pass finds no improving exchange.
    """
    route = start_route if isinstance(start_route, Route) else Route(tuple(start_route))
    if len(route) != instance.n:
        raise ValueError(f"route covers {len(route)} cities but the instance has {instance.n}")
    n = instance.n
    if n <= 3:
        return OracleOutcome(route, route_length(route, instance), OracleKind.TWO_OPT)

    dist = _distance_matrix(instance).tolist()
    order = list(route.order)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            a = order[i]
            b = order[i + 1]
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue  # same edge pair: reversing the whole tour is a no-op
                c = order[j]
                d = order[(j + 1) % n]
                delta = dist[a][c] + dist[b][d] - dist[a][b] - dist[c][d]
                if delta < -1e-12:
                    order[i + 1 : j + 1] = reversed(order[i + 1 : j + 1])
                    improved = True
                    b = order[i + 1]
    out = Route(tuple(order))
    return OracleOutcome(out, route_length(out, instance), OracleKind.TWO_OPT)


def best_reference(instance: Instance) -> ReferenceTour:
    """Layered default reference: exact where feasible, else 2-opt from nearest neighbor."""
    if instance.n <= HELD_KARP_MAX:
        out = held_karp(instance)
    else:
        out = two_opt_improve(instance, nearest_neighbor_route(instance))
    return ReferenceTour(instance.id, out.kind, out.route, out.length)
