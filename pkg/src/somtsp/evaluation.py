"""Tour length and F1 scoring of predicted tour edges against a reference tour.

Tours are compared as undirected edge sets (the sparse form of a symmetric
0/1 adjacency matrix), so reversing or rotating a tour never changes its
score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .instance import Instance
from .som import Route

Edge = tuple[int, int]


class EvaluationError(ValueError):
    """Route/instance mismatch or malformed edge data."""


@dataclass(frozen=True)
class F1Report:
    precision: float
    recall: float
    f1: float
    true_positive_edges: int
    predicted_edges: int
    reference_edges: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "true_positive_edges": self.true_positive_edges,
            "predicted_edges": self.predicted_edges,
            "reference_edges": self.reference_edges,
        }


def _as_route(route: Route | Sequence[int]) -> Route:
    return route if isinstance(route, Route) else Route(tuple(route))


def route_length(route: Route | Sequence[int], instance: Instance) -> float:
    """Euclidean length of the closed tour, including the edge back to the start."""
    r = _as_route(route)
    if len(r) != instance.n:
        raise EvaluationError(f"route covers {len(r)} cities but the instance has {instance.n}")
    pts = instance.coords[list(r.order)]
    seg = pts - np.roll(pts, -1, axis=0)
    return float(np.sqrt(np.einsum("ij,ij->i", seg, seg)).sum())


def edges_of_route(route: Route | Sequence[int]) -> frozenset[Edge]:
    """Undirected edge set of the cyclic route.

    n >= 3 gives the n cyclic edges, n = 2 a single edge (no multi-edge for
    the out-and-back tour), n = 1 the empty set.
    """
    r = _as_route(route)
    n = len(r)
    if n == 1:
        return frozenset()
    if n == 2:
        a, b = r.order
        return frozenset({(min(a, b), max(a, b))})
    edges = set()
    for i in range(n):
        a, b = r.order[i], r.order[(i + 1) % n]
        edges.add((min(a, b), max(a, b)))
    return frozenset(edges)


def canonical_edges(edges: Iterable[Edge]) -> frozenset[Edge]:
    """Normalize arbitrary index pairs into a canonical undirected edge set."""
    out = set()
    for e in edges:
        a, b = int(e[0]), int(e[1])
        if a == b:
            raise EvaluationError(f"self-loop edge ({a}, {b}) is not allowed")
        out.add((min(a, b), max(a, b)))
    return frozenset(out)


def f1_score(predicted: Iterable[Edge], reference: Iterable[Edge]) -> F1Report:
    """Precision/recall/F1 of a predicted edge set against a reference edge set.

    An empty predicted (reference) set yields precision (recall) 0; F1 is 0
    whenever precision + recall is 0.
    """
    p = canonical_edges(predicted)
    r = canonical_edges(reference)
    tp = len(p & r)
    precision = tp / len(p) if p else 0.0
    recall = tp / len(r) if r else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return F1Report(precision, recall, f1, tp, len(p), len(r))


def dense_adjacency(edges: Iterable[Edge], n: int) -> np.ndarray:
    """Edge set as a symmetric n x n 0/1 matrix with zero diagonal."""
    mat = np.zeros((n, n), dtype=np.int8)
    for a, b in canonical_edges(edges):
        if not (0 <= a < n and 0 <= b < n):
            raise EvaluationError(f"edge ({a}, {b}) outside city range 0..{n - 1}")
        mat[a, b] = 1
        mat[b, a] = 1
    return mat


def adjacency_csv(edges: Iterable[Edge], n: int) -> str:
    """Dense adjacency matrix rendered row-major as CSV."""
    mat = dense_adjacency(edges, n)
    return "\n".join(",".join(str(v) for v in row) for row in mat) + "\n"
