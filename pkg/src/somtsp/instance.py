"""Euclidean TSP instances: generation, anchors, and CSV/TSPLIB persistence."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import IO

import numpy as np


class InstanceError(ValueError):
    """Invalid instance data or generation parameters."""


class ParseError(InstanceError):
    """Malformed instance file. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFormatError(InstanceError):
    """Instance file uses a feature outside the supported subset."""


class AnchorStrategy(enum.Enum):
    """How the starting city of a solver run is chosen."""

    RANDOM = "random"
    CENTERMOST = "centermost"
    FURTHEST_FROM_CENTROID = "furthest_from_centroid"


class InstanceFormat(enum.Enum):
    CSV = "csv"
    TSPLIB_EUC2D = "tsplib"


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InstanceError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Instance:
    """An ordered set of 2-D cities; the position in `cities` is the city index."""

    id: str
    cities: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "cities", tuple(self.cities))
        if len(self.cities) < 1:
            raise InstanceError("an instance needs at least one city")

    @property
    def n(self) -> int:
        return len(self.cities)

    @cached_property
    def coords(self) -> np.ndarray:
        """City coordinates as a read-only (n, 2) float64 array."""
        arr = np.array([(p.x, p.y) for p in self.cities], dtype=np.float64)
        arr.flags.writeable = False
        return arr


def generate_instance(n: int, seed: int, bounds: float = 1.0) -> Instance:
    """Draw n cities i.i.d. uniform over the [0, bounds] square.

    Identical (n, seed, bounds) always produce an identical instance.
    """
    if n < 1:
        raise InstanceError(f"city count must be >= 1, got {n}")
    if not (bounds > 0):
        raise InstanceError(f"bounds must be positive, got {bounds}")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2)) * bounds
    tag = f"uniform-n{n}-seed{seed}" + ("" if bounds == 1.0 else f"-b{bounds:g}")
    return Instance(tag, tuple(Point(x, y) for x, y in pts))


def centroid(instance: Instance) -> Point:
    c = instance.coords.mean(axis=0)
    return Point(float(c[0]), float(c[1]))


def select_anchor(instance: Instance, strategy: AnchorStrategy, seed: int) -> int:
    """Pick the anchor city index for a solver run.

    Centermost/furthest are measured against the centroid; distance ties go to
    the lowest city index. Random is a uniform draw from `seed`.
    """
    rng = np.random.default_rng(seed)
    return anchor_index(instance, strategy, rng)


def anchor_index(instance: Instance, strategy: AnchorStrategy, rng: np.random.Generator) -> int:
    """Like select_anchor, but consuming draws from an existing generator."""
    if strategy is AnchorStrategy.RANDOM:
        return int(rng.integers(instance.n))
    c = instance.coords.mean(axis=0)
    d = np.linalg.norm(instance.coords - c, axis=1)
    if strategy is AnchorStrategy.CENTERMOST:
        return int(np.argmin(d))
    if strategy is AnchorStrategy.FURTHEST_FROM_CENTROID:
        return int(np.argmax(d))
    raise InstanceError(f"unknown anchor strategy: {strategy!r}")


# ---------------------------------------------------------------------------
# Persistence.
#
# CSV: one `x,y` line per city, no header; the line order is the city index.
# TSPLIB: the EUC_2D subset only -- NAME / TYPE / DIMENSION / EDGE_WEIGHT_TYPE
# headers, then NODE_COORD_SECTION with 1-based `i x y` lines, optionally
# terminated by an EOF token.
# ---------------------------------------------------------------------------


def read_instance(stream: IO[str], fmt: InstanceFormat, instance_id: str = "instance") -> Instance:
    """Parse an instance from a text stream.

    `instance_id` is used for formats that carry no name of their own (CSV,
    or TSPLIB files without a NAME key).
    """
    if fmt is InstanceFormat.CSV:
        return _read_csv(stream, instance_id)
    if fmt is InstanceFormat.TSPLIB_EUC2D:
        return _read_tsplib(stream, instance_id)
    raise InstanceError(f"unknown instance format: {fmt!r}")


def write_instance(instance: Instance, stream: IO[str], fmt: InstanceFormat) -> None:
    """Serialize an instance; coordinates are written in shortest round-trip form."""
    if fmt is InstanceFormat.CSV:
        for p in instance.cities:
            stream.write(f"{p.x!r},{p.y!r}\n")
    elif fmt is InstanceFormat.TSPLIB_EUC2D:
        stream.write(f"NAME: {instance.id}\n")
        stream.write("TYPE: TSP\n")
        stream.write(f"DIMENSION: {instance.n}\n")
        stream.write("EDGE_WEIGHT_TYPE: EUC_2D\n")
        stream.write("NODE_COORD_SECTION\n")
        for i, p in enumerate(instance.cities, start=1):
            stream.write(f"{i} {p.x!r} {p.y!r}\n")
        stream.write("EOF\n")
    else:
        raise InstanceError(f"unknown instance format: {fmt!r}")


def _parse_coord(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric coordinate {token!r}", line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite coordinate {token!r}", line_no)
    return value


def _read_csv(stream: IO[str], instance_id: str) -> Instance:
    points = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y', got {line!r}", line_no)
        points.append(Point(_parse_coord(parts[0].strip(), line_no), _parse_coord(parts[1].strip(), line_no)))
    if not points:
        raise ParseError("no cities found")
    return Instance(instance_id, tuple(points))


def _read_tsplib(stream: IO[str], instance_id: str) -> Instance:
    header: dict[str, str] = {}
    lines = list(stream)
    i = 0
    in_coords = False
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line == "NODE_COORD_SECTION":
            in_coords = True
            break
        if ":" not in line:
            raise ParseError(f"malformed header line {line!r}", i)
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()
    if not in_coords:
        raise ParseError("missing NODE_COORD_SECTION")

    if header.get("TYPE", "TSP") != "TSP":
        raise UnsupportedFormatError(f"unsupported TYPE: {header['TYPE']}")
    ewt = header.get("EDGE_WEIGHT_TYPE")
    if ewt is None:
        raise ParseError("missing EDGE_WEIGHT_TYPE header")
    if ewt != "EUC_2D":
        raise UnsupportedFormatError(f"unsupported EDGE_WEIGHT_TYPE: {ewt}")
    if "DIMENSION" not in header:
        raise ParseError("missing DIMENSION header")
    try:
        dim = int(header["DIMENSION"])
    except ValueError:
        raise ParseError(f"DIMENSION is not an integer: {header['DIMENSION']!r}") from None
    if dim < 1:
        raise ParseError(f"DIMENSION must be >= 1, got {dim}")

    by_index: dict[int, Point] = {}
    while i < len(lines):
        line = lines[i].strip()
        line_no = i + 1
        i += 1
        if not line:
            continue
        if line == "EOF":
            break
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected '<index> <x> <y>', got {line!r}", line_no)
        try:
            node = int(parts[0])
        except ValueError:
            raise ParseError(f"non-integer node index {parts[0]!r}", line_no) from None
        if node in by_index:
            raise ParseError(f"duplicate node index {node}", line_no)
        if not (1 <= node <= dim):
            raise ParseError(f"node index {node} outside 1..{dim}", line_no)
        by_index[node] = Point(_parse_coord(parts[1], line_no), _parse_coord(parts[2], line_no))

    if len(by_index) != dim:
        raise ParseError(f"expected {dim} coordinate lines, found {len(by_index)}")
    cities = tuple(by_index[k] for k in range(1, dim + 1))
    return Instance(header.get("NAME", instance_id), cities)
