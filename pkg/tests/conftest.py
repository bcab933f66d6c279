import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from somtsp.instance import Instance, Point

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def make_instance(points, instance_id="test"):
    return Instance(instance_id, tuple(Point(x, y) for x, y in points))


@pytest.fixture
def square():
    """Unit-square corners in cyclic order 0-1-2-3."""
    return make_instance([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], "square")


def random_points(rng: np.random.Generator, n: int):
    return [(float(x), float(y)) for x, y in rng.random((n, 2))]
