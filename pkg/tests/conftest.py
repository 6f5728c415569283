import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ccpoincare.grid import GridSpec
from ccpoincare.space import DiscreteSpace

settings.register_profile("ci", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def line64():
    return DiscreteSpace.from_grid(GridSpec.uniform(64, 1))


@pytest.fixture
def small_random(rng):
    """15 random points of the plane with random masses."""
    pts = rng.random((15, 2))
    return DiscreteSpace.euclidean(pts, rng.uniform(0.5, 2.0, 15))


def brute_balls(space):
    """Every distinct ball as (center, member mask), enumerated from scratch."""
    out = []
    for c in range(space.n):
        seen = set()
        for r in sorted(set(space.dist[c].tolist())):
            mask = space.dist[c] <= r
            key = mask.tobytes()
            if key not in seen:
                seen.add(key)
                out.append((c, mask))
    return out


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
