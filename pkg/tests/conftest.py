import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qwseed import graph as G

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def nonbipartite_family():
    """Small connected nonbipartite graphs used across modules."""
    return [
        G.complete(4),
        G.cycle(5),
        G.cycle(7),
        G.petersen(),
        G.complete(6),
        G.random_regular(16, 3, 1),
        G.random_regular(64, 3, 5),
    ]
