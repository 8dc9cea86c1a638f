import os

import pytest
from hypothesis import HealthCheck, settings

from tensorcolor.instances import make_instance, random_regular

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def small_exact():
    """K3 × G for a 6-regular G on 20 vertices, no deletions."""
    return make_instance(random_regular(20, 6, seed=3), 0)


@pytest.fixture(scope="session")
def small_noisy():
    return make_instance(random_regular(40, 24, seed=5), "1/41", strategy="random", seed=2)
