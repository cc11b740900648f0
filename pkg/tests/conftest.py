import os
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tameforge.errors import ConditioningWarning

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _quiet_conditioning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
