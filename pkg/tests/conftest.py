"""Shared fixtures: the worked 8x7 instance and common tolerance policies."""
from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from multirate_zeros.model import Dimensions, TolerancePolicy, fixture

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

EXAMPLE1_DIMS = Dimensions(n=1, m=3, p1=1, p2=5, N=2)
LONG_HORIZON_DIMS = Dimensions(n=5, m=5, p1=3, p2=24, N=8)


@pytest.fixture(scope="session")
def policy() -> TolerancePolicy:
    return TolerancePolicy()


@pytest.fixture(scope="session")
def example1_sys():
    return fixture("example1", EXAMPLE1_DIMS, tau=1, seed=0)
