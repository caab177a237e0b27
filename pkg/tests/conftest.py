"""Shared fixtures.

The square sweep is the single most expensive artifact the suite needs; it is
computed once per session and shared between the asymptotics tests and the
acceptance criteria that grade it.
"""

import pytest
from hypothesis import settings

from robincorner import DomainSpec, lshape, sweep, unit_square

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def lshape_polygon():
    return lshape()


@pytest.fixture
def square_domain():
    return DomainSpec.from_polygon(unit_square())


@pytest.fixture(scope="session")
def square_sweep_table():
    return sweep(DomainSpec.from_polygon(unit_square()), alphas=(4.0, 8.0, 16.0, 32.0))
