import random

import pytest
from hypothesis import HealthCheck, settings

from tiltfilt.acceptance import load
from tiltfilt.exactlin import QQ, Mat
from tiltfilt.quivalg import Module

settings.register_profile(
    "suite", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def ex1():
    return load("ex1")


@pytest.fixture(scope="session")
def ex2():
    return load("ex2")


@pytest.fixture(scope="session")
def a2():
    return load("a2")


@pytest.fixture(scope="session")
def nak3():
    return load("nak3")


@pytest.fixture(scope="session")
def semisimple():
    return load("semisimple")


@pytest.fixture
def rng():
    return random.Random(12345)


def one_dim_module(alg, dims, ones):
    """Module with 1x1 identity matrices on the named arrows."""
    aidx = {a.name: i for i, a in enumerate(alg.quiver.arrows)}
    one = Mat.from_rows(QQ, [[1]])
    return Module(alg, dims, {alg.generators[aidx[a]]: one for a in ones})
