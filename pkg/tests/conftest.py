import os
import random
import sys

import pytest
from flint import fmpq_mat
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SELMER = "3*x1^3 + 4*x2^3 + 5*x3^3"


def random_unimodular(rng: random.Random, n: int, bound: int = 3) -> fmpq_mat:
    """Random integer matrix of determinant +-1 with entries in [-bound, bound]."""
    while True:
        g = fmpq_mat([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])
        if abs(g.det()) == 1:
            return g


@pytest.fixture(scope="session")
def selmer():
    from g1models.resolution import model_from_cubic
    return model_from_cubic(SELMER)


@pytest.fixture(scope="session")
def enc5():
    """Degree-5 model of y^2 = x^3 - x + 1 from two unprojections."""
    from g1models.unprojection import elliptic_normal_curve
    return elliptic_normal_curve(0, 0, 0, -1, 1, 5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
