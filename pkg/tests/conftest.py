"""Shared fixtures and hypothesis settings."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.integrate import solve_ivp

from capcones.foliation import FoliationTriple

settings.register_profile("ci", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

ADMISSIBLE = [(1, 3, 3), (1, 5, 5), (2, 1, 2), (2, 2, 1), (2, 3, 5), (3, 1, 1), (3, 2, 2),
              (3, 4, 4), (4, 1, 2), (4, 2, 5), (4, 3, 4), (4, 2, 2), (4, 4, 5), (6, 1, 1), (6, 2, 2)]


def linear_oracle(triple: FoliationTriple, t_end: float, t0: float = 1e-4):
    """Integrate L_M f = 0 from its even series start with scipy; independent of the package integrator."""
    g, m1, m2, n = triple.g, triple.m1, triple.m2, triple.n
    kap = 4.0 * (n - 1) / g**2
    b2 = -2.0 * (n - 1) / (g**2 * (m1 + 1))

    def fun(t, y):
        return [y[1], -((m1 / t - (m1 + m2 + 1) * t) * y[1] + kap * y[0]) / (1 - t * t)]

    return solve_ivp(fun, (t0, t_end), [1 + b2 * t0**2, 2 * b2 * t0], method="DOP853",
                     rtol=1e-13, atol=1e-15, dense_output=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
