"""Tests for the exact profiles used as oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from capcones import closed_forms as cf
from capcones.errors import DomainError, WrongG
from capcones.foliation import validate
from capcones.profile_ode import OdeProblem, focal_one_slope, psi_H0, rhs

G2 = [validate(2, 1, 2), validate(2, 2, 1), validate(2, 3, 5), validate(2, 1, 1)]


def _brute_residual(tr, H0, f, t, h=1e-4):
    """Residual with f', f'' from central differences, independent of the analytic derivatives."""
    fp = (f(t + h) - f(t - h)) / (2 * h)
    fpp = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
    return (1 - t * t) * (fpp - rhs(OdeProblem(tr, H0), t, f(t), fp))


def test_free_boundary_examples():
    p = cf.clifford_minimal_from_zero(validate(2, 1, 2))
    assert p.params["a_star"] == 1.0
    assert p.hi == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert p.f(0.3) == pytest.approx(math.sqrt(1 - 2 * 0.09), rel=1e-15)
    q = cf.clifford_minimal_from_zero(validate(2, 2, 1))
    assert q.params["a_star"] == pytest.approx(math.sqrt(3), rel=1e-15)
    assert q.hi == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
    assert q.f(0.2) == pytest.approx(math.sqrt(3 - 4 * 0.04), rel=1e-15)


@pytest.mark.parametrize("tr", G2, ids=str)
def test_residual_gates_and_brute_force(tr):
    profiles = [cf.clifford_minimal_from_zero(tr), cf.clifford_minimal_across_one(tr),
                cf.clifford_cmc(tr, 0.5), cf.clifford_cmc(tr, 3.0)]
    for p in profiles:
        assert p.max_residual <= cf.RESIDUAL_GATE
        for t in np.linspace(p.lo, p.hi, 12)[2:-2]:
            assert abs(_brute_residual(tr, p.H0, p.f, float(t))) <= 1e-5


def test_lawson_height_is_minimal():
    for tr in G2:
        a = (tr.m1 + 1) / tr.m2
        assert abs(cf.clifford_cmc_H0(tr, a)) <= 1e-14
        cmc = cf.clifford_cmc(tr, a)
        free = cf.clifford_minimal_from_zero(tr)
        for t in np.linspace(0.0, free.hi * 0.99, 20):
            assert abs(cmc.f(float(t)) - free.f(float(t))) <= 1e-14
    assert cf.clifford_cmc_H0(validate(2, 1, 2), 4.0) == pytest.approx(-3.0, rel=1e-15)


@given(st.floats(0.1, 5.0))
def test_psi_H0_zero_along_cmc_family(a):
    tr = validate(2, 1, 2)
    p = cf.clifford_cmc(tr, a)
    prob = OdeProblem(tr, p.H0)
    for t in p.grid(40):
        assert abs(psi_H0(prob, float(t), p.f(float(t)), p.fp(float(t)))) <= 1e-10


def test_across_one_meets_focal_compatibility():
    for tr in G2:
        p = cf.clifford_minimal_across_one(tr)
        assert p.f(1.0) == pytest.approx(p.params["f_at_one"], rel=1e-14)
        assert p.fp(1.0) == pytest.approx(focal_one_slope(OdeProblem(tr), p.f(1.0)), rel=1e-12)


def test_reflected_profile_solves_swapped_equation():
    tr = validate(2, 1, 2)
    r = cf.reflected(cf.clifford_minimal_from_zero(tr))
    assert (r.triple.m1, r.triple.m2) == (2, 1)
    assert r.max_residual <= cf.RESIDUAL_GATE
    # the reflected cap is smooth across t = 1 with the compatible slope
    t = 1 - 1e-9
    assert r.fp(t) == pytest.approx(focal_one_slope(OdeProblem(r.triple), r.f(t)), rel=1e-6)


def test_radii_of_doubled_torus():
    tr = validate(2, 1, 2)
    (d1, r1), (d2, r2) = cf.clifford_torus_radii(tr)
    n, k = tr.n, tr.m1 + 1
    assert (d1, d2) == (n - k - 1, k)
    assert r1 == pytest.approx(math.sqrt((n - k - 1) / (n - 1)), rel=1e-15)
    assert r2 == pytest.approx(math.sqrt(k / (n - 1)), rel=1e-15)
    assert r1**2 + r2**2 == pytest.approx(1.0, rel=1e-15)
    # the zero of the free-boundary profile sits where the second factor's radius is attained
    p = cf.clifford_minimal_from_zero(tr)
    assert p.hi == pytest.approx(r2, rel=1e-15)


@pytest.mark.parametrize("n", [3, 4, 7, 10])
def test_axisym_profiles(n):
    hl = cf.axisym_profiles(n, "AxisymHalfLawson")
    assert hl.f(0.0) == pytest.approx(1 / math.sqrt(n - 2), rel=1e-15)
    cl = cf.axisym_profiles(n, "AxisymClifford")
    lat = cf.axisym_profiles(n, "LatitudeSphere", 2.0)
    for p in (hl, cl, lat):
        assert p.max_residual <= 1e-10
    for t in np.linspace(cl.lo, cl.hi, 40)[1:-1]:
        xi = 1 - 2 * t * t
        assert cl.f(float(t)) == pytest.approx(hl.f(float(xi)), abs=1e-12)
    assert lat.H0 == pytest.approx((n - 1) / math.sqrt(2.0), rel=1e-15)


def test_axisym_clifford_at_the_symmetric_point():
    p = cf.axisym_profiles(4, "AxisymClifford")
    assert p.f(1 / math.sqrt(2)) == pytest.approx(1 / math.sqrt(2), rel=1e-14)


def test_constant_solutions_and_latitude_height():
    tr = validate(4, 2, 5)
    assert cf.constant_solution(tr, 0.0).f(0.5) == 0.0
    assert cf.constant_solution(tr, -(tr.n - 1)).f(0.5) == pytest.approx(1.0, rel=1e-15)
    for H0 in (-3.0, 0.0, 2.0):
        assert cf.constant_solution(tr, H0).max_residual == 0.0
    assert cf.latitude_height(tr.n, 0.0) == 0.0
    assert cf.latitude_height(tr.n, tr.n - 1) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert cf.latitude_height(5, 3.0) == pytest.approx(3 / 5, rel=1e-15)


def test_errors():
    with pytest.raises(WrongG):
        cf.clifford_minimal_from_zero(validate(4, 2, 5))
    with pytest.raises(DomainError):
        cf.clifford_cmc(validate(2, 1, 2), 0.0)
    with pytest.raises(DomainError):
        cf.axisym_profiles(4, "Catenoid")
    with pytest.raises(DomainError):
        cf.reflected(cf.axisym_profiles(4, "AxisymHalfLawson"))
