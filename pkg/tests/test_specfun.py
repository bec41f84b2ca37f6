"""Tests for the hypergeometric layer, f_M and the limit-equation inverse."""

from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from capcones.errors import ComplexExponents, DomainError
from capcones.foliation import t_alpha, validate
from capcones.specfun import (
    f_M,
    f_M_derivatives,
    hyp2f1,
    hyp2f1_dz,
    legendre_residual,
    legendre_selfadjoint_residual,
    limit_basis,
    limit_betas,
    limit_exponents,
    limit_inverse_from_data,
    limit_inverse_r,
    limit_wronskian,
    t_M_zero,
)

from conftest import ADMISSIBLE, linear_oracle

params = st.floats(-3.0, 3.0).filter(lambda x: abs(x - round(x)) > 1e-3 or x > 0)
c_params = st.floats(0.2, 4.0)


def test_hyp2f1_at_zero():
    assert hyp2f1(1.3, -0.7, 2.2, 0.0) == 1.0


def test_hyp2f1_terminating_polynomial():
    for n in (3, 5, 9):
        for z in np.linspace(-0.9, 0.95, 13):
            assert hyp2f1(n - 1, -1, (n - 1) / 2, float(z)) == pytest.approx(1 - 2 * z, abs=1e-14)


def test_hyp2f1_arcsin_identity():
    assert hyp2f1(0.5, 0.5, 1.5, 0.25) == pytest.approx(math.asin(0.5) / 0.5, rel=1e-14)
    assert math.asin(0.5) / 0.5 == pytest.approx(1.0471976, abs=1e-7)


@given(params, params, c_params, st.floats(-0.9, 0.9))
def test_hyp2f1_against_mpmath(a, b, c, z):
    ref = float(mpmath.hyp2f1(a, b, c, z))
    assert hyp2f1(a, b, c, z) == pytest.approx(ref, rel=1e-11, abs=1e-12)


@given(params, params, c_params, st.floats(-0.8, 0.8))
def test_hyp2f1_derivative_against_mpmath(a, b, c, z):
    ref = float(mpmath.diff(lambda x: mpmath.hyp2f1(a, b, c, x), z))
    assert hyp2f1_dz(a, b, c, z) == pytest.approx(ref, rel=1e-9, abs=1e-10)


def test_f_M_normalisation():
    for g, m1, m2 in ADMISSIBLE:
        tr = validate(g, m1, m2)
        assert f_M(tr, 0.0) == 1.0
    with pytest.raises(DomainError):
        f_M(validate(2, 1, 2), 1.0)


def test_f_M_closed_form_g1():
    for n in (3, 4, 7, 12):
        tr = validate(1, n - 2, n - 2)
        for t in np.linspace(0.0, 0.99, 50):
            assert abs(f_M(tr, float(t)) - (1 - 2 * t * t)) <= 1e-14
        assert abs(t_M_zero(tr) - math.sqrt(0.5)) <= 1e-12


def test_f_M_against_ode_oracle():
    tr = validate(4, 2, 5)
    sol = linear_oracle(tr, 0.3)
    assert abs(f_M(tr, 0.3) - sol.y[0, -1]) <= 1e-9
    assert abs(f_M_derivatives(tr, 0.3)[1] - sol.y[1, -1]) <= 1e-8


@pytest.mark.parametrize("m1,m2", [(1, 2), (2, 1), (3, 5), (1, 1)])
def test_t_M_g2_against_ode_sign_change(m1, m2):
    tr = validate(2, m1, m2)
    tm = t_M_zero(tr)
    sol = linear_oracle(tr, 0.999)
    grid = np.linspace(1e-3, 0.999, 20001)
    f = sol.sol(grid)[0]
    k = int(np.argmax(f <= 0))
    assert k > 0 and grid[k - 1] <= tm <= grid[k]


def test_t_M_exceeds_t_alpha():
    for g, m1, m2 in ADMISSIBLE:
        tr = validate(g, m1, m2)
        assert t_M_zero(tr) > t_alpha(tr)


@pytest.mark.parametrize("triple", [(2, 1, 2), (3, 2, 2), (4, 2, 5), (4, 1, 6), (6, 1, 1), (4, 4, 5)])
def test_legendre_residual_of_f_M(triple):
    tr = validate(*triple)
    for t in np.linspace(0.01, 0.95, 40):
        f, fp, fpp = f_M_derivatives(tr, float(t))
        assert abs(legendre_residual(tr, float(t), f, fp, fpp)) <= 1e-9
        assert abs(legendre_selfadjoint_residual(tr, float(t), f, fp, fpp)) <= 1e-9


def test_legendre_constant_input():
    for g, m1, m2 in ADMISSIBLE:
        tr = validate(g, m1, m2)
        assert legendre_residual(tr, 0.4, 1.0, 0.0, 0.0) == pytest.approx(4 * (tr.n - 1) / g**2)


def test_legendre_closed_form_g1():
    tr = validate(1, 5, 5)
    for t in (0.1, 0.3, 0.7):
        assert abs(legendre_residual(tr, t, 1 - 2 * t * t, -4 * t, -4.0)) <= 1e-13


def test_limit_exponents_and_betas():
    ap, am = limit_exponents(14.0, 4.0)
    assert (ap, am) == pytest.approx((-3.5, -4.0), rel=1e-15)
    assert limit_betas(14.0, 4.0) == pytest.approx((1 / 7, 1 / 8), rel=1e-15)
    n, g = 16, 4
    root = math.sqrt((n - 1) ** 2 - 4 * g * (n - 2))
    closed = sorted(((n - 1) + s * root) / (2 * g * (n - 2)) for s in (1, -1))
    assert sorted(limit_betas(n - 2.0, g)) == pytest.approx(closed, rel=1e-14)
    with pytest.raises(ComplexExponents):
        limit_exponents(1.0, 4.0)


def test_limit_basis_at_zero():
    f0, d0, f1, d1 = limit_basis(14.0, 4.0, 0.0)
    assert (f0, d0, f1, d1) == (1.0, 0.0, 0.0, 1.0)
    assert limit_inverse_r(14.0, 4.0, 0.37, 2.5, 0.0) == 0.37


@given(st.floats(0.0, 6.0))
def test_limit_wronskian_identity(y):
    assert limit_wronskian(14.0, 4.0, y) == pytest.approx((1 + y * y) ** 7, rel=1e-10)


def test_limit_basis_is_polynomial_for_integer_exponents():
    # with a_+ = -3.5, a_- = -4 both basis series terminate: F0 has degree 8 and F1 degree 7
    for y in (0.5, 2.0, 4.0):
        f0, _, f1, _ = limit_basis(14.0, 4.0, y)
        z = -y * y
        ref0 = float(mpmath.hyp2f1(-3.5, -4, 0.5, z))
        ref1 = y * float(mpmath.hyp2f1(-3, -3.5, 1.5, z))
        assert f0 == pytest.approx(ref0, rel=1e-13)
        assert f1 == pytest.approx(ref1, rel=1e-13)


def test_limit_inverse_from_data_matches_initial_data():
    for L in (0.5, 5.0, 10.0):
        C0, C1 = limit_inverse_from_data(14.0, 4.0, L)
        f0, d0, f1, d1 = limit_basis(14.0, 4.0, L)
        assert C0 * f0 + C1 * f1 == pytest.approx(0.0, abs=1e-12 * abs(C0 * f0))
        # dr/dy = 1 / y'(0) = -1
        assert C0 * d0 + C1 * d1 == pytest.approx(-1.0, rel=1e-12)


def test_t_M_near_one_for_g6():
    tr = validate(6, 1, 1)
    ref = float(mpmath.findroot(lambda t: mpmath.hyp2f1(mpmath.mpf(7) / 6, -mpmath.mpf(1) / 6, 1, t * t),
                                (0.99, 0.999), solver="bisect"))
    assert t_M_zero(tr) == pytest.approx(ref, abs=1e-10)
