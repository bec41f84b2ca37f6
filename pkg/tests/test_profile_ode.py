"""Tests for the profile equation, its series starts, integration outcomes and diagnostics."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from capcones import closed_forms as cf
from capcones.errors import DomainError, Unsupported
from capcones.foliation import t_alpha, validate
from capcones.integrator import Tag
from capcones.profile_ode import (
    OdeProblem,
    ProfileState,
    blowup_certificate,
    blowup_exponent,
    diagnostics_table,
    focal_one_slope,
    h_value,
    integrate,
    limit_equation_rhs,
    limit_growth_exponent,
    psi,
    psi_H0,
    psi_prime_formula,
    rhs,
    series_start_at_one,
    series_start_at_zero,
    solve_limit_equation,
    trajectory_table,
)
from capcones.specfun import legendre_residual, limit_betas, limit_inverse_from_data, limit_inverse_r, t_M_zero
from capcones.shooting import type1_theta_of_a

from conftest import ADMISSIBLE

triples = st.sampled_from(ADMISSIBLE).map(lambda x: validate(*x))


@given(triples, st.floats(-5.0, 5.0), st.floats(0.01, 0.99), st.sampled_from([0.0, 0.5, 1.0]))
def test_constant_solution_has_zero_rhs(tr, H0, t, lam):
    f = -H0 / (tr.n - 1)
    assert rhs(OdeProblem(tr, H0, lam), t, f, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_clifford_profile_residual():
    prob = OdeProblem(validate(2, 2, 1))
    for t in np.linspace(0.05, 0.8, 200):
        t = float(t)
        f = math.sqrt(3 - 4 * t * t)
        fp = -4 * t / f
        fpp = (-4 - fp * fp) / f
        assert abs((1 - t * t) * (fpp - rhs(prob, t, f, fp))) <= 1e-10


@given(triples, st.floats(0.02, 0.98), st.floats(-3.0, 3.0), st.floats(-10.0, 10.0))
def test_linear_limit_matches_legendre_operator(tr, t, f, fp):
    fpp = rhs(OdeProblem(tr, 0.0, 0.0), t, f, fp)
    scale = 1.0 + abs(f) + abs(fp) / t
    assert abs(legendre_residual(tr, t, f, fp, fpp)) <= 1e-12 * scale * (tr.n + 1)


def test_series_start_coefficients():
    for g, m1, m2 in ADMISSIBLE:
        tr = validate(g, m1, m2)
        s = series_start_at_zero(OdeProblem(tr), 2.0, eps=1e-3)
        b2 = (s.f - 2.0) / s.t**2
        assert b2 == pytest.approx(-2 * (tr.n - 1) * 2.0 / (g * g * (m1 + 1)), rel=1e-9)
        H0 = 1.7
        s = series_start_at_zero(OdeProblem(tr, H0), -H0 / (tr.n - 1))
        assert abs(s.fp) <= 1e-15
    tr = validate(1, 4, 4)
    s = series_start_at_zero(OdeProblem(tr), 1.0, eps=1e-2)
    assert (s.f - 1.0) / s.t**2 == pytest.approx(-2.0, rel=1e-12)


def test_focal_one_slope():
    assert focal_one_slope(OdeProblem(validate(2, 2, 1)), 1.0) == pytest.approx(2.0, rel=1e-15)
    prof = cf.clifford_minimal_across_one(validate(2, 2, 1))
    assert prof.fp(1.0) == pytest.approx(2.0, rel=1e-12)
    for g, m1, m2 in ADMISSIBLE:
        tr = validate(g, m1, m2)
        for H0 in (0.0, 0.5, 3.0):
            assert focal_one_slope(OdeProblem(tr, H0), 0.3) > 0
            assert focal_one_slope(OdeProblem(tr, H0), -H0 / (tr.n - 1)) == pytest.approx(0.0, abs=1e-15)
    s = series_start_at_one(OdeProblem(validate(2, 2, 1)), 1.0, eps=1e-4)
    assert s.t == pytest.approx(1 - 1e-4) and s.fp == pytest.approx(2.0)


def test_integrate_rejects_focal_start():
    with pytest.raises(DomainError):
        integrate(OdeProblem(validate(2, 1, 2)), ProfileState(0.0, 1.0, 0.0))


def test_clifford_free_boundary_shot():
    prob = OdeProblem(validate(2, 1, 2))
    out = integrate(prob, series_start_at_zero(prob, 1.0))
    # a = 1 is exactly the free-boundary height: zero and vertical tangent coincide
    assert out.tag in (Tag.REACHED_ZERO, Tag.DERIVATIVE_BLOWUP)
    assert out.x_end == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert abs(out.f_end) <= 1e-9
    assert math.isinf(out.slope_end)


def test_linear_shot_reaches_t_M():
    for tr in (validate(4, 2, 5), validate(2, 1, 2), validate(3, 2, 2)):
        prob = OdeProblem(tr, 0.0, 0.0)
        out = integrate(prob, series_start_at_zero(prob, 1.0))
        assert out.tag is Tag.REACHED_ZERO
        assert abs(out.x_end - t_M_zero(tr)) <= 1e-8


def test_large_height_blows_up_while_positive():
    prob = OdeProblem(validate(4, 2, 5))
    for a in (10.0, 20.0):
        out = integrate(prob, series_start_at_zero(prob, a))
        assert out.tag is Tag.DERIVATIVE_BLOWUP
        assert out.f_end > 0


@given(triples, st.floats(-3.0, 3.0))
def test_psi_on_constants(tr, c):
    prob = OdeProblem(tr)
    assert psi(prob, 0.4, c, 0.0) == pytest.approx(c * c - 1 / (tr.n - 2), abs=1e-14)


def test_psi_H0_vanishes_on_cmc_clifford():
    tr = validate(2, 1, 2)
    for a in (0.5, 2.0, 3.0):
        p = cf.clifford_cmc(tr, a)
        prob = OdeProblem(tr, p.H0)
        for t in p.grid(300):
            assert abs(psi_H0(prob, float(t), p.f(float(t)), p.fp(float(t)))) <= 1e-10


def test_psi_vanishes_at_a_vertical_zero():
    p = cf.clifford_minimal_from_zero(validate(2, 1, 2))
    prob = OdeProblem(p.triple)
    vals = [abs(psi(prob, p.hi - d, p.f(p.hi - d), p.fp(p.hi - d))) for d in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2]


def test_psi_prime_formula_matches_finite_difference():
    prob = OdeProblem(validate(4, 2, 5))
    out = integrate(prob, series_start_at_zero(prob, 0.2))
    traj = out.trajectory
    for t in np.linspace(0.1, out.x_end - 0.05, 9):
        t = float(t)
        f, fp = traj.at(t)
        fpp = rhs(prob, t, f, fp)
        h = 1e-5
        num = (psi(prob, t + h, *traj.at(t + h)) - psi(prob, t - h, *traj.at(t - h))) / (2 * h)
        assert psi_prime_formula(prob, t, f, fp, fpp) == pytest.approx(num, rel=1e-5, abs=1e-7)


def test_blowup_certificate():
    tr = validate(4, 2, 5)
    with pytest.raises(Unsupported):
        blowup_certificate(OdeProblem(validate(2, 1, 2)), None)
    with pytest.raises(Unsupported):
        blowup_certificate(OdeProblem(tr, -0.5), None)
    prob = OdeProblem(tr)
    for a in (0.25, 5.0, 10.0, 20.0):
        big = integrate(prob, series_start_at_zero(prob, a))
        assert blowup_certificate(prob, big.trajectory)
    for a in (0.05, 0.2):
        reach = integrate(prob, series_start_at_zero(prob, a))
        assert reach.tag is Tag.REACHED_ZERO
        assert not blowup_certificate(prob, reach.trajectory)
    lin = OdeProblem(tr, 0.0, 0.0)
    small = integrate(lin, series_start_at_zero(lin, 0.01))
    assert not blowup_certificate(lin, small.trajectory)


def test_certificate_from_the_minimal_leaf():
    tr = validate(4, 2, 5)
    prob = OdeProblem(tr)
    ta = t_alpha(tr)
    out = integrate(prob, ProfileState(ta, 1.5 / math.sqrt(tr.n - 2), 0.0))
    assert out.tag is Tag.DERIVATIVE_BLOWUP
    assert blowup_certificate(prob, out.trajectory)


@pytest.mark.parametrize("a", [5.0, 10.0, 20.0])
def test_blowup_exponent(a):
    prob = OdeProblem(validate(4, 2, 5))
    out = integrate(prob, series_start_at_zero(prob, a))
    assert abs(blowup_exponent(out) + 0.5) <= 0.05


def test_blowup_exponent_needs_a_tangent():
    lin = OdeProblem(validate(4, 2, 5), 0.0, 0.0)
    out = integrate(lin, series_start_at_zero(lin, 1.0))
    with pytest.raises(ValueError):
        blowup_exponent(out)


def _h_on_finite_part(tr, out):
    t, f, fp = out.trajectory.sample(300)
    # the terminal sample sits on the vertical tangent, where h is undefined
    keep = (f > 0) & (np.abs(fp) < 1e8) & (t > 0) & (t < 1)
    return np.array([h_value(tr, *x) for x in zip(t[keep], f[keep], fp[keep])])


@pytest.mark.parametrize("t1", [0.02, 0.05, 0.1])
def test_h_positive_on_minimal_shots_between_two_zeros(t1):
    tr = validate(4, 2, 5)
    prob = OdeProblem(tr)
    reached = 0
    for slope in (0.1, 0.3, 1.0, 3.0, 30.0):
        out = integrate(prob, ProfileState(t1, 0.0, slope))
        if out.tag is Tag.REACHED_ZERO:
            reached += 1
            assert np.all(_h_on_finite_part(tr, out) > 0)
    assert reached >= 1


def test_h_changes_sign_on_increasing_blowups():
    tr = validate(4, 2, 5)
    out = integrate(OdeProblem(tr), ProfileState(0.45, 0.0, 3.0))
    assert out.tag is Tag.DERIVATIVE_BLOWUP
    t, f, fp = out.trajectory.sample(300)
    keep = np.abs(fp) < 1e8
    assert np.all(np.diff(f[keep]) >= 0)
    h = _h_on_finite_part(tr, out)
    assert h[0] > 0 and h[-1] < 0


def test_h_can_vanish_before_t_alpha_when_H0_positive():
    tr = validate(4, 2, 5)
    out = integrate(OdeProblem(tr, 2.0), ProfileState(0.05, 0.0, 3.0))
    assert out.tag is Tag.REACHED_ZERO
    assert np.min(_h_on_finite_part(tr, out)) < 0


@pytest.mark.parametrize("a", [0.02, 0.1, 0.2])
def test_h_positive_on_minimal_type1_shots_that_reach_zero(a):
    tr = validate(4, 2, 5)
    prob = OdeProblem(tr)
    out = integrate(prob, series_start_at_zero(prob, a))
    assert out.tag is Tag.REACHED_ZERO
    assert np.all(_h_on_finite_part(tr, out) > 0)


def test_h_negative_near_the_focal_set_for_cmc_type1():
    # h(0+) = a + g alpha b2 with b2 = -2 (H0 + (n-1) a) / (g^2 (m1+1)) is negative for small a when H0 > 0
    tr = validate(4, 2, 5)
    a, H0 = 1e-4, 1.0
    start = series_start_at_zero(OdeProblem(tr, H0), a, eps=1e-6)
    b2 = -2 * (H0 + (tr.n - 1) * a) / (tr.g**2 * (tr.m1 + 1))
    assert start.h(tr) == pytest.approx(a + tr.g * tr.alpha * b2, rel=1e-6)
    assert start.h(tr) < 0


def test_reflection_duality_with_backward_shot():
    tr = validate(4, 2, 5)
    prob = OdeProblem(tr)
    a = 0.1
    shot = type1_theta_of_a(prob, a, side="M2")
    back = integrate(prob, series_start_at_one(prob, a, eps=1e-7), direction=-1)
    assert back.tag is Tag.REACHED_ZERO
    assert back.x_end == pytest.approx(shot.t_zero, abs=1e-8)
    for t in np.linspace(back.x_end + 0.05, 0.95, 12):
        assert shot.view.at(float(t))[0] == pytest.approx(back.trajectory.at(float(t))[0], abs=1e-8)


def test_diagnostics_table_columns():
    prob = OdeProblem(validate(2, 1, 2), 0.5)
    out = integrate(prob, series_start_at_zero(prob, 0.3))
    table = trajectory_table(prob, out.trajectory, 50)
    assert set(table) == {"t", "f", "fp", "h", "Psi", "PsiH0"}
    lengths = {len(v) for v in table.values()}
    assert len(lengths) == 1
    direct = diagnostics_table(prob, *out.trajectory.sample(50))
    assert np.array_equal(direct["Psi"], table["Psi"])


def test_limit_equation_constants():
    for r in (-2.0, 0.0, 3.0):
        assert limit_equation_rhs(14.0, 4.0, r, 2.5, 0.0) == 0.0


def test_limit_equation_round_trip_and_growth():
    C0, C1 = limit_inverse_from_data(14.0, 4.0, 10.0)
    sol = solve_limit_equation(14.0, 4.0, 0.0, 10.0, -1.0, -3.0)
    r = np.linspace(-3.0, 0.0, 31)
    y = sol.sol(r)[0]
    assert max(abs(limit_inverse_r(14.0, 4.0, C0, C1, float(v)) - x) for v, x in zip(y, r)) <= 1e-6
    beta = limit_growth_exponent(14.0, 4.0, -3.0, *sol.y[:, -1], log_r_end=60.0)
    assert beta == pytest.approx(1 / 8, rel=0.02)


def test_pure_odd_inverse_grows_with_the_other_exponent():
    from capcones.specfun import limit_basis

    L = 5.0
    _, _, f1, d1 = limit_basis(14.0, 4.0, L)
    C1 = -1.0 / f1
    beta = limit_growth_exponent(14.0, 4.0, -1.0, L, 1.0 / (C1 * d1), log_r_end=40.0)
    assert beta == pytest.approx(max(limit_betas(14.0, 4.0)), rel=0.02)


def test_limit_growth_needs_backward_data():
    with pytest.raises(DomainError):
        limit_growth_exponent(14.0, 4.0, 1.0, 1.0, 1.0)
