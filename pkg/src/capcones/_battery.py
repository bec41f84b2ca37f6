"""The oracle gate suite behind ``capcones verify-oracles``.

Each gate compares a computed quantity with an exact value or an exact
identity and reports the worst deviation against its bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_forms as cf
from .axisym import axisym_shoot, conserved_W, conserved_W_samples
from .foliation import validate
from .profile_ode import OdeProblem, limit_growth_exponent, psi_H0, solve_limit_equation
from .shooting import find_a_star
from .specfun import (
    f_M,
    legendre_residual,
    f_M_derivatives,
    limit_betas,
    limit_inverse_from_data,
    limit_inverse_r,
    limit_wronskian,
    t_M_zero,
)

__all__ = ["Gate", "run_battery", "w_drift"]


@dataclass(frozen=True)
class Gate:
    name: str
    value: float
    bound: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.bound)

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound, "passed": self.passed}


def w_drift(n: int, a: float, H0: float = 0.0, reach: float = 0.9) -> float:
    """Relative drift of the conserved quantity along the shot through (0, a, 0), over |xi| <= reach."""
    w0 = conserved_W(n, H0, 0.0, a, 0.0)
    worst = 0.0
    for direction in (1, -1):
        out = axisym_shoot(n, H0, 0.0, a, 0.0, direction)
        xi, w = conserved_W_samples(n, H0, out)
        keep = np.abs(xi) <= reach
        worst = max(worst, float(np.max(np.abs(w[keep] - w0))))
    return worst / max(abs(w0), 1e-3)


def _closed_forms() -> float:
    worst = 0.0
    for tr in (validate(2, 1, 2), validate(2, 2, 1), validate(2, 3, 5)):
        profiles = [cf.clifford_minimal_from_zero(tr), cf.clifford_minimal_across_one(tr),
                    cf.clifford_cmc(tr, 0.5), cf.clifford_cmc(tr, 3.0)]
        profiles += [cf.reflected(p) for p in profiles[:1]]
        worst = max(worst, *(p.max_residual for p in profiles))
    for n in (3, 4, 7):
        for fam in ("AxisymClifford", "AxisymHalfLawson"):
            worst = max(worst, cf.axisym_profiles(n, fam).max_residual)
        worst = max(worst, cf.axisym_profiles(n, "LatitudeSphere", 2.0).max_residual)
    return worst


def _psi_h0() -> float:
    tr = validate(2, 1, 2)
    worst = 0.0
    for a in (0.5, (tr.m1 + 1) / tr.m2, 3.0):
        p = cf.clifford_cmc(tr, a)
        prob = OdeProblem(tr, p.H0)
        for t in np.linspace(p.lo, p.hi, 1002)[1:-1]:
            worst = max(worst, abs(psi_H0(prob, float(t), p.f(float(t)), p.fp(float(t)))))
    return worst


def _fm_exact() -> tuple[float, float]:
    """Worst |f_M - (1 - 2t^2)| and |t_M - 1/sqrt 2| over g = 1 triples."""
    worst_f = worst_t = 0.0
    for n in (3, 5, 8):
        tr = validate(1, n - 2, n - 2)
        worst_t = max(worst_t, abs(t_M_zero(tr) - math.sqrt(0.5)))
        for t in np.linspace(0.0, 0.99, 100):
            worst_f = max(worst_f, abs(f_M(tr, float(t)) - (1 - 2 * t * t)))
    return worst_f, worst_t


def _legendre() -> float:
    worst = 0.0
    for g, m1, m2 in ((2, 1, 2), (3, 2, 2), (4, 2, 5), (4, 1, 6), (6, 1, 1)):
        tr = validate(g, m1, m2)
        for t in np.linspace(0.01, 0.95, 60):
            f, fp, fpp = f_M_derivatives(tr, float(t))
            worst = max(worst, abs(legendre_residual(tr, float(t), f, fp, fpp)))
    return worst


def _wronskian() -> float:
    ys = np.linspace(0.0, 5.0, 51)
    return max(abs(limit_wronskian(14.0, 4.0, float(y)) / (1 + y * y) ** 7 - 1.0) for y in ys)


def _limit_round_trip() -> float:
    worst = 0.0
    for L in (5.0, 10.0):
        C0, C1 = limit_inverse_from_data(14.0, 4.0, L)
        sol = solve_limit_equation(14.0, 4.0, 0.0, L, -1.0, -3.0)
        for r in np.linspace(-3.0, 0.0, 61):
            worst = max(worst, abs(limit_inverse_r(14.0, 4.0, C0, C1, float(sol.sol(r)[0])) - r))
    return worst


def _limit_exponent() -> float:
    sol = solve_limit_equation(14.0, 4.0, 0.0, 5.0, -1.0, -3.0)
    beta = limit_growth_exponent(14.0, 4.0, -3.0, *sol.y[:, -1])
    return min(abs(beta / b - 1.0) for b in limit_betas(14.0, 4.0))


def _clifford_a_star() -> float:
    lo, hi = find_a_star(OdeProblem(validate(2, 1, 2)), a_lo=0.5, a_hi=1.5, tol=1e-10)
    return abs(0.5 * (lo + hi) - 1.0)


def run_battery() -> list[Gate]:
    fm_err, tm_err = _fm_exact()
    return [
        Gate("closed-form residuals", _closed_forms(), cf.RESIDUAL_GATE),
        Gate("f_M = 1 - 2t^2 for g = 1", fm_err, 1e-14),
        Gate("t_M = 1/sqrt 2 for g = 1", tm_err, 1e-12),
        Gate("Legendre residual of f_M", _legendre(), 1e-9),
        Gate("Psi_H0 on the Clifford CMC family", _psi_h0(), 1e-10),
        Gate("W drift, half-Lawson n = 7", w_drift(7, 1 / math.sqrt(5)), 1e-8),
        Gate("W drift, generic n = 7, a = 0.3", w_drift(7, 0.3), 1e-8),
        Gate("W spot value n = 3", abs(conserved_W(3, 0.0, 0.0, 1.0, 0.0) - 0.5), 1e-15),
        Gate("limit Wronskian (relative)", _wronskian(), 1e-8),
        Gate("limit inverse round trip", _limit_round_trip(), 1e-6),
        Gate("limit growth exponent (relative)", _limit_exponent(), 0.02),
        Gate("Clifford free-boundary height (2,1,2)", _clifford_a_star(), 1e-6),
    ]
