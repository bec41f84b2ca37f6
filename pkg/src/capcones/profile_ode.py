"""The capillary profile equation, its series starts and Lyapunov diagnostics.

A cone over the graph of f(t) on the isoparametric foliation has constant
mean curvature H0 exactly when

    (1-t^2) f'' + (m1/t - (m1+m2+1) t) f' + 4(n-1)/g^2 f
        + (n-2) (1-t^2) lam f'^2/(1 + lam f^2) h
        + 4 H0/g^2 (1 + g^2/4 (1-t^2) lam f'^2/(1 + lam f^2))^{3/2} = 0,

with h = f - (g/2) A_M(t) f'. lam = 1 is the geometric equation, lam = a^2
is the equation for f_a / a, and lam = 0, H0 = 0 is the linear equation
L_M f = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StepFailure, Unsupported
from .foliation import FoliationTriple, A_M, t_alpha
from .integrator import Outcome, StopSpec, Tag, Trajectory, shoot

__all__ = [
    "OdeProblem",
    "ProfileState",
    "IntegrationOutcome",
    "rhs",
    "rhs_hodograph",
    "series_start_at_zero",
    "series_start_at_one",
    "focal_one_slope",
    "integrate",
    "h_value",
    "psi",
    "psi_H0",
    "psi_prime_formula",
    "blowup_certificate",
    "blowup_exponent",
    "limit_equation_rhs",
    "solve_limit_equation",
    "limit_growth_exponent",
    "trajectory_table",
    "diagnostics_table",
]


@dataclass(frozen=True)
class OdeProblem:
    triple: FoliationTriple
    H0: float = 0.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise DomainError(f"lam must be >= 0, got {self.lam}")

    def to_json(self) -> dict:
        return {**self.triple.to_json(), "H0": self.H0, "lambda": self.lam}


@dataclass(frozen=True)
class ProfileState:
    t: float
    f: float
    fp: float

    def h(self, triple: FoliationTriple) -> float:
        return h_value(triple, self.t, self.f, self.fp)


IntegrationOutcome = Outcome


def h_value(triple: FoliationTriple, t: float, f: float, fp: float) -> float:
    return f - 0.5 * triple.g * A_M(triple, t) * fp


def _coefficients(problem: OdeProblem):
    tr = problem.triple
    g = tr.g
    return (tr.m1, tr.m1 + tr.m2 + 1, 4.0 * (tr.n - 1) / g**2, tr.n - 2, 0.5 * g,
            tr.alpha, 4.0 * problem.H0 / g**2, 0.25 * g * g, problem.lam)


def rhs(problem: OdeProblem, t: float, f: float, fp: float) -> float:
    """Solve the profile equation for f''."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t = {t} is a focal endpoint or outside (0, 1)")
    m1, mm, kap, c, hg, alpha, hc, gg4, lam = _coefficients(problem)
    q = 1.0 - t * t
    Q = q * lam / (1.0 + lam * f * f)
    h = f - hg * (t - alpha / t) * fp
    num = -(m1 / t - mm * t) * fp - kap * f - c * Q * fp * fp * h
    if hc:
        num -= hc * (1.0 + gg4 * Q * fp * fp) ** 1.5
    return num / q


def rhs_hodograph(problem: OdeProblem, t: float, f: float, p: float, sign: float) -> float:
    """dp/df for p = dt/df, i.e. -p^3 f'' written without negative powers of p."""
    m1, mm, kap, c, hg, alpha, hc, gg4, lam = _coefficients(problem)
    q = 1.0 - t * t
    Q = q * lam / (1.0 + lam * f * f)
    p2 = p * p
    num = -(m1 / t - mm * t) * p2 - kap * f * p2 * p - c * Q * (f * p - hg * (t - alpha / t))
    if hc:
        num -= hc * sign * (p2 + gg4 * Q) ** 1.5
    return -num / q


def series_start_at_zero(problem: OdeProblem, a: float, eps: float = 1e-6) -> ProfileState:
    """Even series start f = a + b2 t^2 near the focal submanifold t = 0."""
    tr = problem.triple
    b2 = -2.0 * (problem.H0 + (tr.n - 1) * a) / (tr.g**2 * (tr.m1 + 1))
    return ProfileState(eps, a + b2 * eps * eps, 2.0 * b2 * eps)


def focal_one_slope(problem: OdeProblem, c: float) -> float:
    """Slope at t = 1 forced by smoothness across M2."""
    tr = problem.triple
    return 4.0 * ((tr.n - 1) * c + problem.H0) / (tr.g**2 * (tr.m2 + 1))


def series_start_at_one(problem: OdeProblem, c: float, eps: float = 1e-6) -> ProfileState:
    """First-order start at t = 1 - eps for backward integration from M2."""
    s = focal_one_slope(problem, c)
    return ProfileState(1.0 - eps, c - s * eps, s)


def integrate(
    problem: OdeProblem,
    start: ProfileState,
    direction: int = 1,
    stop: StopSpec | None = None,
) -> Outcome:
    """Shoot from ``start`` until a zero, a vertical tangent, a focal endpoint or failure."""
    stop = stop or StopSpec()
    if not 0.0 < start.t < 1.0:
        raise DomainError(f"start.t = {start.t} must lie in (0, 1); use a series start")
    out = shoot(
        lambda t, f, fp: rhs(problem, t, f, fp),
        lambda t, f, p, s: rhs_hodograph(problem, t, f, p, s),
        start.t, start.f, start.fp, direction, stop,
    )
    if out.tag is Tag.REACHED_FOCAL and direction > 0:
        out.message = f"focal compatibility residual {out.slope_end - focal_one_slope(problem, out.f_end):.3e}"
    return out


def psi(problem: OdeProblem, t: float, f: float, fp: float) -> float:
    """Lyapunov quantity f h - 1/(n-2)."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t = {t} is outside (0, 1)")
    tr = problem.triple
    return f * h_value(tr, t, f, fp) - 1.0 / (tr.n - 2)


def psi_H0(problem: OdeProblem, t: float, f: float, fp: float) -> float:
    """Mean-curvature Lyapunov quantity; equals ``psi`` when H0 = 0."""
    base = psi(problem, t, f, fp)
    if problem.H0 == 0.0:
        return base
    tr = problem.triple
    w = math.sqrt(1.0 + 0.25 * tr.g**2 * (1.0 - t * t) * fp * fp / (1.0 + f * f))
    return base + problem.H0 / (tr.n - 2) * f * w


def psi_prime_formula(problem: OdeProblem, t: float, f: float, fp: float, fpp: float) -> float:
    """Closed form of d/dt psi for solutions, -(g-2) f f' + (g/2) A (f f'/t - f'^2 - f f'')."""
    g = problem.triple.g
    A = A_M(problem.triple, t)
    return -(g - 2) * f * fp + 0.5 * g * A * (f * fp / t - fp * fp - f * fpp)


def blowup_certificate(problem: OdeProblem, trajectory: Trajectory, step: float = 1e-5,
                       samples: int = 400) -> bool:
    """True if some t0 >= t_alpha on the trajectory has Psi(t0) >= 0 and Psi'(t0) >= 0.

    Psi is the H0-adapted quantity; Psi' is a centred difference on the dense output.
    The difference step shrinks with the window [t_alpha, t_end], which
    collapses onto t_alpha for large heights.
    """
    tr = problem.triple
    if tr.g <= 2:
        raise Unsupported("blow-up certificates need g >= 3")
    if problem.H0 < 0:
        raise Unsupported("blow-up certificates need H0 >= 0")
    lo, hi = trajectory.x_range()
    ta = t_alpha(tr)
    lo = max(lo, ta)
    if hi <= lo:
        return False
    step = min(step, (hi - lo) / 8)
    lo, hi = lo + step, hi - step

    def value(t: float) -> float:
        f, fp = trajectory.at(t)
        if not math.isfinite(fp):
            return math.nan
        return psi_H0(problem, t, f, fp)

    for t0 in np.linspace(lo, hi, samples):
        f0, _ = trajectory.at(t0)
        if f0 <= 0:
            break
        p0 = value(t0)
        if p0 < 0:
            continue
        d = (value(t0 + step) - value(t0 - step)) / (2 * step)
        if d >= 0:
            return True
    return False


def blowup_exponent(outcome: Outcome, decades: tuple[float, float] = (1e-13, 1e-10)) -> float:
    """Least-squares exponent of |f'| against (t_blow - t) near a vertical tangent.

    Samples are taken on a logarithmic grid in |f - f_blow| from the trailing
    hodograph segments, so the innermost decades of the tangent are resolved.
    """
    if outcome.tag is not Tag.DERIVATIVE_BLOWUP and not (
        outcome.tag is Tag.REACHED_ZERO and math.isinf(outcome.slope_end)
    ):
        raise ValueError(f"no vertical tangent in outcome {outcome.tag}")
    segs = []
    for seg in reversed(outcome.trajectory.segments):
        if seg.mode != "f":
            break
        segs.append(seg)
    if not segs:
        raise ValueError("the trajectory does not end in the hodograph chart")
    tb, fb = outcome.x_end, outcome.f_end
    dist, slope = [], []
    for seg in segs:
        lo, hi = sorted((abs(seg.s0 - fb), abs(seg.s1 - fb)))
        lo = max(lo, 1e-300 + 1e-14 * max(1.0, abs(fb)))
        if hi <= lo:
            continue
        off = np.geomspace(lo, hi, 2000)
        s = fb + np.sign(seg.s0 - fb) * off
        y = seg.sol(s)
        dist.append(np.abs(tb - y[0]))
        slope.append(np.abs(1.0 / y[1]))
    dist = np.concatenate(dist)
    slope = np.concatenate(slope)
    mask = (dist > decades[0]) & (dist < decades[1]) & np.isfinite(slope)
    if mask.sum() < 10:
        raise ValueError("not enough samples in the fitting window")
    coef = np.polyfit(np.log(dist[mask]), np.log(slope[mask]), 1)
    return float(coef[0])


def limit_equation_rhs(c: float, g: float, r: float, y: float, yp: float) -> float:
    """y'' for the blow-up limit equation y'' + c y'^2 (y - g r y')/(1 + y^2) = 0."""
    return -c * yp * yp * (y - g * r * yp) / (1.0 + y * y)


def solve_limit_equation(c: float, g: float, r0: float, y0: float, yp0: float, r_end: float,
                         rtol: float = 1e-13, atol: float = 1e-14):
    """Integrate the limit equation from (r0, y0, y0') to r_end; returns scipy's result with dense output."""
    sol = solve_ivp(lambda r, y: [y[1], limit_equation_rhs(c, g, r, y[0], y[1])], (r0, r_end),
                    [y0, yp0], method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if sol.status != 0:
        raise StepFailure(f"limit equation: {sol.message} at r = {sol.t[-1]}")
    return sol


def limit_growth_exponent(c: float, g: float, r0: float, y0: float, yp0: float,
                          log_r_end: float = 40.0) -> float:
    """d log y / d log|r| at r = -exp(log_r_end) for a solution continued backward from r0 < 0.

    The local exponent w = r y'/y obeys w' = w - w^2 + r^2 y''/y in s = log|r|,
    which keeps the far backward range well scaled.
    """
    if r0 >= 0 or y0 <= 0:
        raise DomainError("the backward continuation needs r0 < 0 and y0 > 0")

    def fun(s: float, u: np.ndarray) -> list[float]:
        r = -math.exp(s)
        y = math.exp(u[0])
        yp = u[1] * y / r
        return [u[1], u[1] - u[1] ** 2 + r * r * limit_equation_rhs(c, g, r, y, yp) / y]

    sol = solve_ivp(fun, (math.log(-r0), log_r_end), [math.log(y0), r0 * yp0 / y0],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    if sol.status != 0:
        raise StepFailure(f"limit equation: {sol.message}")
    return float(sol.y[1, -1])


def trajectory_table(problem: OdeProblem, trajectory: Trajectory, num_per_segment: int = 200):
    """Columns t, f, fp, h, Psi, PsiH0 sampled on the dense output."""
    return diagnostics_table(problem, *trajectory.sample(num_per_segment))


def diagnostics_table(problem: OdeProblem, t: np.ndarray, f: np.ndarray, fp: np.ndarray) -> dict:
    """Columns t, f, fp, h, Psi, PsiH0 for sampled states; endpoints and vertical slopes are dropped."""
    tr = problem.triple
    t, f, fp = np.asarray(t, float), np.asarray(f, float), np.asarray(fp, float)
    keep = (t > 0) & (t < 1) & np.isfinite(fp)
    t, f, fp = t[keep], f[keep], fp[keep]
    A = t - tr.alpha / t
    h = f - 0.5 * tr.g * A * fp
    ps = f * h - 1.0 / (tr.n - 2)
    if problem.H0:
        w = np.sqrt(1.0 + 0.25 * tr.g**2 * (1.0 - t * t) * fp * fp / (1.0 + f * f))
        psh = ps + problem.H0 / (tr.n - 2) * f * w
    else:
        psh = ps.copy()
    return {"t": t, "f": f, "fp": fp, "h": h, "Psi": ps, "PsiH0": psh}
