"""The axisymmetric profile equation in the ambient height variable xi = x_n / |x|.

For O(n-1)-invariant cones the profile f(xi) lives on the two-sided interval
xi in (-1, 1) and solves

    f'' = -(f - xi f') ((n-1)/(1-xi^2) + (n-2) f'^2/(1+f^2))
          - H0/(1-xi^2) (1 + (1-xi^2) f'^2/(1+f^2))^{3/2}.

It has the first integral

    W = (1-xi^2)^{(n-1)/2} (1+f^2)^{-(n-1)/2} (sqrt(1+f^2) (f - xi f')/w + H0/(n-1)),

with w = sqrt(1 + f^2 + (1-xi^2) f'^2). The contact angle at a zero is
arctan(sqrt(1-xi^2) |f'|), matching the g = 1 isoparametric picture under
xi = 1 - 2 t^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._roots import bisect_predicate, bisect_sign
from .errors import DomainError, NoBracket, NoSignChange
from .integrator import Outcome, StopSpec, Tag, Trajectory, shoot

__all__ = [
    "AxisymState",
    "AxisymSolution",
    "EvennessReport",
    "axisym_rhs",
    "axisym_rhs_hodograph",
    "conserved_W",
    "conserved_W_hodograph",
    "conserved_W_samples",
    "axisym_shoot",
    "shot_from_center",
    "reaches_zero_from_center",
    "threshold_scan",
    "capillary_shot",
    "capillary_solve",
    "verify_even",
    "from_isoparametric",
    "trajectory_table",
]

XI_EPS = 1e-6


def _stop(stop: StopSpec | None) -> StopSpec:
    if stop is not None:
        return stop
    return StopSpec(x_min=-1.0 + XI_EPS, x_max=1.0 - XI_EPS)


def axisym_rhs(n: int, H0: float, xi: float, f: float, fp: float) -> float:
    """f'' from the axisymmetric equation."""
    q = 1.0 - xi * xi
    if q <= 0.0:
        raise DomainError(f"xi = {xi} is outside (-1, 1)")
    h = f - xi * fp
    out = -h * ((n - 1) / q + (n - 2) * fp * fp / (1.0 + f * f))
    if H0:
        out -= H0 / q * (1.0 + q * fp * fp / (1.0 + f * f)) ** 1.5
    return out


def axisym_rhs_hodograph(n: int, H0: float, xi: float, f: float, p: float, sign: float) -> float:
    """dp/df for p = dxi/df, written without negative powers of p."""
    q = 1.0 - xi * xi
    K = q / (1.0 + f * f)
    p3fpp = -(f * p - xi) * ((n - 1) * p * p / q + (n - 2) / (1.0 + f * f))
    if H0:
        p3fpp -= H0 / q * sign * (p * p + K) ** 1.5
    return -p3fpp


def conserved_W(n: int, H0: float, xi: float, f: float, fp: float) -> float:
    """The first integral W of the axisymmetric equation."""
    q = 1.0 - xi * xi
    if q <= 0.0:
        raise DomainError(f"xi = {xi} is outside (-1, 1)")
    s = 1.0 + f * f
    if abs(fp) > 1.0:
        # divide through by |f'| so steep states do not overflow
        ratio = (f / fp - xi) * math.copysign(1.0, fp) / math.sqrt(s / (fp * fp) + q)
    else:
        ratio = (f - xi * fp) / math.sqrt(s + q * fp * fp)
    return (q / s) ** ((n - 1) / 2.0) * (math.sqrt(s) * ratio + H0 / (n - 1))


def conserved_W_hodograph(n: int, H0: float, xi: float, f: float, p: float,
                          sign: float | None = None) -> float:
    """W in the hodograph chart p = 1/f'; ``sign`` is the sign of f' on the branch."""
    q = 1.0 - xi * xi
    s = 1.0 + f * f
    sign = math.copysign(1.0, p) if sign is None else sign
    ratio = (f * p - xi) * sign / math.sqrt(s * p * p + q)
    return (q / s) ** ((n - 1) / 2.0) * (math.sqrt(s) * ratio + H0 / (n - 1))


def conserved_W_samples(n: int, H0: float, outcome: Outcome,
                        num_per_segment: int = 300) -> tuple[np.ndarray, np.ndarray]:
    """(xi, W) along a shot, evaluated chart by chart so vertical tangents stay regular."""
    xs, ws = [], []
    for seg in outcome.trajectory.segments:
        s = np.linspace(seg.s0, seg.s1, num_per_segment)
        y = seg.sol(s)
        if seg.mode == "x":
            xs.append(s)
            ws.append([conserved_W(n, H0, a, b, c) for a, b, c in zip(s, y[0], y[1])])
        else:
            sign = math.copysign(1.0, float(seg.sol(seg.s0)[1]))
            xs.append(y[0])
            ws.append([conserved_W_hodograph(n, H0, a, b, c, sign) for a, b, c in zip(y[0], s, y[1])])
    return np.concatenate(xs), np.concatenate([np.asarray(w, dtype=float) for w in ws])


@dataclass(frozen=True)
class AxisymState:
    """A point (xi, f, f') with the auxiliary quantities of the uniqueness argument."""

    xi: float
    f: float
    fp: float

    @property
    def h(self) -> float:
        return self.f - self.xi * self.fp

    @property
    def u(self) -> float:
        return (self.xi**2 + self.f**2) / (1.0 + self.f**2)

    @property
    def theta_polar(self) -> float:
        return math.atan2(self.f, self.xi)

    @property
    def W(self) -> float:
        return math.sqrt(1.0 + self.f**2 + (1.0 - self.xi**2) * self.fp**2)

    @property
    def D(self) -> float:
        return math.sqrt(1.0 + self.f**2) * self.h / self.W

    @property
    def x(self) -> float:
        u = self.u
        return math.sqrt(u / (1.0 - u))

    @property
    def z(self) -> float:
        return self.D / self.x

    def u_prime(self) -> float:
        s = 1.0 + self.f**2
        return 2.0 * (self.xi * s + (1.0 - self.xi**2) * self.f * self.fp) / s**2

    def conserved(self, n: int, H0: float = 0.0) -> float:
        return conserved_W(n, H0, self.xi, self.f, self.fp)


def axisym_shoot(n: int, H0: float, xi0: float, f0: float, fp0: float, direction: int = 1,
                 stop: StopSpec | None = None, theta0: float | None = None) -> Outcome:
    """Integrate the axisymmetric equation, carrying the polar angle by quadrature."""
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    th0 = math.atan2(f0, xi0) if theta0 is None else theta0
    return shoot(
        lambda x, f, fp: axisym_rhs(n, H0, x, f, fp),
        lambda x, f, p, s: axisym_rhs_hodograph(n, H0, x, f, p, s),
        xi0, f0, fp0, direction, _stop(stop),
        quad_x=lambda x, f, fp: (-(f - x * fp) / (x * x + f * f),),
        quad_f=lambda x, f, p: (-(f * p - x) / (x * x + f * f),),
        q0=(th0,),
    )


def shot_from_center(n: int, a: float, H0: float = 0.0, stop: StopSpec | None = None) -> Outcome:
    """Even shot f(0) = a, f'(0) = 0 towards xi -> 1."""
    return axisym_shoot(n, H0, 0.0, a, 0.0, 1, stop)


def reaches_zero_from_center(n: int, a: float, H0: float = 0.0, stop: StopSpec | None = None) -> bool:
    return shot_from_center(n, a, H0, stop).tag is Tag.REACHED_ZERO


def threshold_scan(n: int, a_lo: float = 0.05, a_hi: float = 2.0, tol: float = 1e-10,
                   stop: StopSpec | None = None) -> float:
    """Largest height a for which the even minimal shot from xi = 0 reaches a zero."""
    if n < 4:
        raise DomainError(f"threshold_scan needs n >= 4, got {n}")
    if not reaches_zero_from_center(n, a_lo, 0.0, stop):
        raise NoBracket(f"a_lo = {a_lo} does not reach a zero")
    if reaches_zero_from_center(n, a_hi, 0.0, stop):
        raise NoBracket(f"a_hi = {a_hi} still reaches a zero")
    lo, _ = bisect_predicate(lambda a: reaches_zero_from_center(n, a, 0.0, stop), a_lo, a_hi, tol)
    return lo


@dataclass
class CapillaryShot:
    xi1: float
    slope1: float
    outcome: Outcome
    xi2: float | None = None
    slope2: float | None = None

    @property
    def R(self) -> float:
        if self.xi2 is None:
            return -math.inf
        return (1 - self.xi1**2) * self.slope1**2 - (1 - self.xi2**2) * self.slope2**2


def capillary_shot(n: int, xi1: float, theta: float, H0: float = 0.0,
                   stop: StopSpec | None = None) -> CapillaryShot:
    """Shoot from a zero at xi1 with contact angle theta and record the next zero."""
    if not -1.0 < xi1 < 1.0:
        raise DomainError(f"xi1 = {xi1} is outside (-1, 1)")
    s1 = math.tan(theta) / math.sqrt(1.0 - xi1 * xi1)
    out = axisym_shoot(n, H0, xi1, 0.0, s1, 1, stop, theta0=0.0)
    if out.tag is Tag.REACHED_ZERO and math.isfinite(out.slope_end):
        return CapillaryShot(xi1, s1, out, out.x_end, out.slope_end)
    return CapillaryShot(xi1, s1, out)


@dataclass
class AxisymSolution:
    n: int
    H0: float
    theta: float
    xi1: float
    xi2: float
    slope1: float
    slope2: float
    residual: float
    trajectory: Trajectory
    notes: list[str] = field(default_factory=list)

    def at(self, xi: float) -> tuple[float, float]:
        return self.trajectory.at(xi)

    def to_json(self) -> dict:
        return {
            "kind": "AxisymTypeII",
            "n": self.n,
            "H0": self.H0,
            "theta": self.theta,
            "boundaries": [{"xi": self.xi1, "slope": self.slope1},
                           {"xi": self.xi2, "slope": self.slope2}],
            "residual": self.residual,
            "notes": list(self.notes),
        }


def capillary_solve(n: int, theta: float, H0: float = 0.0, scan: int = 40, tol: float = 1e-10,
                    stop: StopSpec | None = None) -> AxisymSolution:
    """Two-sided capillary profile with angle theta at both zeros, found without assuming symmetry.

    The first zero xi1 ranges over (-1, 0); shots without a second zero count
    as R = -inf. The first sign change from the left is bisected.
    """
    if not 0.0 < theta < 0.5 * math.pi:
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")

    def R(x: float) -> float:
        return capillary_shot(n, x, theta, H0, stop).R

    grid = np.linspace(-0.98, -0.02, scan)
    vals = [R(float(x)) for x in grid]
    i = next((k for k in range(scan - 1) if (vals[k] > 0) != (vals[k + 1] > 0)), None)
    if i is None:
        raise NoSignChange(f"no sign change of R on the xi1 grid for theta = {theta}")
    q = math.tan(theta)
    x1 = bisect_sign(R, float(grid[i]), float(grid[i + 1]), vals[i], xtol=1e-15, ftol=q * tol)
    shot = capillary_shot(n, x1, theta, H0, stop)
    if shot.xi2 is None:
        raise NoSignChange(f"bisection ended on a shot without second zero at xi1 = {x1}")
    q2 = math.sqrt(1 - shot.xi2**2) * abs(shot.slope2)
    return AxisymSolution(n, H0, theta, x1, shot.xi2, shot.slope1, shot.slope2, abs(q2 - q),
                          shot.outcome.trajectory)


@dataclass(frozen=True)
class EvennessReport:
    xi_sum: float
    slope_at_zero: float
    max_asymmetry: float
    weighted_slope_gap: float
    tol: float

    @property
    def even(self) -> bool:
        return max(self.xi_sum, self.slope_at_zero, self.max_asymmetry) <= self.tol

    def to_json(self) -> dict:
        return {"xi_sum": self.xi_sum, "slope_at_zero": self.slope_at_zero,
                "max_asymmetry": self.max_asymmetry, "weighted_slope_gap": self.weighted_slope_gap,
                "even": self.even}


def verify_even(solution: AxisymSolution, tol: float = 1e-6, samples: int = 201) -> EvennessReport:
    """Measure how far a two-zero solution is from being even in xi."""
    x1, x2 = solution.xi1, solution.xi2
    gap = abs((1 - x1**2) * solution.slope1**2 - (1 - x2**2) * solution.slope2**2)
    lo, hi = solution.trajectory.x_range()
    if not lo <= 0.0 <= hi:
        return EvennessReport(abs(x1 + x2), math.inf, math.inf, gap, tol)
    _, fp0 = solution.at(0.0)
    reach = min(-lo, hi) * (1 - 1e-9)
    asym = 0.0
    for x in np.linspace(0.0, reach, samples):
        asym = max(asym, abs(solution.at(float(x))[0] - solution.at(-float(x))[0]))
    return EvennessReport(abs(x1 + x2), abs(fp0), asym, gap, tol)


def from_isoparametric(t: float, f: float, fp: float) -> AxisymState:
    """Map a g = 1 isoparametric state (t, f, f'_t) to xi = 1 - 2 t^2."""
    return AxisymState(1.0 - 2.0 * t * t, f, fp / (-4.0 * t))


def trajectory_table(n: int, H0: float, source: Outcome | Trajectory, num_per_segment: int = 200) -> dict:
    """Columns xi, f, fp, h, u, thetaPolar, Wcal, z on the dense output of a shot or trajectory."""
    traj = source.trajectory if isinstance(source, Outcome) else source
    xi, f, fp = traj.sample(num_per_segment)
    theta = traj.sample_quad(num_per_segment)[0]
    keep = np.isfinite(fp) & (np.abs(xi) < 1.0)
    xi, f, fp, theta = xi[keep], f[keep], fp[keep], theta[keep]
    states = [AxisymState(float(a), float(b), float(c)) for a, b, c in zip(xi, f, fp)]
    W = np.array([conserved_W(n, H0, s.xi, s.f, s.fp) for s in states])
    z = np.array([s.z if s.u > 0 else 0.0 for s in states])
    return {"xi": xi, "f": f, "fp": fp, "h": f - xi * fp,
            "u": (xi**2 + f**2) / (1 + f**2), "thetaPolar": theta, "Wcal": W, "z": z}
