"""Shooting layers that turn profile integrations into capillary cones.

Type I cones cap a focal submanifold: the profile starts at t = 0 with
f(0) = a, f'(0) = 0 and is shot forward to its first zero. Type II cones are
strips between two regular leaves: the profile starts at a zero t1 < t_alpha
with the slope fixed by the contact angle and must reach a second zero with
the same angle.

Type I shots are integrated for the rescaled profile f / a, which solves the
same equation with lam -> lam a^2 and H0 -> H0 / a. This keeps the small-a
regime well conditioned and makes the one-phase limit a -> 0 a regular
perturbation of the linear equation.

The contact angle at a zero t of f is the angle theta with
(g/2) sqrt(1 - t^2) |f'(t)| = tan(theta).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._roots import bisect_predicate, bisect_sign
from .errors import BlowupError, DomainError, NoBracket, NonMonotone, NoSignChange
from .foliation import FoliationTriple, reflect, t_alpha
from .integrator import Outcome, StopSpec, Tag, Trajectory
from .profile_ode import (
    OdeProblem,
    ProfileState,
    integrate,
    series_start_at_zero,
)

__all__ = [
    "ProfileView",
    "AngleShot",
    "Blowup",
    "Type2Shot",
    "NoSecondZero",
    "CapillarySolution",
    "SweepRow",
    "SweepTable",
    "contact_quantity",
    "contact_angle",
    "type1_theta_of_a",
    "find_a_star",
    "type1_solve_for_theta",
    "type2_residual",
    "type2_solve",
    "type2_symmetric_solve",
    "sweep",
]

NEGATIVE_H0_RATIO = 0.1


def contact_quantity(t: float, slope: float) -> float:
    """sqrt(1 - t^2) |f'(t)|, which equals (2/g) tan(theta) at a capillary boundary."""
    return math.sqrt(max(0.0, 1.0 - t * t)) * abs(slope)


def contact_angle(g: int, t: float, slope: float) -> float:
    if math.isinf(slope):
        return 0.5 * math.pi
    return math.atan(0.5 * g * contact_quantity(t, slope))


@dataclass
class ProfileView:
    """Physical profile f(t) assembled from an integrated trajectory.

    ``scale`` undoes the Type I rescaling. ``mode`` is 'direct', 'reflected'
    (the trajectory lives in u = sqrt(1 - t^2)) or 'symmetric' (direct for
    t >= 1/sqrt(2), reflected below). ``head`` = (t0, a, b2) supplies the even
    series f = a + b2 t^2 below the first integrated point.
    """

    trajectory: Trajectory
    scale: float = 1.0
    mode: str = "direct"
    head: tuple[float, float, float] | None = None

    def _direct(self, t: float) -> tuple[float, float]:
        if self.head is not None and t < self.head[0]:
            _, a, b2 = self.head
            return a + b2 * t * t, 2.0 * b2 * t
        f, fp = self.trajectory.at(t)
        return self.scale * f, self.scale * fp

    def _reflected(self, t: float) -> tuple[float, float]:
        u = math.sqrt(max(0.0, 1.0 - t * t))
        f, fp = self._direct(u)
        return f, -fp * t / u

    def at(self, t: float) -> tuple[float, float]:
        if self.mode == "direct":
            return self._direct(t)
        if self.mode == "reflected" or t < math.sqrt(0.5):
            return self._reflected(t)
        return self._direct(t)

    def sample(self, num_per_segment: int = 200) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Samples (t, f, f') sorted by t."""
        x, f, fp = self.trajectory.sample(num_per_segment)
        keep = np.isfinite(x)
        x, f, fp = x[keep], self.scale * f[keep], self.scale * fp[keep]
        if self.head is not None:
            t0, a, b2 = self.head
            th = np.linspace(0.0, t0, 8, endpoint=False)
            x = np.concatenate([th, x])
            f = np.concatenate([a + b2 * th * th, f])
            fp = np.concatenate([2 * b2 * th, fp])
        if self.mode == "direct":
            t, ff, dd = x, f, fp
        else:
            u = x
            tr = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
            with np.errstate(divide="ignore", invalid="ignore"):
                dr = np.where(u > 0, -fp * tr / np.where(u > 0, u, 1.0), -np.copysign(np.inf, fp))
            if self.mode == "reflected":
                t, ff, dd = tr, f, dr
            else:
                t = np.concatenate([tr, x])
                ff = np.concatenate([f, f])
                dd = np.concatenate([dr, fp])
        order = np.argsort(t, kind="stable")
        return t[order], ff[order], dd[order]


@dataclass
class AngleShot:
    """A Type I shot that reached a zero; slope is the physical f'(t_zero)."""

    a: float
    theta: float
    t_zero: float
    slope: float
    outcome: Outcome
    view: ProfileView


@dataclass
class Blowup:
    """A shot that did not reach a zero (vertical tangent while positive, or no zero)."""

    parameter: float
    t_end: float
    f_end: float
    tag: Tag
    outcome: Outcome


@dataclass
class Type2Shot:
    t1: float
    R: float
    tau: float
    slope_tau: float
    slope_t1: float
    outcome: Outcome


@dataclass
class NoSecondZero:
    t1: float
    tag: Tag
    outcome: Outcome

    R = -math.inf


@dataclass
class CapillarySolution:
    """A converged capillary profile with its boundary data."""

    problem: OdeProblem
    kind: str
    parameter: float
    theta: float
    boundary: list[tuple[float, float]]
    residual: float
    view: ProfileView
    a_star: float | None = None
    notes: list[str] = field(default_factory=list)

    def contact_quantities(self) -> list[float]:
        return [math.inf if math.isinf(s) else contact_quantity(t, s) for t, s in self.boundary]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            **{k: v for k, v in self.problem.triple.to_json().items() if k != "formal"},
            "H0": self.problem.H0,
            "parameter": self.parameter,
            "theta": self.theta,
            "boundaries": [
                {"t": t, "slope": None if math.isinf(s) else s, "vertical": math.isinf(s)}
                for t, s in self.boundary
            ],
            "residual": self.residual,
        }
        if self.a_star is not None:
            out["a_star"] = self.a_star
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _check_h0(problem: OdeProblem, a: float, allow_negative_h0: bool) -> None:
    if problem.H0 < 0:
        if not allow_negative_h0:
            raise DomainError("negative H0 needs the experimental negative-H0 mode")
        if abs(problem.H0) >= NEGATIVE_H0_RATIO * a:
            raise DomainError(
                f"experimental negative H0 needs |H0| < {NEGATIVE_H0_RATIO} a, got H0 = {problem.H0}, a = {a}"
            )


def _rescaled(problem: OdeProblem, a: float, triple: FoliationTriple | None = None) -> OdeProblem:
    return OdeProblem(triple or problem.triple, problem.H0 / a, problem.lam * a * a)


def type1_theta_of_a(
    problem: OdeProblem,
    a: float,
    side: str = "M1",
    stop: StopSpec | None = None,
    allow_negative_h0: bool = False,
) -> AngleShot | Blowup:
    """Shoot the Type I profile with height a at the focal submanifold ``side``.

    The M2 family is the M1 family of the reflected foliation pulled back by
    t -> sqrt(1 - t^2).
    """
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    _check_h0(problem, a, allow_negative_h0)
    if side not in ("M1", "M2"):
        raise DomainError(f"side must be 'M1' or 'M2', got {side!r}")
    triple = problem.triple if side == "M1" else reflect(problem.triple)
    scaled = _rescaled(problem, a, triple)
    start = series_start_at_zero(scaled, 1.0)
    out = integrate(scaled, start, 1, stop)
    if out.tag is not Tag.REACHED_ZERO:
        return Blowup(a, out.x_end, a * out.f_end, out.tag, out)
    b2 = (start.f - 1.0) / (start.t * start.t)
    view = ProfileView(out.trajectory, a, "direct" if side == "M1" else "reflected",
                       (start.t, a, a * b2))
    u, slope = out.x_end, a * out.slope_end
    if side == "M2":
        t = math.sqrt(max(0.0, 1.0 - u * u))
        slope = slope if math.isinf(slope) else -slope * t / u
        u = t
    return AngleShot(a, contact_angle(problem.triple.g, u, slope), u, slope, out, view)


def find_a_star(
    problem: OdeProblem,
    a_lo: float = 1e-2,
    a_hi: float = 1.0,
    tol: float = 1e-10,
    side: str = "M1",
    stop: StopSpec | None = None,
    max_doublings: int = 40,
) -> tuple[float, float]:
    """Bracket [a_lo, a_hi] of the free-boundary height a* with width <= tol (relative).

    The lower end reaches a zero and the upper end does not.
    """

    def reaches(a: float) -> bool:
        return isinstance(type1_theta_of_a(problem, a, side, stop), AngleShot)

    if not reaches(a_lo):
        raise NoBracket(f"a_lo = {a_lo} does not reach a zero")
    for _ in range(max_doublings):
        if not reaches(a_hi):
            break
        a_lo, a_hi = a_hi, 2.0 * a_hi
    else:
        raise NoBracket(f"no blow-up observed up to a = {a_hi}")
    return bisect_predicate(reaches, a_lo, a_hi, tol)


def type1_solve_for_theta(
    problem: OdeProblem,
    theta: float,
    side: str = "M1",
    tol: float = 1e-8,
    a_star: tuple[float, float] | None = None,
    stop: StopSpec | None = None,
    scan: int = 12,
) -> CapillarySolution:
    """Type I cone with contact angle theta in (0, pi/2]."""
    if not 0.0 < theta <= 0.5 * math.pi:
        raise DomainError(f"theta must lie in (0, pi/2], got {theta}")
    g = problem.triple.g
    lo, hi = a_star or find_a_star(problem, side=side, stop=stop)
    kind = "TypeI_" + side
    if theta >= 0.5 * math.pi - 1e-15:
        shot = type1_theta_of_a(problem, lo, side, stop)
        return CapillarySolution(problem, kind, lo, 0.5 * math.pi, [(shot.t_zero, -math.inf)],
                                 hi - lo, shot.view, lo,
                                 [f"slope at the lower a* bracket {shot.slope:.6e}"])
    target = 2.0 / g * math.tan(theta)

    def residual(a: float) -> float:
        shot = type1_theta_of_a(problem, a, side, stop)
        if isinstance(shot, Blowup) or math.isinf(shot.slope):
            return math.inf
        return contact_quantity(shot.t_zero, shot.slope) - target

    a_min = lo * 1e-3
    while residual(a_min) >= 0:
        a_min *= 0.1
        if a_min < 1e-14 * lo:
            raise NoSignChange(f"theta = {theta} is below every sampled angle")
    grid = np.geomspace(a_min, lo, scan)
    vals = [residual(float(a)) for a in grid]
    changes = [i for i in range(scan - 1) if (vals[i] < 0) != (vals[i + 1] < 0)]
    notes = []
    if not changes:
        raise NonMonotone(f"no sign change of the angle residual on the a-grid for theta = {theta}")
    if len(changes) > 1:
        notes.append(f"theta(a) is not monotone: {len(changes)} crossings on the scan grid")
    i = changes[0]
    a = bisect_sign(residual, float(grid[i]), float(grid[i + 1]), vals[i], xtol=1e-15,
                    ftol=0.1 * tol)
    shot = type1_theta_of_a(problem, a, side, stop)
    res = abs(residual(a))
    if res > tol:
        raise NonMonotone(f"angle bisection stalled at residual {res:.3e}")
    return CapillarySolution(problem, kind, a, theta, [(shot.t_zero, shot.slope)], res, shot.view,
                             lo, notes)


def _type2_start(problem: OdeProblem, t1: float, theta: float) -> ProfileState:
    g = problem.triple.g
    return ProfileState(t1, 0.0, 2.0 / g * math.tan(theta) / math.sqrt(1.0 - t1 * t1))


def type2_residual(problem: OdeProblem, t1: float, theta: float,
                   stop: StopSpec | None = None) -> Type2Shot | NoSecondZero:
    """Shoot from a zero at t1 with contact angle theta and compare the angle at the next zero.

    R = (1 - t1^2) f'(t1)^2 - (1 - tau^2) f'(tau)^2.
    """
    ta = t_alpha(problem.triple)
    if not 0.0 < t1 < ta:
        raise DomainError(f"t1 = {t1} must lie in (0, t_alpha = {ta})")
    if not 0.0 < theta < 0.5 * math.pi:
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    start = _type2_start(problem, t1, theta)
    out = integrate(problem, start, 1, stop)
    if out.tag is not Tag.REACHED_ZERO or math.isinf(out.slope_end):
        return NoSecondZero(t1, out.tag, out)
    R = (1 - t1 * t1) * start.fp**2 - (1 - out.x_end**2) * out.slope_end**2
    return Type2Shot(t1, R, out.x_end, out.slope_end, start.fp, out)


def type2_solve(
    problem: OdeProblem,
    theta: float,
    tol: float = 1e-8,
    margin: float = 1e-3,
    scan: int = 24,
    stop: StopSpec | None = None,
) -> CapillarySolution:
    """Type II cone with contact angle theta at both boundary leaves."""
    ta = t_alpha(problem.triple)
    q = 2.0 / problem.triple.g * math.tan(theta)

    def R(t1: float) -> float:
        return type2_residual(problem, t1, theta, stop).R

    grid = np.linspace(margin, ta - margin, scan)
    vals = [R(float(t)) for t in grid]
    i = next((k for k in range(scan - 1) if vals[k] > 0 and vals[k + 1] <= 0), None)
    if i is None:
        raise NoSignChange(f"R[t1] has no sign change on [{grid[0]}, {grid[-1]}] for theta = {theta}")
    # |R| = |q - q2| (q + q2), so this R tolerance bounds the angle residual by tol / 10
    t1 = bisect_sign(R, float(grid[i]), float(grid[i + 1]), vals[i], xtol=1e-15, ftol=0.2 * q * tol)
    shot = type2_residual(problem, t1, theta, stop)
    if isinstance(shot, NoSecondZero):
        raise NoSignChange(f"bisection ended on a shot without second zero at t1 = {t1}")
    q2 = contact_quantity(shot.tau, shot.slope_tau)
    q1 = contact_quantity(t1, shot.slope_t1)
    res = max(abs(q1 - q), abs(q2 - q))
    view = ProfileView(shot.outcome.trajectory)
    sol = CapillarySolution(problem, "TypeII", t1, theta,
                            [(t1, shot.slope_t1), (shot.tau, shot.slope_tau)], res, view)
    if res > tol:
        sol.notes.append(f"boundary residual {res:.3e} above tolerance {tol:.1e}")
    return sol


def type2_symmetric_solve(problem: OdeProblem, a: float, stop: StopSpec | None = None,
                          allow_negative_h0: bool = False) -> CapillarySolution:
    """Symmetric Type II cone for m1 = m2 with height a on the minimal leaf t = 1/sqrt(2)."""
    tr = problem.triple
    if tr.m1 != tr.m2:
        raise DomainError(f"the symmetric solver needs m1 = m2, got {tr}")
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    _check_h0(problem, a, allow_negative_h0)
    scaled = _rescaled(problem, a)
    tc = math.sqrt(0.5)
    out = integrate(scaled, ProfileState(tc, 1.0, 0.0), 1, stop)
    if out.tag is not Tag.REACHED_ZERO:
        raise BlowupError(f"the shot from f(1/sqrt 2) = {a} ends with {out.tag.value} at t = {out.x_end}")
    t2, s2 = out.x_end, a * out.slope_end
    t1 = math.sqrt(max(0.0, 1.0 - t2 * t2))
    s1 = -s2 * t1 / t2
    view = ProfileView(out.trajectory, a, "symmetric")
    res = abs(contact_quantity(t1, s1) - contact_quantity(t2, s2))
    return CapillarySolution(problem, "TypeII_Symmetric", a, contact_angle(tr.g, t2, s2),
                             [(t1, s1), (t2, s2)], res, view)


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    theta: float | None
    t_zeros: tuple[float, ...]
    slopes: tuple[float, ...]
    tag: str


@dataclass
class SweepTable:
    kind: str
    problem: OdeProblem
    rows: list[SweepRow]
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            **{k: v for k, v in self.problem.triple.to_json().items() if k != "formal"},
            "H0": self.problem.H0,
            "rows": [
                {
                    "parameter": r.parameter,
                    "theta": r.theta,
                    "t_zeros": list(r.t_zeros),
                    "slopes": [None if math.isinf(s) else s for s in r.slopes],
                    "tag": r.tag,
                }
                for r in self.rows
            ],
            "flags": list(self.flags),
        }


def _sweep_row(problem: OdeProblem, kind: str, value: float, theta: float | None,
               stop: StopSpec | None) -> SweepRow:
    if kind == "type1":
        shot = type1_theta_of_a(problem, value, stop=stop)
        if isinstance(shot, Blowup):
            return SweepRow(value, None, (), (), shot.tag.value)
        return SweepRow(value, shot.theta, (shot.t_zero,), (shot.slope,), Tag.REACHED_ZERO.value)
    if kind == "type2":
        shot = type2_residual(problem, value, theta, stop)
        if isinstance(shot, NoSecondZero):
            return SweepRow(value, theta, (value,), (), "NoSecondZero")
        return SweepRow(value, theta, (value, shot.tau), (shot.slope_t1, shot.slope_tau),
                        Tag.REACHED_ZERO.value)
    if kind == "type2_symmetric":
        try:
            sol = type2_symmetric_solve(problem, value, stop)
        except BlowupError:
            return SweepRow(value, None, (), (), Tag.DERIVATIVE_BLOWUP.value)
        return SweepRow(value, sol.theta, tuple(t for t, _ in sol.boundary),
                        tuple(s for _, s in sol.boundary), Tag.REACHED_ZERO.value)
    raise DomainError(f"unknown sweep kind {kind!r}")


def sweep(
    problem: OdeProblem,
    grid: Iterable[float],
    kind: str = "type1",
    theta: float | None = None,
    jobs: int = 1,
    stop: StopSpec | None = None,
) -> SweepTable:
    """Tabulate a shooting family over a parameter grid.

    ``kind`` is 'type1' and 'type2_symmetric' (parameter a) or 'type2'
    (parameter t1 at fixed ``theta``). Non-monotone angles are flagged.
    """
    values = sorted(float(v) for v in grid)
    if kind == "type2" and theta is None:
        raise DomainError("a type2 sweep needs theta")
    args = [(problem, kind, v, theta, stop) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, *zip(*args)))
    else:
        rows = [_sweep_row(*x) for x in args]
    table = SweepTable(kind, problem, rows)
    if kind != "type2":
        thetas = [r.theta for r in rows if r.theta is not None]
        drops = sum(1 for x, y in zip(thetas, thetas[1:]) if y < x)
        if drops:
            table.flags.append(f"theta decreases {drops} time(s) along the grid")
    tags = [r.tag == Tag.REACHED_ZERO.value for r in rows]
    switches = sum(1 for x, y in zip(tags, tags[1:]) if x != y)
    if switches > 1:
        table.flags.append(f"reach-zero and no-zero rows interleave ({switches} interfaces)")
    return table

