"""Shooting engine for second-order profile equations with vertical tangents.

Profiles f(x) of capillary cones can develop vertical tangents: the slope
blows up like |x - x*|^{-1/2} either at a zero of f or while f > 0. A plain
integration in x cannot resolve this, so the engine switches to the
hodograph form once |f'| exceeds ``switch_slope``: x becomes a function of
f with ``dx/df = p = 1/f'`` and ``dp/df = -p^3 f''``, which stays regular
through the vertical tangent. It switches back once |f'| drops below
``return_slope``. A zero of f is detected in either chart. Once |f'| reaches
``slope_cap`` the chart is continued to the exact tangent p = 0: a tangent
with f > 0 is reported as a blow-up, one at f = 0 as a zero of infinite slope.

The caller supplies the equation twice: ``rhs_x(x, f, fp) -> f''`` and
``rhs_f(x, f, p, sign) -> dp/df``. ``sign`` is the sign of p on the current
hodograph segment and lets the caller write |f'|^3-type terms smoothly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

__all__ = ["Tag", "StopSpec", "Segment", "Trajectory", "Outcome", "shoot"]


class Tag(str, Enum):
    REACHED_ZERO = "ReachedZero"
    DERIVATIVE_BLOWUP = "DerivativeBlowup"
    REACHED_FOCAL = "ReachedFocalOne"
    STILL_POSITIVE = "StillPositive"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class StopSpec:
    """Integration controls. ``x_min``/``x_max`` bound the independent coordinate."""

    x_min: float = 1e-6
    x_max: float = 1.0 - 1e-6
    slope_cap: float = 1e8
    rtol: float = 1e-10
    atol: float = 1e-12
    switch_slope: float = 20.0
    return_slope: float = 5.0
    f_max: float = 1e6
    max_steps: int = 1_000_000
    max_segments: int = 200
    method: str = "DOP853"


@dataclass
class Segment:
    """One chart of a trajectory: ``mode`` is 'x' (state f, f') or 'f' (state x, p)."""

    mode: str
    s0: float
    s1: float
    sol: object
    extra: int = 0

    def _states(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = self.sol(s)
        if self.mode == "x":
            return s, y[0], y[1]
        with np.errstate(divide="ignore"):
            return y[0], s, 1.0 / y[1]

    def sample(self, num: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = np.linspace(self.s0, self.s1, num)
        return self._states(s)

    def quad(self, s: np.ndarray) -> np.ndarray:
        return self.sol(s)[2:]

    @property
    def x_range(self) -> tuple[float, float]:
        if self.mode == "x":
            return min(self.s0, self.s1), max(self.s0, self.s1)
        x0 = float(self.sol(self.s0)[0])
        x1 = float(self.sol(self.s1)[0])
        return min(x0, x1), max(x0, x1)

    def param_at_x(self, x: float) -> float:
        """Parameter value of this segment whose x-coordinate equals x."""
        if self.mode == "x":
            return x
        lo, hi = self.s0, self.s1
        xlo = float(self.sol(lo)[0]) - x
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            xm = float(self.sol(mid)[0]) - x
            if (xm > 0) == (xlo > 0):
                lo, xlo = mid, xm
            else:
                hi = mid
            if abs(hi - lo) <= 1e-15 * max(1.0, abs(lo)):
                break
        return 0.5 * (lo + hi)


@dataclass
class Trajectory:
    """Dense representation of a shot as a chain of segments."""

    segments: list[Segment] = field(default_factory=list)

    def sample(self, num_per_segment: int = 200) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xs, fs, ps = [], [], []
        for seg in self.segments:
            x, f, p = seg.sample(num_per_segment)
            xs.append(x)
            fs.append(f)
            ps.append(p)
        if not xs:
            return np.empty(0), np.empty(0), np.empty(0)
        return np.concatenate(xs), np.concatenate(fs), np.concatenate(ps)

    def sample_quad(self, num_per_segment: int = 200) -> np.ndarray:
        out = []
        for seg in self.segments:
            s = np.linspace(seg.s0, seg.s1, num_per_segment)
            out.append(seg.quad(s))
        return np.concatenate(out, axis=1)

    def x_range(self) -> tuple[float, float]:
        lo, hi = math.inf, -math.inf
        for seg in self.segments:
            a, b = seg.x_range
            lo, hi = min(lo, a), max(hi, b)
        return lo, hi

    def at(self, x: float) -> tuple[float, float]:
        """Return (f, f') at coordinate x, preferring the x-chart when segments overlap."""
        best = None
        for seg in self.segments:
            a, b = seg.x_range
            if a - 1e-15 <= x <= b + 1e-15:
                if seg.mode == "x":
                    y = seg.sol(x)
                    return float(y[0]), float(y[1])
                best = seg
        if best is None:
            raise ValueError(f"x = {x} is outside the trajectory range {self.x_range()}")
        s = best.param_at_x(x)
        y = best.sol(s)
        return s, (1.0 / float(y[1]) if y[1] != 0 else math.copysign(math.inf, 1.0))

    def quad_at(self, x: float) -> np.ndarray:
        for seg in self.segments:
            a, b = seg.x_range
            if a - 1e-15 <= x <= b + 1e-15:
                s = seg.param_at_x(x)
                return seg.quad(np.array([s]))[:, 0]
        raise ValueError(f"x = {x} is outside the trajectory range")


@dataclass
class Outcome:
    """Terminal classification of a shot.

    ``x_end``, ``f_end`` and ``slope_end`` describe the terminal point: the zero
    and its slope for ReachedZero, the vertical tangent for DerivativeBlowup and
    the last state otherwise. ``slope_end`` is infinite when the zero is reached
    with a vertical tangent.
    """

    tag: Tag
    x_end: float
    f_end: float
    slope_end: float
    trajectory: Trajectory
    message: str = ""


QuadFn = Callable[[float, float, float], Sequence[float]]


def shoot(
    rhs_x: Callable[[float, float, float], float],
    rhs_f: Callable[[float, float, float, float], float],
    x0: float,
    f0: float,
    fp0: float,
    direction: int,
    stop: StopSpec,
    quad_x: QuadFn | None = None,
    quad_f: QuadFn | None = None,
    q0: Sequence[float] = (),
) -> Outcome:
    """Integrate from (x0, f0, fp0) in the given x-direction until a terminal event.

    Optional quadratures q' = quad_x(x, f, f') are carried along; in the
    hodograph chart ``quad_f(x, f, p)`` must return dq/df = p quad_x.
    """
    direction = 1 if direction >= 0 else -1
    x_end = stop.x_max if direction > 0 else stop.x_min
    traj = Trajectory()
    q = list(q0)
    nq = len(q)
    x, f, fp = x0, f0, fp0
    mode = "x" if abs(fp) < stop.switch_slope else "f"
    steps_left = stop.max_steps

    for _ in range(stop.max_segments):
        if mode == "x":

            def fun_x(s, y):
                d = [y[1], rhs_x(s, y[0], y[1])]
                if nq:
                    d.extend(quad_x(s, y[0], y[1]))
                return d

            def ev_zero(s, y):
                return y[0]

            ev_zero.terminal = True
            ev_zero.direction = -1

            def ev_steep(s, y):
                return abs(y[1]) - stop.switch_slope

            ev_steep.terminal = True
            ev_steep.direction = 1

            if (x_end - x) * direction <= 0:
                return Outcome(Tag.REACHED_FOCAL, x, f, fp, traj, "started at the coordinate bound")
            sol = solve_ivp(
                fun_x, (x, x_end), [f, fp, *q], method=stop.method, rtol=stop.rtol,
                atol=stop.atol, dense_output=True, events=[ev_zero, ev_steep],
            )
            steps_left -= len(sol.t)
            if sol.status == -1 or steps_left <= 0:
                if sol.t.size > 1:
                    traj.segments.append(Segment("x", x, float(sol.t[-1]), sol.sol, nq))
                return Outcome(Tag.STEP_FAILURE, float(sol.t[-1]), float(sol.y[0, -1]),
                               float(sol.y[1, -1]), traj, sol.message)
            xe = float(sol.t[-1])
            traj.segments.append(Segment("x", x, xe, sol.sol, nq))
            if sol.t_events[0].size:
                xz = float(sol.t_events[0][0])
                yz = sol.y_events[0][0]
                xz = _polish_zero(sol.sol, x, xz, float(yz[0]))
                traj.segments[-1].s1 = xz
                y = sol.sol(xz)
                return Outcome(Tag.REACHED_ZERO, xz, float(y[0]), float(y[1]), traj)
            if sol.t_events[1].size:
                ys = sol.y_events[1][0]
                x, f, fp = xe, float(ys[0]), float(ys[1])
                q = list(ys[2:])
                mode = "f"
                continue
            y = sol.y[:, -1]
            return Outcome(Tag.REACHED_FOCAL, xe, float(y[0]), float(y[1]), traj)

        # hodograph chart: independent variable f, state (x, p, q...)
        p = 1.0 / fp
        sign = 1.0 if p > 0 else -1.0
        fdir = sign * direction
        f_target = 0.0 if fdir < 0 else stop.f_max
        if f_target == f:
            return Outcome(Tag.REACHED_ZERO, x, f, fp, traj)

        def fun_f(s, y, sign=sign):
            d = [y[1], rhs_f(y[0], s, y[1], sign)]
            if nq:
                d.extend(quad_f(y[0], s, y[1]))
            return d

        def ev_blow(s, y, sign=sign):
            return sign * y[1] * stop.slope_cap - 1.0

        ev_blow.terminal = True
        ev_blow.direction = -1

        def ev_flat(s, y, sign=sign):
            return sign * y[1] * stop.return_slope - 1.0

        ev_flat.terminal = True
        ev_flat.direction = 1

        def ev_bound(s, y):
            return (y[0] - x_end) * direction

        ev_bound.terminal = True
        ev_bound.direction = 1

        sol = solve_ivp(
            fun_f, (f, f_target), [x, p, *q], method=stop.method, rtol=stop.rtol,
            atol=stop.atol, dense_output=True, events=[ev_blow, ev_flat, ev_bound],
        )
        steps_left -= len(sol.t)
        fe = float(sol.t[-1])
        if sol.status == -1 or steps_left <= 0:
            if sol.t.size > 1:
                traj.segments.append(Segment("f", f, fe, sol.sol, nq))
            return Outcome(Tag.STEP_FAILURE, float(sol.y[0, -1]), fe,
                           1.0 / float(sol.y[1, -1]), traj, sol.message)
        traj.segments.append(Segment("f", f, fe, sol.sol, nq))
        if sol.t_events[0].size:
            return _resolve_tangent(fun_f, fe, sol.y_events[0][0], sign, fdir, stop, traj, nq)
        if sol.t_events[1].size:
            yf = sol.y_events[1][0]
            x, f, fp = float(yf[0]), fe, 1.0 / float(yf[1])
            q = list(yf[2:])
            mode = "x"
            continue
        if sol.t_events[2].size:
            yb = sol.y_events[2][0]
            return Outcome(Tag.REACHED_FOCAL, float(yb[0]), fe, 1.0 / float(yb[1]), traj)
        y = sol.y[:, -1]
        if fdir < 0:
            slope = 1.0 / float(y[1]) if y[1] != 0 else -sign * math.inf
            return Outcome(Tag.REACHED_ZERO, float(y[0]), 0.0, slope, traj)
        return Outcome(Tag.STILL_POSITIVE, float(y[0]), fe, 1.0 / float(y[1]), traj,
                       "height exceeded f_max")
    return Outcome(Tag.STEP_FAILURE, x, f, fp, traj, "segment limit reached")


def _resolve_tangent(fun_f, fe, ye, sign, fdir, stop, traj, nq) -> Outcome:
    """Continue the hodograph chart from the slope cap to the vertical tangent p = 0.

    The chart is regular there, so this pins down the tangent point and tells
    apart a tangent with f > 0 from a zero whose slope merely exceeds the cap.
    """
    x_e, p_e = float(ye[0]), float(ye[1])
    dp = fun_f(fe, ye)[1]
    span = 10.0 * abs(p_e / dp) if dp else 1e-6
    f_stop = fe + fdir * span
    if fdir < 0 and f_stop < 0:
        f_stop = 0.0

    def ev_vertical(s, y):
        return sign * y[1]

    ev_vertical.terminal = True
    ev_vertical.direction = -1
    sol = solve_ivp(fun_f, (fe, f_stop), list(ye), method=stop.method, rtol=stop.rtol,
                    atol=stop.atol, dense_output=True, events=[ev_vertical])
    if sol.t.size > 1:
        traj.segments.append(Segment("f", fe, float(sol.t[-1]), sol.sol, nq))
    if sol.t_events[0].size:
        yb = sol.y_events[0][0]
        fb = float(sol.t_events[0][0])
        if fb <= 0.0 and fdir < 0:
            return Outcome(Tag.REACHED_ZERO, float(yb[0]), 0.0, -sign * math.inf, traj)
        return Outcome(Tag.DERIVATIVE_BLOWUP, float(yb[0]), fb, sign * fdir * math.inf, traj)
    y = sol.y[:, -1]
    if fdir < 0 and float(sol.t[-1]) <= 0.0:
        return Outcome(Tag.REACHED_ZERO, float(y[0]), 0.0, 1.0 / float(y[1]), traj)
    # the tangent was not reached within the span: report the capped state
    return Outcome(Tag.DERIVATIVE_BLOWUP, float(y[0]), float(sol.t[-1]), 1.0 / float(y[1]), traj,
                   "vertical tangent extrapolated from the slope cap")


def _polish_zero(dense, x_start: float, xz: float, fz: float, tol: float = 1e-12) -> float:
    """Bisect the dense interpolant until |f| <= tol around the detected zero."""
    if abs(fz) <= tol:
        return xz
    width = max(1e-9, 1e-6 * abs(xz - x_start))
    lo, hi = xz - width, xz + width
    flo = float(dense(lo)[0])
    fhi = float(dense(hi)[0])
    if (flo > 0) == (fhi > 0):
        return xz
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = float(dense(mid)[0])
        if abs(fm) <= tol or hi - lo <= 1e-16:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
