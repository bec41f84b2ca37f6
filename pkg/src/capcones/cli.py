"""Command-line front end: ``capcones <command> ...``.

Every command writes deterministic JSON and CSV files to ``--out`` (or the
directory named by CAPCONES_OUT) and prints a one-line summary. CSV values
carry 17 significant digits; JSON floats use Python's shortest round-trip
form, and non-finite values become null.

Exit codes: 0 success, 1 failed gate or residual above tolerance, 2 invalid
input (non-admissible triple, domain error), 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import axisym, shooting, topology
from ._battery import run_battery
from .errors import (
    BlowupError,
    DomainError,
    MissingOtFkmParams,
    NoBracket,
    NoConvergence,
    NonAdmissible,
    NonIntegralDimension,
    NonMonotone,
    NoSignChange,
    NotOtFkm,
    StepFailure,
    Unsupported,
    WrongG,
)
from .foliation import validate
from .integrator import StopSpec
from .profile_ode import OdeProblem, diagnostics_table, limit_growth_exponent, solve_limit_equation
from .specfun import f_M_derivatives, limit_inverse_from_data, limit_inverse_r, t_M_zero

__all__ = ["RunConfig", "build_parser", "main"]

INPUT_ERRORS = (NonAdmissible, NonIntegralDimension, DomainError, WrongG, NotOtFkm,
                MissingOtFkmParams, Unsupported)
SOLVER_ERRORS = (NoBracket, NoSignChange, NonMonotone, BlowupError, StepFailure, NoConvergence)


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output."""

    command: str
    g: int | None = None
    m1: int | None = None
    m2: int | None = None
    H0: float = 0.0
    lam: float = 1.0
    tol_rel: float = 1e-10
    tol_abs: float = 1e-12
    slope_cap: float = 1e8
    tol: float = 1e-8
    out: str = "."

    def __post_init__(self) -> None:
        for name in ("tol_rel", "tol_abs", "slope_cap", "tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def stop(self, **kw) -> StopSpec:
        return StopSpec(rtol=self.tol_rel, atol=self.tol_abs, slope_cap=self.slope_cap, **kw)

    def problem(self) -> OdeProblem:
        return OdeProblem(validate(self.g, self.m1, self.m2), self.H0, self.lam)

    def to_json(self) -> dict:
        # the output directory is left out so reruns elsewhere stay byte-identical
        return {k: v for k, v in asdict(self).items() if k != "out"}


# ---- output ----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_json(path: Path, obj) -> None:
    path.write_text(dumps(obj), encoding="utf-8")


def write_csv(path: Path, columns: dict[str, Sequence[float]]) -> None:
    names = list(columns)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*(columns[k] for k in names)):
            w.writerow([fmt(v) for v in row])


def write_polyline(path: Path, label: str, x: Sequence[float], y: Sequence[float],
                   axes: tuple[str, str]) -> None:
    pts = [(float(a), float(b)) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b)]
    write_json(path, {"label": label, "x_label": axes[0], "y_label": axes[1],
                      "points": " ".join(f"{fmt(a)},{fmt(b)}" for a, b in pts)})


def write_plot(path: str, label: str, x: Sequence[float], y: Sequence[float],
               axes: tuple[str, str]) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise Unsupported("--plot needs matplotlib (pip install artifact[plot])") from exc
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, lw=1.2)
    ax.set_xlabel(axes[0])
    ax.set_ylabel(axes[1])
    ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)


def out_dir(args) -> Path:
    d = Path(os.environ.get("CAPCONES_OUT") or args.out or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _angle(args, value: float | None) -> float | None:
    if value is None:
        return None
    return math.radians(value) if args.deg else value


def _config(args, command: str, **extra) -> RunConfig:
    return RunConfig(command, getattr(args, "g", None), getattr(args, "m1", None),
                     getattr(args, "m2", None), getattr(args, "h0", 0.0) or 0.0,
                     getattr(args, "lam", 1.0), args.tol_rel, args.tol_abs, args.slope_cap,
                     getattr(args, "tol", 1e-8), str(out_dir(args)), **extra)


def _emit_profile(args, cfg: RunConfig, stem: str, problem: OdeProblem, t, f, fp) -> None:
    d = Path(cfg.out)
    write_csv(d / f"{stem}_trajectory.csv", diagnostics_table(problem, t, f, fp))
    if args.svg_data:
        write_polyline(d / f"{stem}_polyline.json", stem, t, f, ("t", "f"))
    if args.plot:
        write_plot(args.plot, stem, t, f, ("t", "f"))


def _stem(cfg: RunConfig, kind: str) -> str:
    return f"{kind}_g{cfg.g}_m{cfg.m1}-{cfg.m2}"


# ---- commands --------------------------------------------------------------


def cmd_type1(args) -> int:
    cfg = _config(args, "type1")
    problem = cfg.problem()
    stop = cfg.stop()
    theta = _angle(args, args.theta)
    if args.a is not None:
        shot = shooting.type1_theta_of_a(problem, args.a, args.side, stop, args.experimental_negative_h0)
        if isinstance(shot, shooting.Blowup):
            raise BlowupError(f"a = {args.a} ends with {shot.tag.value} at t = {shot.t_end:.12g}")
        sol = shooting.CapillarySolution(problem, "TypeI_" + args.side, args.a, shot.theta,
                                         [(shot.t_zero, shot.slope)], 0.0, shot.view)
    else:
        if problem.H0 < 0:
            raise DomainError("negative H0 is only available for single shots (--a)")
        if args.a_star:
            theta = 0.5 * math.pi
        sol = shooting.type1_solve_for_theta(problem, theta, args.side, cfg.tol, stop=stop)
    stem = _stem(cfg, "type1")
    write_json(Path(cfg.out) / f"{stem}.json", {**sol.to_json(), "config": cfg.to_json()})
    _emit_profile(args, cfg, stem, problem, *sol.view.sample())
    a_star = f", a* = {sol.a_star:.12g}" if sol.a_star is not None else ""
    print(f"{sol.kind}: a = {sol.parameter:.12g}, theta = {sol.theta:.12g}, "
          f"residual = {sol.residual:.3e}{a_star}")
    return 0 if sol.residual <= cfg.tol or args.a_star else 1


def cmd_type2(args) -> int:
    cfg = _config(args, "type2")
    problem = cfg.problem()
    stop = cfg.stop()
    if args.symmetric:
        if args.a is None:
            raise DomainError("--symmetric needs --a")
        sol = shooting.type2_symmetric_solve(problem, args.a, stop, args.experimental_negative_h0)
        ok = sol.residual <= cfg.tol
    else:
        theta = _angle(args, args.theta)
        if theta is None:
            raise DomainError("type2 needs --theta (or --symmetric --a)")
        if problem.H0 < 0:
            raise DomainError("negative H0 is only available for the symmetric solver")
        sol = shooting.type2_solve(problem, theta, cfg.tol, stop=stop)
        ok = sol.residual <= cfg.tol
    stem = _stem(cfg, "type2")
    write_json(Path(cfg.out) / f"{stem}.json", {**sol.to_json(), "config": cfg.to_json()})
    _emit_profile(args, cfg, stem, problem, *sol.view.sample())
    (t1, _), (t2, _) = sol.boundary
    print(f"{sol.kind}: t1 = {t1:.12g}, t2 = {t2:.12g}, theta = {sol.theta:.12g}, "
          f"residual = {sol.residual:.3e}")
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    cfg = _config(args, "sweep")
    problem = cfg.problem()
    grid = np.geomspace(args.start, args.stop, args.num) if args.log else np.linspace(args.start, args.stop, args.num)
    table = shooting.sweep(problem, grid, args.kind, _angle(args, args.theta), args.jobs, cfg.stop())
    stem = _stem(cfg, f"sweep_{args.kind}")
    d = Path(cfg.out)
    write_json(d / f"{stem}.json", {**table.to_json(), "config": cfg.to_json()})
    nan = math.nan
    rows = table.rows
    cols = {
        "parameter": [r.parameter for r in rows],
        "theta": [nan if r.theta is None else r.theta for r in rows],
        "t_first": [r.t_zeros[0] if r.t_zeros else nan for r in rows],
        "t_second": [r.t_zeros[1] if len(r.t_zeros) > 1 else nan for r in rows],
        "slope_first": [r.slopes[0] if r.slopes else nan for r in rows],
        "slope_second": [r.slopes[1] if len(r.slopes) > 1 else nan for r in rows],
        "reached_zero": [1.0 if r.tag == "ReachedZero" else 0.0 for r in rows],
    }
    write_csv(d / f"{stem}.csv", cols)
    if args.svg_data:
        write_polyline(d / f"{stem}_polyline.json", stem, cols["parameter"], cols["theta"],
                       ("parameter", "theta"))
    if args.plot:
        write_plot(args.plot, stem, cols["parameter"], cols["theta"], ("parameter", "theta"))
    print(f"sweep {args.kind}: {len(rows)} rows, {sum(cols['reached_zero']):.0f} reach a zero"
          + ("; " + "; ".join(table.flags) if table.flags else ""))
    return 0


def cmd_axisym(args) -> int:
    cfg = RunConfig("axisym", None, None, None, args.h0 or 0.0, 1.0, args.tol_rel, args.tol_abs,
                    args.slope_cap, args.tol, str(out_dir(args)))
    n, d = args.n, Path(cfg.out)
    stop = cfg.stop(x_min=-1 + axisym.XI_EPS, x_max=1 - axisym.XI_EPS)
    stem = f"axisym_n{n}"
    if args.threshold:
        a = axisym.threshold_scan(n, tol=min(cfg.tol, 1e-10), stop=stop)
        out = {"kind": "AxisymThreshold", "n": n, "threshold": a, "config": cfg.to_json()}
        write_json(d / f"{stem}_threshold.json", out)
        print(f"threshold n = {n}: {a:.12g}")
        return 0
    if args.theta is not None:
        theta = _angle(args, args.theta)
        sol = axisym.capillary_solve(n, theta, cfg.H0, tol=min(cfg.tol, 1e-10), stop=stop)
        rep = axisym.verify_even(sol)
        write_json(d / f"{stem}.json", {**sol.to_json(), "evenness": rep.to_json(),
                                        "config": cfg.to_json()})
        _emit_axisym(args, d, stem, axisym.trajectory_table(n, cfg.H0, sol.trajectory))
        print(f"axisym n = {n}: xi1 = {sol.xi1:.12g}, xi2 = {sol.xi2:.12g}, "
              f"residual = {sol.residual:.3e}, even = {rep.even}")
        return 0 if rep.even and sol.residual <= cfg.tol else 1
    if args.a is None:
        raise DomainError("axisym needs one of --threshold, --theta or --a")
    outcome = axisym.shot_from_center(n, args.a, cfg.H0, stop)
    out = {"kind": "AxisymShot", "n": n, "H0": cfg.H0, "a": args.a, "tag": outcome.tag.value,
           "xi_end": outcome.x_end, "f_end": outcome.f_end, "slope_end": outcome.slope_end,
           "config": cfg.to_json()}
    write_json(d / f"{stem}_shot.json", out)
    _emit_axisym(args, d, f"{stem}_shot", axisym.trajectory_table(n, cfg.H0, outcome))
    print(f"axisym shot n = {n}, a = {args.a}: {outcome.tag.value} at xi = {outcome.x_end:.12g}")
    return 0


def _emit_axisym(args, d: Path, stem: str, table: dict) -> None:
    write_csv(d / f"{stem}_trajectory.csv", table)
    if args.svg_data:
        write_polyline(d / f"{stem}_polyline.json", stem, table["xi"], table["f"], ("xi", "f"))
    if args.plot:
        write_plot(args.plot, stem, table["xi"], table["f"], ("xi", "f"))


def cmd_classify(args) -> int:
    triple = validate(args.g, args.m1, args.m2)
    params = None
    if args.k is not None:
        params = topology.OtFkmParams(args.m if args.m is not None else args.m1, args.k, args.q)
    if args.format == "md":
        text = topology.markdown_table([(triple, params)])
    else:
        rows = topology.classify(triple, params, homogeneous=not args.non_homogeneous)
        text = dumps({"triple": triple.to_json(), "relation": topology.surface_relation(triple, params),
                      "surfaces": [r.to_json() for r in rows]})
    if args.out or os.environ.get("CAPCONES_OUT"):
        ext = "md" if args.format == "md" else "json"
        (out_dir(args) / f"classify_g{args.g}_m{args.m1}-{args.m2}.{ext}").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    gates = run_battery()
    width = max(len(g.name) for g in gates)
    for g in gates:
        print(f"{'PASS' if g.passed else 'FAIL'}  {g.name:<{width}}  {g.value:.3e} <= {g.bound:.1e}")
    if args.out or os.environ.get("CAPCONES_OUT"):
        write_json(out_dir(args) / "verify_oracles.json", {"gates": [g.to_json() for g in gates]})
    return 0 if all(g.passed for g in gates) else 1


def cmd_limit_eq(args) -> int:
    d = out_dir(args)
    sol = solve_limit_equation(args.c, args.g, args.r0, args.y0, args.yp0, args.r_end,
                               rtol=args.tol_rel, atol=args.tol_abs)
    r = np.linspace(args.r0, args.r_end, args.num)
    y, yp = sol.sol(r)
    out = {"kind": "LimitEquation", "c": args.c, "g": args.g, "r0": args.r0, "y0": args.y0,
           "yp0": args.yp0, "r_end": args.r_end}
    cols = {"r": r, "y": y, "yp": yp}
    if args.yp0 == -1.0 and args.r0 == 0.0:
        C0, C1 = limit_inverse_from_data(args.c, args.g, args.y0)
        inv = np.array([limit_inverse_r(args.c, args.g, C0, C1, float(v)) for v in y])
        cols["r_inverse"] = inv
        out.update(C0=C0, C1=C1, round_trip=float(np.max(np.abs(inv - r))))
    if args.r_end < 0 and y[-1] > 0:
        out["growth_exponent"] = limit_growth_exponent(args.c, args.g, float(r[-1]), float(y[-1]),
                                                       float(yp[-1]), args.log_r_end)
    write_json(d / "limit_eq.json", out)
    write_csv(d / "limit_eq.csv", cols)
    print("limit equation: " + ", ".join(f"{k} = {out[k]:.6g}" for k in ("round_trip", "growth_exponent")
                                          if k in out))
    return 0


def cmd_fm_table(args) -> int:
    triple = validate(args.g, args.m1, args.m2)
    tm = t_M_zero(triple)
    t = np.linspace(0.0, args.t_max if args.t_max is not None else tm, args.num)
    vals = np.array([f_M_derivatives(triple, float(x))[:2] for x in t])
    d = out_dir(args)
    write_csv(d / f"fm_g{args.g}_m{args.m1}-{args.m2}.csv", {"t": t, "f_M": vals[:, 0], "f_M_prime": vals[:, 1]})
    print(f"f_M table: {args.num} rows, t_M = {tm:.15g}")
    return 0


# ---- parser ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (CAPCONES_OUT overrides)")
    p.add_argument("--tol-rel", type=float, default=1e-10, help="integrator relative tolerance")
    p.add_argument("--tol-abs", type=float, default=1e-12, help="integrator absolute tolerance")
    p.add_argument("--slope-cap", type=float, default=1e8, help="slope at which the hodograph chart takes over")
    p.add_argument("--tol", type=float, default=1e-8, help="boundary residual tolerance")
    p.add_argument("--deg", action="store_true", help="angles are given in degrees")
    p.add_argument("--svg-data", action="store_true", help="also write polyline coordinates")
    p.add_argument("--plot", metavar="FILE", help="render a figure (needs matplotlib)")
    p.add_argument("--experimental-negative-h0", action="store_true",
                   help="allow small negative H0 (|H0| < 0.1 a)")


def _triple_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-g", type=int, required=True)
    p.add_argument("-m1", type=int, required=True)
    p.add_argument("-m2", type=int, required=True)
    p.add_argument("--h0", type=float, default=0.0, help="mean curvature H0")
    p.add_argument("--lam", type=float, default=1.0, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capcones", description="Capillary cones over isoparametric foliations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("type1", help="Type I cone over a focal submanifold")
    _triple_args(p)
    _common(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--theta", type=float, help="contact angle")
    grp.add_argument("--a", type=float, help="single shot with height a")
    grp.add_argument("--a-star", action="store_true", help="free-boundary height")
    p.add_argument("--side", choices=("M1", "M2"), default="M1")
    p.set_defaults(func=cmd_type1)

    p = sub.add_parser("type2", help="Type II cone between two regular leaves")
    _triple_args(p)
    _common(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--symmetric", action="store_true", help="symmetric family (m1 = m2), needs --a")
    p.add_argument("--a", type=float)
    p.set_defaults(func=cmd_type2)

    p = sub.add_parser("sweep", help="tabulate a shooting family over a grid")
    _triple_args(p)
    _common(p)
    p.add_argument("--kind", choices=("type1", "type2", "type2_symmetric"), default="type1")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--num", type=int, default=21)
    p.add_argument("--log", action="store_true", help="geometric grid")
    p.add_argument("--theta", type=float, help="contact angle for type2 sweeps")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("axisym", help="axisymmetric capillary cones")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--h0", type=float, default=0.0)
    _common(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--threshold", action="store_true", help="uniqueness threshold from the centre")
    grp.add_argument("--theta", type=float, help="two-sided capillary solution")
    grp.add_argument("--a", type=float, help="single shot from (0, a, 0)")
    p.set_defaults(func=cmd_axisym)

    p = sub.add_parser("classify", help="topology of the doubled surfaces")
    p.add_argument("-g", type=int, required=True)
    p.add_argument("-m1", type=int, required=True)
    p.add_argument("-m2", type=int, required=True)
    p.add_argument("--m", type=int, help="OT-FKM m (defaults to m1)")
    p.add_argument("--k", type=int, help="OT-FKM k")
    p.add_argument("--q", type=int, default=0, help="OT-FKM index")
    p.add_argument("--non-homogeneous", action="store_true")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-oracles", help="run the oracle gate suite")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("limit-eq", help="integrate the blow-up limit equation")
    p.add_argument("--c", type=float, default=14.0)
    p.add_argument("--g", type=float, default=4.0)
    p.add_argument("--r0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=5.0)
    p.add_argument("--yp0", type=float, default=-1.0)
    p.add_argument("--r-end", type=float, default=-3.0)
    p.add_argument("--num", type=int, default=301)
    p.add_argument("--log-r-end", type=float, default=40.0, help="log|r| for the growth exponent")
    p.add_argument("--out")
    p.add_argument("--tol-rel", type=float, default=1e-13)
    p.add_argument("--tol-abs", type=float, default=1e-14)
    p.set_defaults(func=cmd_limit_eq)

    p = sub.add_parser("fm-table", help="tabulate the linear solution f_M")
    p.add_argument("-g", type=int, required=True)
    p.add_argument("-m1", type=int, required=True)
    p.add_argument("-m2", type=int, required=True)
    p.add_argument("--num", type=int, default=101)
    p.add_argument("--t-max", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fm_table)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SOLVER_ERRORS as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
