"""Exact solutions of the profile equations, used as oracles.

Every profile carries analytic f, f' and f'' and is checked against its
equation when it is built: the residual (1 - x^2)(f'' - rhs) must stay below
1e-10 on a 100-point interior grid. Clifford profiles use the multiplicity
convention (m1, m2) = (k - 1, n - k - 1), under which they solve the equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .axisym import axisym_rhs
from .errors import CapconesError, DomainError, WrongG
from .foliation import FoliationTriple, reflect_point, validate
from .profile_ode import OdeProblem, rhs

__all__ = [
    "ExactProfile",
    "ResidualGateError",
    "clifford_minimal_from_zero",
    "clifford_minimal_across_one",
    "clifford_cmc",
    "clifford_cmc_H0",
    "clifford_torus_radii",
    "axisym_profiles",
    "constant_solution",
    "latitude_height",
    "reflected",
]

RESIDUAL_GATE = 1e-10
GATE_POINTS = 100


class ResidualGateError(CapconesError):
    """An exact profile failed its residual check at construction."""


Fn = Callable[[float], float]


@dataclass
class ExactProfile:
    """A closed-form profile on [lo, hi] in the coordinate ``coord`` ('t' or 'xi').

    For 't' profiles ``triple`` is the foliation; 'xi' profiles solve the
    axisymmetric equation in dimension ``n``.
    """

    family: str
    f: Fn
    fp: Fn
    fpp: Fn
    lo: float
    hi: float
    H0: float = 0.0
    coord: str = "t"
    triple: FoliationTriple | None = None
    n: int | None = None
    params: dict = field(default_factory=dict)
    max_residual: float = field(default=math.nan, init=False)

    def __post_init__(self) -> None:
        if self.n is None and self.triple is not None:
            self.n = self.triple.n
        self.max_residual = self.residual_on_grid(GATE_POINTS)
        if not self.max_residual <= RESIDUAL_GATE:
            raise ResidualGateError(
                f"{self.family} {self.params} has residual {self.max_residual:.3e} > {RESIDUAL_GATE}"
            )

    def residual(self, x: float) -> float:
        """(1 - x^2) (f'' - rhs(x, f, f')) for the profile's own equation."""
        f, fp, fpp = self.f(x), self.fp(x), self.fpp(x)
        q = 1.0 - x * x
        if self.coord == "t":
            return q * (fpp - rhs(OdeProblem(self.triple, self.H0), x, f, fp))
        return q * (fpp - axisym_rhs(self.n, self.H0, x, f, fp))

    def grid(self, num: int) -> np.ndarray:
        """Interior points, avoiding the endpoints where f' may be infinite."""
        return np.linspace(self.lo, self.hi, num + 2)[1:-1]

    def residual_on_grid(self, num: int) -> float:
        out = 0.0
        for x in self.grid(num):
            x = float(x)
            if self.coord == "t" and not 0.0 < x < 1.0:
                continue
            out = max(out, abs(self.residual(x)))
        return out

    def sample(self, num: int = 200) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.linspace(self.lo, self.hi, num)
        with np.errstate(divide="ignore", invalid="ignore"):
            return x, np.array([self.f(v) for v in x]), np.array([self.fp(v) for v in x])

    def to_json(self) -> dict:
        return {"family": self.family, "coord": self.coord, "interval": [self.lo, self.hi],
                "H0": self.H0, "n": self.n, "params": dict(self.params),
                "max_residual": self.max_residual}


def _need_g(triple: FoliationTriple, g: int) -> None:
    if triple.g != g:
        raise WrongG(f"this family needs g = {g}, got {triple}")


def _quadric(A: float, B: float, C: float, lo: float, hi: float, family: str, *,
             triple=None, n=None, H0=0.0, coord="t", params=None) -> ExactProfile:
    """Profile with f^2 = (A + B x^2) / C; f f' = B x / C and f f'' + f'^2 = B / C."""

    def f(x: float) -> float:
        return math.sqrt(max(0.0, (A + B * x * x) / C))

    def fp(x: float) -> float:
        v = f(x)
        return B * x / (C * v) if v else -math.copysign(math.inf, -B * x)

    def fpp(x: float) -> float:
        v = f(x)
        d = fp(x)
        return (B / C - d * d) / v if v else math.nan

    return ExactProfile(family, f, fp, fpp, lo, hi, H0, coord, triple, n, params or {})


def clifford_minimal_from_zero(triple: FoliationTriple) -> ExactProfile:
    """g = 2 free-boundary profile sqrt((m1 + 1 - (n-1) t^2) / m2) on [0, sqrt((m1+1)/(n-1))]."""
    _need_g(triple, 2)
    k, n = triple.m1 + 1, triple.n
    return _quadric(k, -(n - 1), triple.m2, 0.0, math.sqrt(k / (n - 1)),
                    "CliffordMinimalFromZero", triple=triple,
                    params={"a_star": math.sqrt(k / triple.m2)})


def clifford_minimal_across_one(triple: FoliationTriple) -> ExactProfile:
    """g = 2 profile sqrt(((n-1) t^2 - m1) / m1) on [sqrt(m1/(n-1)), 1], smooth across t = 1."""
    _need_g(triple, 2)
    m1, n = triple.m1, triple.n
    return _quadric(-m1, n - 1, m1, math.sqrt(m1 / (n - 1)), 1.0, "CliffordMinimalAcrossOne",
                    triple=triple, params={"f_at_one": math.sqrt((n - 1 - m1) / m1)})


def clifford_cmc_H0(triple: FoliationTriple, a: float) -> float:
    """Mean curvature of the Clifford profile of height a: (m1+1)/sqrt(a) - m2 sqrt(a)."""
    return (triple.m1 + 1) / math.sqrt(a) - triple.m2 * math.sqrt(a)


def clifford_cmc(triple: FoliationTriple, a: float) -> ExactProfile:
    """g = 2 CMC profile sqrt(a - (a+1) t^2) with H0 = (m1+1)/sqrt(a) - m2 sqrt(a)."""
    _need_g(triple, 2)
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    return _quadric(a, -(a + 1), 1.0, 0.0, math.sqrt(a / (a + 1)), "CliffordCMC", triple=triple,
                    H0=clifford_cmc_H0(triple, a), params={"a": a})


def clifford_torus_radii(triple: FoliationTriple) -> tuple[tuple[int, float], tuple[int, float]]:
    """(dimension, radius) of the two sphere factors of the doubled g = 2 minimal surface.

    The free-boundary profile doubles to S^{m2}(sqrt(m2/(n-1))) x S^{m1+1}(sqrt((m1+1)/(n-1))).
    """
    _need_g(triple, 2)
    n = triple.n
    return (triple.m2, math.sqrt(triple.m2 / (n - 1))), (triple.m1 + 1, math.sqrt((triple.m1 + 1) / (n - 1)))


def axisym_profiles(n: int, family: str, lam: float | None = None) -> ExactProfile:
    """Exact axisymmetric profiles.

    'AxisymClifford': the Clifford torus sqrt(4/(n-2) t^2 (1-t^2) - (1-2t^2)^2) in t (g = 1).
    'AxisymHalfLawson': the same cone sqrt((1 - (n-1) xi^2)/(n-2)) in xi.
    'LatitudeSphere': sqrt((lam+1) xi^2 - 1) in xi, with H0 = (n-1)/sqrt(lam).
    """
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    if family == "AxisymHalfLawson":
        r = 1.0 / math.sqrt(n - 1)
        return _quadric(1.0, -(n - 1), n - 2, -r, r, family, n=n, coord="xi")
    if family == "AxisymClifford":
        triple = validate(1, n - 2, n - 2)
        c = 4.0 / (n - 2)

        def f(t: float) -> float:
            return math.sqrt(max(0.0, c * t * t * (1 - t * t) - (1 - 2 * t * t) ** 2))

        def fp(t: float) -> float:
            v = f(t)
            num = c * t * (1 - 2 * t * t) + 4 * t * (1 - 2 * t * t)
            return num / v if v else math.inf

        def fpp(t: float) -> float:
            v = f(t)
            d = fp(t)
            dnum = c * (1 - 6 * t * t) + 4 * (1 - 6 * t * t)
            return (dnum - d * d) / v

        # zeros of f: 1 - 2t^2 = +-sqrt(1/(n-1)) since (1-2t^2)^2 (1 + c/4) = c/4
        w = math.sqrt(1.0 / (n - 1))
        return ExactProfile(family, f, fp, fpp, math.sqrt((1 - w) / 2), math.sqrt((1 + w) / 2),
                            0.0, "t", triple, n)
    if family == "LatitudeSphere":
        if lam is None or lam <= 0:
            raise DomainError("LatitudeSphere needs lam > 0")
        return _quadric(-1.0, lam + 1.0, 1.0, 1.0 / math.sqrt(lam + 1), 1.0, family, n=n,
                        coord="xi", H0=(n - 1) / math.sqrt(lam), params={"lambda": lam})
    raise DomainError(f"unknown axisymmetric family {family!r}")


def constant_solution(triple: FoliationTriple, H0: float) -> ExactProfile:
    """f = -H0 / (n - 1), the horizontal latitude sphere."""
    c = -H0 / (triple.n - 1)
    return ExactProfile("Constant", lambda t: c, lambda t: 0.0, lambda t: 0.0, 0.0, 1.0, H0, "t",
                        triple, params={"height": latitude_height(triple.n, H0)})


def latitude_height(n: int, H0: float) -> float:
    """Height |H0| / sqrt(H0^2 + (n-1)^2) of the sphere swept by the constant profile."""
    return abs(H0) / math.sqrt(H0 * H0 + (n - 1) ** 2)


def reflected(profile: ExactProfile) -> ExactProfile:
    """Pull a t-profile back by t -> sqrt(1 - t^2); it solves the equation of the swapped triple."""
    if profile.coord != "t":
        raise DomainError("only t-profiles can be reflected")
    tr = profile.triple
    f0, f1, f2 = profile.f, profile.fp, profile.fpp

    def f(t: float) -> float:
        return f0(reflect_point(t))

    def fp(t: float) -> float:
        u = reflect_point(t)
        return -f1(u) * t / u

    def fpp(t: float) -> float:
        # u = sqrt(1 - t^2): du/dt = -t/u, d2u/dt2 = -1/u^3
        u = reflect_point(t)
        return f2(u) * (t / u) ** 2 - f1(u) / u**3

    lo, hi = reflect_point(profile.hi), reflect_point(profile.lo)
    return ExactProfile(profile.family + "Reflected", f, fp, fpp, lo, hi, profile.H0, "t",
                        FoliationTriple(tr.g, tr.m2, tr.m1, tr.formal), params=dict(profile.params))
