"""Gauss hypergeometric evaluation and the Legendre-type operator L_M.

``hyp2f1`` sums the Gauss series with compensated (Kahan) accumulation.
Negative arguments are first moved into [0, 1) by the Pfaff transformation,
keeping a terminating parameter when one is available. The operator L_M and
its hypergeometric solution f_M describe the small-height (one-phase) limit
of the capillary profile equation, and ``limit_inverse_r`` is the explicit
inverse of solutions of the blow-up limit equation.
"""

from __future__ import annotations

import math

from .errors import BracketFailure, ComplexExponents, DomainError, NoConvergence, PoleError
from .foliation import FoliationTriple

__all__ = [
    "hyp2f1",
    "hyp2f1_dz",
    "f_M",
    "f_M_derivatives",
    "t_M_zero",
    "legendre_weight",
    "legendre_residual",
    "legendre_selfadjoint_residual",
    "limit_exponents",
    "limit_betas",
    "limit_basis",
    "limit_wronskian",
    "limit_inverse_r",
    "limit_inverse_from_data",
]

MAX_TERMS = 1_000_000
_EPS = 2.0**-53


def _nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _series(a: float, b: float, c: float, z: float) -> float:
    total = 1.0
    comp = 0.0
    term = 1.0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        if term == 0.0:
            return total
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        # the ratio test tail bound is only valid once the ratio has settled below one
        ratio = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * z)
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) <= _EPS * abs(total):
            return total
    raise NoConvergence(f"2F1({a}, {b}; {c}; {z}) did not converge in {MAX_TERMS} terms")


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1."""
    if _nonpositive_int(c):
        raise PoleError(f"c = {c} is a non-positive integer")
    if z >= 1.0:
        raise DomainError(f"z = {z} is outside (-inf, 1)")
    if z == 0.0:
        return 1.0
    if z > 0.0:
        return _series(a, b, c, z)
    # Pfaff: 2F1(a,b;c;z) = (1-z)^{-b} 2F1(c-a, b; c; z/(z-1)), keeping b terminating if possible
    if _nonpositive_int(a) and not _nonpositive_int(b):
        a, b = b, a
    w = z / (z - 1.0)
    return (1.0 - z) ** (-b) * _series(c - a, b, c, w)


def hyp2f1_dz(a: float, b: float, c: float, z: float) -> float:
    """Derivative of 2F1 in z, (ab/c) 2F1(a+1, b+1; c+1; z)."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z)


def _fm_params(triple: FoliationTriple) -> tuple[float, float, float]:
    g = triple.g
    return (triple.n - 1) / g, -1.0 / g, (triple.m1 + 1) / 2.0


def f_M(triple: FoliationTriple, t: float) -> float:
    """Solution of L_M f = 0 with f(0) = 1, f'(0) = 0."""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t = {t} is outside [0, 1)")
    a, b, c = _fm_params(triple)
    return hyp2f1(a, b, c, t * t)


def f_M_derivatives(triple: FoliationTriple, t: float) -> tuple[float, float, float]:
    """Return (f_M, f_M', f_M'') at t from the hypergeometric series."""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t = {t} is outside [0, 1)")
    a, b, c = _fm_params(triple)
    z = t * t
    f0 = hyp2f1(a, b, c, z)
    d1 = hyp2f1_dz(a, b, c, z)
    d2 = hyp2f1_dz(a + 1.0, b + 1.0, c + 1.0, z) * a * b / c
    return f0, 2.0 * t * d1, 2.0 * d1 + 4.0 * z * d2


def _bisect(fn, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    flo = fn(lo)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_M_zero(triple: FoliationTriple, tol: float = 1e-12) -> float:
    """The zero of f_M in (0, 1): scan in steps of 0.01, then towards 1 in decades, then bisect.

    The decade scan matters for (6, 1, 1), whose zero lies in (0.99, 0.999).
    """
    prev = 0.0
    grid = [0.01 * k for k in range(1, 100)] + [1.0 - 10.0**-k for k in range(3, 5)]
    for t in grid:
        if f_M(triple, t) <= 0.0:
            return _bisect(lambda x: f_M(triple, x), prev, t, tol)
        prev = t
    raise BracketFailure(f"f_M for {triple} has no sign change on (0, {grid[-1]})")


def legendre_weight(triple: FoliationTriple, t: float) -> float:
    """Self-adjoint weight p_M(t) = t^{m1} (1 - t^2)^{(m2+1)/2}."""
    return t**triple.m1 * max(0.0, 1.0 - t * t) ** ((triple.m2 + 1) / 2.0)


def legendre_residual(triple: FoliationTriple, t: float, f: float, fp: float, fpp: float) -> float:
    """L_M f = (1-t^2) f'' + (m1/t - (m1+m2+1) t) f' + 4(n-1)/g^2 f."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t = {t} is outside (0, 1)")
    m1, m2, g = triple.m1, triple.m2, triple.g
    return (1 - t * t) * fpp + (m1 / t - (m1 + m2 + 1) * t) * fp + 4.0 * (triple.n - 1) / g**2 * f


def legendre_selfadjoint_residual(
    triple: FoliationTriple, t: float, f: float, fp: float, fpp: float
) -> float:
    """The same operator written as (1-t^2)/p [(p f')' + 4(n-1)/g^2 p/(1-t^2) f]."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t = {t} is outside (0, 1)")
    m1, m2, g = triple.m1, triple.m2, triple.g
    p = legendre_weight(triple, t)
    dp = p * (m1 / t - (m2 + 1) * t / (1 - t * t))
    q = 1 - t * t
    return q / p * (dp * fp + p * fpp + 4.0 * (triple.n - 1) / g**2 * p / q * f)


def limit_exponents(c: float, g: float) -> tuple[float, float]:
    """Exponents a_+, a_- of the hypergeometric inverse of the limit equation."""
    disc = (c + 1) ** 2 - 4 * c * g
    if disc < 0:
        raise ComplexExponents(f"(c+1)^2 - 4cg = {disc} < 0")
    root = math.sqrt(disc)
    return (-(c + 1) + root) / 4.0, (-(c + 1) - root) / 4.0


def limit_betas(c: float, g: float) -> tuple[float, float]:
    """Backward growth exponents beta = -1/(2 a) of solutions of the limit equation."""
    ap, am = limit_exponents(c, g)
    return -0.5 / ap, -0.5 / am


def limit_basis(c: float, g: float, y: float) -> tuple[float, float, float, float]:
    """Return (F0, F0', F1, F1') at y for the even and odd inverse solutions."""
    ap, am = limit_exponents(c, g)
    z = -y * y
    f0 = hyp2f1(ap, am, 0.5, z)
    d0 = -2.0 * y * hyp2f1_dz(ap, am, 0.5, z)
    s1 = hyp2f1(ap + 0.5, am + 0.5, 1.5, z)
    f1 = y * s1
    d1 = s1 - 2.0 * y * y * hyp2f1_dz(ap + 0.5, am + 0.5, 1.5, z)
    return f0, d0, f1, d1


def limit_wronskian(c: float, g: float, y: float) -> float:
    """F0 F1' - F1 F0', which equals (1 + y^2)^{c/2}."""
    f0, d0, f1, d1 = limit_basis(c, g, y)
    return f0 * d1 - f1 * d0


def limit_inverse_r(c: float, g: float, C0: float, C1: float, y: float) -> float:
    """r(y) = C0 F0(y) + C1 F1(y), the inverse of a non-constant limit-equation solution."""
    f0, _, f1, _ = limit_basis(c, g, y)
    return C0 * f0 + C1 * f1


def limit_inverse_from_data(c: float, g: float, L: float) -> tuple[float, float]:
    """Coefficients (C0, C1) of the inverse of the solution with y(0) = L, y'(0) = -1."""
    f0, _, f1, _ = limit_basis(c, g, L)
    scale = (1.0 + L * L) ** (-c / 2.0)
    return scale * f1, -scale * f0
