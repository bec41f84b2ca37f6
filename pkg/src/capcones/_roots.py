"""Bisection helpers shared by the shooting and axisymmetric solvers.

The shooting maps are only piecewise defined (a shot either reaches a zero or
it does not), so the solvers bisect on a boolean dichotomy or on a residual
that may be -inf. scipy's bracketing solvers assume a finite continuous
function and are not used here.
"""

from __future__ import annotations

import math
from typing import Callable

MAX_ITER = 200


def bisect_predicate(pred: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-12,
                     max_iter: int = MAX_ITER) -> tuple[float, float]:
    """Shrink [lo, hi] with pred(lo) true and pred(hi) false; return the final bracket."""
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def bisect_sign(fn: Callable[[float], float], lo: float, hi: float, flo: float | None = None,
                xtol: float = 1e-12, ftol: float = 0.0, max_iter: int = MAX_ITER) -> float:
    """Bisect a sign change of fn on [lo, hi]; fn may return +-inf.

    Stops when the bracket is below ``xtol`` or |fn| <= ``ftol``.
    """
    if flo is None:
        flo = fn(lo)
    best, fbest = lo, flo
    for _ in range(max_iter):
        if hi - lo <= xtol * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if math.isfinite(fm) and (not math.isfinite(fbest) or abs(fm) < abs(fbest)):
            best, fbest = mid, fm
        if fm == 0.0 or (math.isfinite(fm) and abs(fm) <= ftol):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return best if math.isfinite(fbest) else 0.5 * (lo + hi)
