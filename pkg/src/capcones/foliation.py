"""Isoparametric foliation data and leaf-geometry coefficients.

A foliation of the round sphere S^{n-1} by isoparametric hypersurfaces is
described by the number g of distinct principal curvatures and the two
multiplicities (m1, m2), with ``g (m1 + m2) = 2 (n - 2)``. Leaves are indexed
by the normal distance ``s`` in ``[0, pi/g]`` or by the meridional variable
``t = sin(g s / 2)`` in ``[0, 1]``; ``t = 0`` and ``t = 1`` are the focal
submanifolds M1 and M2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonAdmissible, NonIntegralDimension

__all__ = [
    "FoliationTriple",
    "LeafCoordinates",
    "validate",
    "delta",
    "otfkm_k",
    "is_otfkm_pair",
    "mean_curvature_H",
    "volume_density",
    "A_M",
    "t_alpha",
    "reflect",
    "reflect_point",
]

_DELTA_BASE = {1: 1, 2: 2, 3: 4, 4: 4, 5: 8, 6: 8, 7: 8, 8: 8}
_G4_EXCEPTIONAL = {(2, 2), (4, 5), (5, 4)}


def delta(m: int) -> int:
    """Bott-periodic Clifford dimension: delta(8r + j) = 16^r delta(j) for j in 1..8."""
    if m < 1:
        raise DomainError(f"delta(m) needs m >= 1, got {m}")
    r, j = divmod(m - 1, 8)
    return 16**r * _DELTA_BASE[j + 1]


def otfkm_k(m: int, other: int) -> int | None:
    """Return k >= 1 with other = k delta(m) - m - 1, or None if no such k exists."""
    d = delta(m)
    total = other + m + 1
    if total % d:
        return None
    k = total // d
    return k if k >= 1 else None


def is_otfkm_pair(m1: int, m2: int) -> bool:
    """True when (m1, m2) or (m2, m1) has the OT-FKM form (m, k delta(m) - m - 1)."""
    return otfkm_k(m1, m2) is not None or otfkm_k(m2, m1) is not None


def _admissible(g: int, m1: int, m2: int) -> bool:
    if g == 1:
        return m1 == m2
    if g == 2:
        return True
    if g == 3:
        return m1 == m2 and m1 in (1, 2, 4, 8)
    if g == 4:
        return (m1, m2) in _G4_EXCEPTIONAL or is_otfkm_pair(m1, m2)
    if g == 6:
        return m1 == m2 and m1 in (1, 2)
    return False


@dataclass(frozen=True)
class FoliationTriple:
    """Validated multiplicity data; ``n`` is derived from g(m1 + m2) = 2(n - 2)."""

    g: int
    m1: int
    m2: int
    formal: bool = False

    @property
    def n(self) -> int:
        return self.g * (self.m1 + self.m2) // 2 + 2

    @property
    def alpha(self) -> float:
        return self.m1 / (self.m1 + self.m2)

    def to_json(self) -> dict:
        return {"g": self.g, "m1": self.m1, "m2": self.m2, "n": self.n, "formal": self.formal}

    def __str__(self) -> str:
        return f"({self.g},{self.m1},{self.m2})"


def validate(g: int, m1: int, m2: int, formal: bool = False) -> FoliationTriple:
    """Build a triple, rejecting patterns outside the isoparametric classification unless formal."""
    if g < 1 or m1 < 1 or m2 < 1:
        raise NonAdmissible(f"need g, m1, m2 >= 1, got ({g},{m1},{m2})")
    if (g * (m1 + m2)) % 2:
        raise NonIntegralDimension(f"g(m1+m2) = {g * (m1 + m2)} is odd")
    if not formal and not _admissible(g, m1, m2):
        raise NonAdmissible(f"({g},{m1},{m2}) is not an isoparametric multiplicity pattern")
    return FoliationTriple(g, m1, m2, formal)


@dataclass(frozen=True)
class LeafCoordinates:
    """A leaf given both by its normal distance s and meridional variable t."""

    s: float
    t: float

    @classmethod
    def from_s(cls, triple: FoliationTriple, s: float) -> "LeafCoordinates":
        return cls(s, math.sin(triple.g * s / 2))

    @classmethod
    def from_t(cls, triple: FoliationTriple, t: float) -> "LeafCoordinates":
        return cls(2 * math.asin(t) / triple.g, t)


def mean_curvature_H(triple: FoliationTriple, s: float) -> float:
    """Mean curvature of the leaf at distance s, (g/2)(m2 tan(gs/2) - m1 cot(gs/2))."""
    g = triple.g
    if not 0.0 < s < math.pi / g:
        raise DomainError(f"s = {s} is not inside (0, pi/g)")
    x = g * s / 2
    return 0.5 * g * (triple.m2 * math.tan(x) - triple.m1 / math.tan(x))


def volume_density(triple: FoliationTriple, s: float) -> float:
    """Leaf volume density sin^{m1}(gs/2) cos^{m2}(gs/2), normalised with constant 1."""
    g = triple.g
    if not -1e-15 <= s <= math.pi / g + 1e-15:
        raise DomainError(f"s = {s} is not inside [0, pi/g]")
    x = g * s / 2
    return max(math.sin(x), 0.0) ** triple.m1 * max(math.cos(x), 0.0) ** triple.m2


def A_M(triple: FoliationTriple, t: float) -> float:
    """A_M(t) = t - alpha / t with alpha = m1 / (m1 + m2)."""
    if t == 0:
        raise DomainError("A_M is singular at t = 0")
    return t - triple.alpha / t


def t_alpha(triple: FoliationTriple) -> float:
    """Meridional coordinate of the minimal leaf, where A_M vanishes."""
    return math.sqrt(triple.alpha)


def reflect(triple: FoliationTriple) -> FoliationTriple:
    """Swap the roles of the two focal submanifolds."""
    return FoliationTriple(triple.g, triple.m2, triple.m1, triple.formal)


def reflect_point(t: float) -> float:
    """The involution t -> sqrt(1 - t^2) matching ``reflect``."""
    return math.sqrt(max(0.0, 1.0 - t * t))
