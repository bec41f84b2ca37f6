"""Topology of the doubled minimal surfaces as deterministic lookups.

The doubled Type I surface S_Mi is the sphere bundle S(nu_Mi + 1) over the
focal submanifold Mi, and the Type II surface Sbar_M is the product of the
regular leaf M with a circle. This module reproduces the known diffeomorphism
types and product verdicts from (g, m1, m2) and, for g = 4 foliations of
OT-FKM type (m, k delta(m) - m - 1), the Clifford data (m, k, q). No
characteristic classes are computed; the verdicts are finite data.

Type strings use Unicode superscripts. Factors are joined by an unspaced
"×" when every factor is a plain sphere or projective space, and by " × "
otherwise. Bundle markers live in ``marker``, not in the type string:
"†" non-trivial bundle, "‡" iterated non-trivial bundles, "*" exceptional
homogeneous foliation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, MissingOtFkmParams, NonAdmissible, NotOtFkm, Unsupported
from .foliation import FoliationTriple, delta, otfkm_k, validate

__all__ = [
    "delta",
    "ProductStatus",
    "OtFkmParams",
    "BundleClassification",
    "eta_trivial",
    "xi_trivial",
    "s_m2_product",
    "otfkm_orientation",
    "classify",
    "surface_relation",
    "markdown_table",
    "ETA_TRIVIAL_PAIRS",
    "S_M2_PRODUCT_SPORADIC",
]

ETA_TRIVIAL_PAIRS = frozenset({(1, 2), (2, 1), (1, 6), (6, 1), (2, 5), (5, 2), (3, 4)})
S_M2_PRODUCT_SPORADIC = frozenset({(2, 5), (5, 2), (3, 4), (4, 3)})

# OT-FKM pairs listed with explicit types; their reflections reuse them
_TABLE_PAIRS = frozenset({(1, 2), (1, 6), (2, 5), (3, 4)})

_SUP = str.maketrans("0123456789-+", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻⁺")
_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


class ProductStatus(str, Enum):
    PRODUCT = "Product"
    NOT_STABLY_PRODUCT = "NotStablyProduct"
    CONDITIONAL_PRODUCT = "ConditionalProduct"


@dataclass(frozen=True)
class OtFkmParams:
    """Clifford data of an OT-FKM foliation: (m1, m2) = (m, k delta(m) - m - 1).

    The index q only matters for m = 0 mod 4, where |q| <= k and q = k mod 2;
    otherwise it must be 0.
    """

    m: int
    k: int
    q: int = 0

    def __post_init__(self) -> None:
        if self.m < 1 or self.k < 1:
            raise DomainError(f"need m, k >= 1, got m = {self.m}, k = {self.k}")
        if self.m2 < 1:
            raise DomainError(f"k delta(m) - m - 1 = {self.m2} must be positive")
        if self.m % 4:
            if self.q != 0:
                raise DomainError(f"the index q must be 0 unless m = 0 mod 4, got q = {self.q}")
        elif abs(self.q) > self.k or (self.q - self.k) % 2:
            raise DomainError(f"need |q| <= k and q = k mod 2, got q = {self.q}, k = {self.k}")

    @property
    def ell(self) -> int:
        return self.k * delta(self.m)

    @property
    def m1(self) -> int:
        return self.m

    @property
    def m2(self) -> int:
        return self.k * delta(self.m) - self.m - 1

    @classmethod
    def from_pair(cls, m: int, other: int, q: int = 0) -> "OtFkmParams":
        k = otfkm_k(m, other)
        if k is None:
            raise NotOtFkm(f"({m},{other}) is not of the form (m, k delta(m) - m - 1)")
        return cls(m, k, q)


@dataclass(frozen=True)
class BundleClassification:
    surface: str
    type_string: str
    product_over_base: ProductStatus
    provenance: str
    marker: str = ""
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        out = {"surface": self.surface, "type": self.type_string,
               "product_status": self.product_over_base.value, "provenance": self.provenance}
        if self.marker:
            out["marker"] = self.marker
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _S(d: int) -> str:
    return "S" + str(d).translate(_SUP)


def _simple(factor: str) -> bool:
    return "(" not in factor and "/" not in factor and " " not in factor


def _prod(*factors: str) -> str:
    sep = "×" if all(_simple(f) for f in factors) else " × "
    return sep.join(factors)


def _bdl(fiber: str, base: str) -> str:
    if "×" in base or "-bdl" in base:
        base = f"({base})"
    return f"{fiber}-bdl/{base}"


def _twisted(group: str, subgroup: str, fiber: str) -> str:
    return f"{group} ×_{{{subgroup}}} {fiber}"


def _stiefel(n: str | int) -> str:
    return f"𝕍(2, {n})"


def _clifford_stiefel(m: int) -> str:
    return f"𝕍(2,C{str(m - 1).translate(_SUB)})"


def eta_trivial(m1: int, m2: int, q: int | None = None) -> bool:
    """Triviality of the bundle whose sphere bundle is the OT-FKM focal manifold M1.

    True exactly on the sporadic list, and for (4, 3) when the index q is 0.
    """
    if otfkm_k(m1, m2) is None:
        raise NotOtFkm(f"({m1},{m2}) is not an OT-FKM pair with m = m1")
    if (m1, m2) == (4, 3):
        if q is None:
            raise MissingOtFkmParams("(4,3) needs the index q")
        return q == 0
    return (m1, m2) in ETA_TRIVIAL_PAIRS


def xi_trivial(params: OtFkmParams) -> bool:
    """Triviality of the bundle whose sphere bundle is the OT-FKM focal manifold M2."""
    r = params.m % 8
    if r in (3, 5, 6, 7):
        return True
    if r in (1, 2):
        return params.k % 2 == 0
    return params.q == 0


def _in_s_m2_list(m1: int, m2: int) -> bool:
    return (m1 == 1 and m2 % 2 == 0) or (m2 == 1 and m1 % 2 == 0) or (m1, m2) in S_M2_PRODUCT_SPORADIC


def s_m2_product(m1: int, m2: int) -> tuple[ProductStatus, str | None]:
    """Whether S_M2 of an OT-FKM pair is homotopy equivalent to a product over M2.

    Listed pairs give S^{m1} x S^{m1+m2} x S^{m2+1}; all others are reported
    as not stably a product.
    """
    if otfkm_k(m1, m2) is None and otfkm_k(m2, m1) is None:
        raise NotOtFkm(f"({m1},{m2}) is not an OT-FKM pair")
    if _in_s_m2_list(m1, m2):
        return ProductStatus.PRODUCT, _prod(_S(m1), _S(m1 + m2), _S(m2 + 1))
    return ProductStatus.NOT_STABLY_PRODUCT, None


def otfkm_orientation(m1: int, m2: int, params: OtFkmParams | None = None) -> tuple[OtFkmParams, bool]:
    """OT-FKM data for the pair and whether the roles of M1 and M2 are swapped.

    Without explicit data the orientation whose pair has explicit types is
    preferred, then m = m1. The index q is required whenever m1 = 0 mod 4
    admits the orientation m = m1, since distinct families then share (m1, m2).
    """
    if params is not None:
        if (params.m1, params.m2) == (m1, m2):
            return params, False
        if (params.m1, params.m2) == (m2, m1):
            return params, True
        raise DomainError(f"OT-FKM data {params} does not match ({m1},{m2})")
    if m1 % 4 == 0 and otfkm_k(m1, m2) is not None:
        raise MissingOtFkmParams(f"({m1},{m2}) with m1 = 0 mod 4 needs the index q")
    order = [(m1, m2, False), (m2, m1, True)]
    if (m2, m1) in _TABLE_PAIRS or (m2 == 1 and m1 % 2 == 0):
        order.reverse()
    for m, other, swapped in order:
        k = otfkm_k(m, other)
        if k is not None:
            if m % 4 == 0:
                raise MissingOtFkmParams(f"({m},{other}) with m = 0 mod 4 needs the index q")
            return OtFkmParams(m, k), swapped
    raise NotOtFkm(f"({m1},{m2}) is not an OT-FKM pair")


# ---- per-family rows -------------------------------------------------------


@dataclass
class _Row:
    s1: str
    s2: str
    sbar: str
    status1: ProductStatus
    status2: ProductStatus
    provenance: str
    marker1: str = ""
    marker2: str = ""
    notes1: tuple[str, ...] = ()
    notes2: tuple[str, ...] = ()
    relation: str = ""


_NSP = ProductStatus.NOT_STABLY_PRODUCT
_P = ProductStatus.PRODUCT
_C = ProductStatus.CONDITIONAL_PRODUCT

_G3 = {
    1: ("SO(3)", "O(2)", "SO(3)/(ℤ₂⊕ℤ₂)"),
    2: ("SU(3)", "U(2)", "SU(3)/T²"),
    4: ("Sp(3)", "Sp(2)Sp(1)", "Sp(3)/Sp(1)³"),
    8: ("F₄", "Spin(9)", "F₄/Spin(8)"),
}


def _row_g1(tr: FoliationTriple) -> _Row:
    n = tr.n
    return _Row(_S(n - 1), _S(n - 1), _prod(_S(n - 2), _S(1)), _P, _P, "round sphere and Clifford torus")


def _row_g2(tr: FoliationTriple) -> _Row:
    p, q = tr.m1, tr.m2
    return _Row(_prod(_S(p), _S(q + 1)), _prod(_S(p + 1), _S(q)), _prod(_S(p), _S(q), _S(1)), _P, _P,
                "Clifford tori of products of spheres")


def _row_g3(tr: FoliationTriple) -> _Row:
    m = tr.m1
    group, sub, leaf = _G3[m]
    s = _twisted(group, sub, _S(m + 1))
    return _Row(s, s, _prod(leaf, _S(1)), _NSP, _NSP,
                "sphere bundle over a projective plane as a twisted product of Lie groups",
                "†", "†", relation="isometric")


def _row_g4_exceptional(tr: FoliationTriple) -> _Row:
    prov = "exceptional homogeneous foliation"
    if (tr.m1, tr.m2) == (2, 2):
        return _Row(_bdl(_S(3), "ℂP³"), _bdl(_S(3), "Q³"), _prod("SO(5)/T²", _S(1)), _NSP, _NSP, prov,
                    "†", "†", relation="not homotopy equivalent")
    if (tr.m1, tr.m2) == (4, 5):
        return _Row(_bdl(_S(5), "M₁¹⁴"), _bdl(_S(6), "M₂¹³"), _prod("M_(4,4,5)", _S(1)), _NSP, _NSP,
                    prov, "†", "†", relation="not homotopy equivalent")
    # (5, 4) is the same foliation with the focal submanifolds exchanged
    r = _row_g4_exceptional(FoliationTriple(4, 4, 5))
    return _Row(r.s2, r.s1, r.sbar, _NSP, _NSP, prov, "†", "†", relation=r.relation)


def _row_otfkm(p: OtFkmParams) -> _Row:
    """Row for the OT-FKM foliation (m, l - m - 1) in its own orientation."""
    m, ell, m2 = p.m, p.ell, p.m2
    sporadic = {
        (1, 2): (_prod(_S(3), _S(2), _S(2)), _prod(_S(3), _S(1), _S(3)), _prod(_S(3), _S(2), _S(1), _S(1))),
        (1, 6): (_prod(_S(7), _S(6), _S(2)), _prod(_S(7), _S(1), _S(7)), _prod(_S(7), _S(6), _S(1), _S(1))),
        (2, 5): (_prod(_S(5), _S(7), _S(3)), _prod(_S(7), _S(2), _S(6)), _prod(_S(5), _S(7), _S(2), _S(1))),
        (3, 4): (_prod(_S(4), _S(7), _S(4)), _prod(_S(7), _S(3), _S(5)), _prod(_S(4), _S(7), _S(3), _S(1))),
    }
    listed = _in_s_m2_list(m, m2)
    status2 = _P if listed else _C
    notes2: tuple[str, ...] = ()
    if not listed:
        if xi_trivial(p):
            notes2 = (f"stably a product over M2 with fiber {_S(ell - m)}, but not homotopy equivalent to one",)
        else:
            notes2 = ("not homotopy equivalent to a product over M2; the stable question is open",)
    if (m, m2) in sporadic:
        s1, s2, sbar = sporadic[(m, m2)]
        return _Row(s1, s2, sbar, _P, status2, "OT-FKM pair with product focal submanifolds",
                    relation="not homotopy equivalent")
    if m == 1:
        s1 = _prod(_stiefel(m2 + 2), _S(2))
        sbar = _prod(_stiefel(m2 + 2), _S(1), _S(1))
        if listed:
            s2 = _prod(_S(m2 + 1), _S(1), _S(m2 + 1))
            return _Row(s1, s2, sbar, _P, _P, "OT-FKM pair with m = 1: Stiefel manifold focal submanifold",
                        relation="not homotopy equivalent")
        s2 = _bdl(_S(ell - m), _bdl(_S(ell), _S(m)))
        return _Row(s1, s2, sbar, _P, _C, "OT-FKM pair with m = 1: Stiefel manifold focal submanifold",
                    marker2="‡", notes2=notes2, relation="not homotopy equivalent")
    if eta_trivial(m, m2, p.q):
        s1 = _prod(_S(ell - 1), _S(ell - m - 1), _S(m + 1))
    else:
        s1 = _prod(_clifford_stiefel(m), _S(m + 1))
    sbar = _prod(_clifford_stiefel(m), _S(m), _S(1))
    if listed:
        s2 = _prod(_S(m), _S(m + m2), _S(m2 + 1))
        return _Row(s1, s2, sbar, _P, _P, "OT-FKM pair on the product list for S_M2",
                    relation="not homotopy equivalent")
    s2 = _bdl(_S(ell - m), _bdl(_S(ell), _S(m)))
    return _Row(s1, s2, sbar, _P, _C, "OT-FKM family: Clifford-Stiefel focal submanifold",
                marker2="‡", notes2=notes2, relation="not homotopy equivalent")


def _row_g6(tr: FoliationTriple, homogeneous: bool) -> _Row:
    prov = "g = 6 homogeneous foliation"
    if tr.m1 == 1:
        s = _bdl(_S(2), _prod(_S(3), "ℝP²"))
        return _Row(s, s, _prod("SO(4)/(ℤ₂⊕ℤ₂)", _S(1)), _NSP, _NSP, prov, "†", "†",
                    relation="diffeomorphic but not isometric")
    if not homogeneous:
        raise Unsupported("only the homogeneous (6,2,2) foliation is classified")
    return _Row(_bdl(_S(3), "Q⁵"), _bdl(_S(3), "Z_G₂"), _prod("G₂/(U(1) × U(1))", _S(1)), _NSP, _NSP,
                prov, "†", "†", relation="not homotopy equivalent")


def _row(triple: FoliationTriple, otfkm: OtFkmParams | None, homogeneous: bool) -> _Row:
    g = triple.g
    if g == 1:
        return _row_g1(triple)
    if g == 2:
        return _row_g2(triple)
    if g == 3:
        return _row_g3(triple)
    if g == 6:
        return _row_g6(triple, homogeneous)
    if (triple.m1, triple.m2) in ((2, 2), (4, 5), (5, 4)):
        if otfkm is not None:
            raise NotOtFkm(f"{triple} is an exceptional foliation, not OT-FKM")
        return _row_g4_exceptional(triple)
    p, swapped = otfkm_orientation(triple.m1, triple.m2, otfkm)
    r = _row_otfkm(p)
    if swapped:
        return _Row(r.s2, r.s1, r.sbar, r.status2, r.status1, r.provenance + " (focal roles exchanged)",
                    r.marker2, r.marker1, r.notes2, r.notes1, r.relation)
    return r


def classify(triple: FoliationTriple | tuple[int, int, int], otfkm: OtFkmParams | None = None,
             homogeneous: bool = True) -> list[BundleClassification]:
    """Diffeomorphism types of S_M1, S_M2 and Sbar_M with product verdicts."""
    if not isinstance(triple, FoliationTriple):
        triple = validate(*triple)
    elif triple.formal:
        triple = validate(triple.g, triple.m1, triple.m2)
    r = _row(triple, otfkm, homogeneous)
    return [
        BundleClassification("S_M1", r.s1, r.status1, r.provenance, r.marker1, r.notes1),
        BundleClassification("S_M2", r.s2, r.status2, r.provenance, r.marker2, r.notes2),
        BundleClassification("Sbar_M", r.sbar, _P, "product of the regular leaf with a circle"),
    ]


def surface_relation(triple: FoliationTriple | tuple[int, int, int],
                     otfkm: OtFkmParams | None = None) -> str:
    """How S_M1 and S_M2 compare: 'isometric', 'diffeomorphic but not isometric',
    'not homotopy equivalent', or 'same surface' when g <= 2 and m1 = m2."""
    if not isinstance(triple, FoliationTriple):
        triple = validate(*triple)
    if triple.g <= 2:
        return "same surface" if triple.m1 == triple.m2 else "not homotopy equivalent"
    return _row(triple, otfkm, True).relation


def _marked(s: str, marker: str) -> str:
    return f"{s} ({marker})" if marker else s


def markdown_table(rows: list[tuple[FoliationTriple, OtFkmParams | None]]) -> str:
    """Markdown rows with columns g, (m1,m2), ambient sphere, Type I and Type II."""
    lines = ["| g | (m1,m2) | sphere | Type I: S_M1, S_M2 | Type II: Sbar_M |",
             "|---|---|---|---|---|"]
    for triple, params in rows:
        c = classify(triple, params)
        star = "*" if triple.g == 4 and (triple.m1, triple.m2) in ((2, 2), (4, 5), (5, 4)) else ""
        if c[0].type_string == c[1].type_string:
            type1 = _marked(c[0].type_string, c[0].marker)
        else:
            type1 = f"{_marked(c[0].type_string, c[0].marker)}, {_marked(c[1].type_string, c[1].marker)}"
        lines.append(f"| {triple.g} | ({triple.m1},{triple.m2}){star} | {_S(triple.n)} | {type1} | "
                     f"{c[2].type_string} |")
    return "\n".join(lines) + "\n"

