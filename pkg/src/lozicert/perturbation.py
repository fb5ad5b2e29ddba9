"""First-order behaviour of the box vertices under ``L^4`` as ``a`` grows.

Parameters are ``a = 7/5 + eps2 + eps``, ``b = 2/5 + eps2`` where ``eps2`` is
a concrete rational and ``eps`` is the symbolic small parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .covering import VERTEX_OFFSETS, CoverReport, certify, reference_boxes
from .epspoly import EpsPoint, EpsPoly, lozi_iterate_eps, sign_string
from .fixed_points import f2_point
from .geometry import Point, format_rational
from .lozi import LoziParams, iterate
from .trapping import segment_family_params

REGIME = Fraction(1, 10)
VERTEX_NAMES = tuple(VERTEX_OFFSETS)


def _trunc(q: Fraction, digits: int) -> Fraction:
    scale = 10**digits
    return Fraction(int(q * scale), scale)  # int() truncates toward zero


@dataclass(frozen=True)
class CoefficientPair:
    vertex: str
    x_lin: Fraction
    y_lin: Fraction
    constant: Point
    signs: str  # |x| sign choices at each of the four steps
    outside_regime: bool = False

    def rounded(self, digits: int = 2) -> tuple:
        return (round(float(self.x_lin), digits), round(float(self.y_lin), digits))

    def truncated(self, digits: int = 2) -> tuple:
        """Decimal truncation toward zero, exact."""
        return tuple(_trunc(v, digits) for v in (self.x_lin, self.y_lin))

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "x_lin": format_rational(self.x_lin),
            "y_lin": format_rational(self.y_lin),
            "x_lin_evidence": float(self.x_lin),
            "y_lin_evidence": float(self.y_lin),
            "constant": self.constant.to_json(),
            "signs": self.signs,
            "outside_argued_regime": self.outside_regime,
        }


def vertex_point_eps(eps2, vertex_id: str) -> EpsPoint:
    h = f2_point(segment_family_params(eps2)).y
    dx, dy = VERTEX_OFFSETS[vertex_id]
    return EpsPoint(EpsPoly.linear(0, dx), EpsPoly.linear(h, dy))


def vertex_expansion(eps2, vertex_id: str) -> CoefficientPair:
    eps2 = Fraction(eps2)
    if vertex_id not in VERTEX_OFFSETS:
        raise KeyError(f"unknown vertex {vertex_id!r}")
    a = EpsPoly.linear(Fraction(7, 5) + eps2, 1)
    b = EpsPoly.const(Fraction(2, 5) + eps2)
    log: list = []
    img = lozi_iterate_eps(a, b, vertex_point_eps(eps2, vertex_id), 4, log)
    return CoefficientPair(
        vertex_id,
        img.x.linear_coeff,
        img.y.linear_coeff,
        Point(img.x.constant, img.y.constant),
        sign_string(log),
        abs(eps2) >= REGIME,
    )


@dataclass
class DriftTable:
    eps2: Fraction
    rows: list
    max_drift: Fraction

    def to_json(self) -> dict:
        return {
            "eps2": format_rational(self.eps2),
            "rows": [r.to_json() for r in self.rows],
            "max_drift": format_rational(self.max_drift),
            "max_drift_evidence": float(self.max_drift),
        }


def coefficient_drift(eps2) -> DriftTable:
    """All eight expansions and their largest deviation from ``eps2 = 0``."""
    rows = [vertex_expansion(eps2, v) for v in VERTEX_NAMES]
    base = [vertex_expansion(0, v) for v in VERTEX_NAMES]
    drift = max(
        max(abs(r.x_lin - b0.x_lin), abs(r.y_lin - b0.y_lin)) for r, b0 in zip(rows, base)
    )
    return DriftTable(Fraction(eps2), rows, drift)


def exact_vertex_image(eps1, eps2, vertex_id: str) -> Point:
    """``L^4`` of the numeric vertex at ``a = 7/5 + eps1 + eps2``."""
    eps1, eps2 = Fraction(eps1), Fraction(eps2)
    base = segment_family_params(eps2)
    h = f2_point(base).y
    dx, dy = VERTEX_OFFSETS[vertex_id]
    p = LoziParams(base.a + eps1, base.b)
    return iterate(p, Point(dx * eps1, h + dy * eps1), 4)


def jump_params(eps1, eps2) -> LoziParams:
    base = segment_family_params(eps2)
    return LoziParams(base.a + Fraction(eps1), base.b)


def covering_family_check(eps1, eps2) -> CoverReport:
    """Covering matrix and entropy bound for the shifted boxes at numeric parameters."""
    eps1, eps2 = Fraction(eps1), Fraction(eps2)
    h = f2_point(segment_family_params(eps2)).y
    return certify(jump_params(eps1, eps2), 4, reference_boxes(eps1, h))
