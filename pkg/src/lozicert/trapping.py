"""Exact piecewise images of polygons under ``L^n`` and trapping certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .fixed_points import f2_point
from .geometry import ConvexPolygon, Point, affine_image, clip_polygon, contains_polygon, format_rational
from .lozi import LoziParams, compose_branch, iterate

DEFAULT_BUDGET = 64
PERIOD4_ITINERARY = "-+-+"  # branch of L^4 on the open segment F1F2


class FragmentBudgetExceeded(RuntimeError):
    pass


@dataclass
class PiecewiseImage:
    """``pieces`` holds ``(itinerary, source_fragment, image)`` triples."""

    pieces: list

    @property
    def images(self) -> list:
        return [img for _, _, img in self.pieces]

    def total_area(self) -> Fraction:
        return sum((img.area() for img in self.images), Fraction(0))


def split_by_itinerary(p: LoziParams, n: int, src: ConvexPolygon, budget: int = DEFAULT_BUDGET) -> list:
    """Cut ``src`` along the pulled-back lines ``{x = 0}`` of the first ``n`` steps."""
    frags = [("", src)]
    for _ in range(n):
        nxt = []
        for it, frag in frags:
            h = compose_branch(p, it + "+").domain[-1]
            for sign, half in (("+", h), ("-", h.complement())):
                piece = clip_polygon(frag, half)
                if piece is not None:
                    nxt.append((it + sign, piece))
        if len(nxt) > budget:
            raise FragmentBudgetExceeded(f"fragment budget exceeded ({len(nxt)} > {budget})")
        frags = nxt
    return frags


def image_piecewise(p: LoziParams, n: int, src: ConvexPolygon, budget: int = DEFAULT_BUDGET) -> PiecewiseImage:
    pieces = []
    for it, frag in split_by_itinerary(p, n, src, budget):
        br = compose_branch(p, it)
        if br.det() == 0:
            raise ValueError("non-invertible branch")
        pieces.append((it, frag, affine_image(frag, br.linear, br.translation)))
    return PiecewiseImage(pieces)


@dataclass
class TrappingStep:
    step: int
    pieces: int
    area: Fraction
    expected_area: Fraction
    contained: bool
    max_distance_to_segment: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "step": self.step,
            "pieces": self.pieces,
            "area": format_rational(self.area),
            "expected_area": format_rational(self.expected_area),
            "contained": self.contained,
        }
        if self.max_distance_to_segment is not None:
            out["max_distance_to_segment_evidence"] = self.max_distance_to_segment
        return out


@dataclass
class TrappingCertificate:
    params: LoziParams
    n: int
    region: ConvexPolygon
    passed: bool
    steps: list = field(default_factory=list)
    layers: list = field(default_factory=list)  # image polygons per step
    offending: Optional[tuple] = None  # (step, itinerary, polygon)

    def to_json(self) -> dict:
        return {
            "params": {"a": format_rational(self.params.a), "b": format_rational(self.params.b)},
            "iterate": self.n,
            "region": self.region.to_json(),
            "passed": self.passed,
            "steps": [s.to_json() for s in self.steps],
            "layers": [[poly.to_json() for poly in layer] for layer in self.layers],
            "offending": None if self.offending is None else {
                "step": self.offending[0],
                "itinerary": self.offending[1],
                "polygon": self.offending[2].to_json(),
            },
        }


def _distance_to_segment(pt, a, b) -> float:
    px, py = float(pt[0]), float(pt[1])
    ax, ay, bx, by = float(a[0]), float(a[1]), float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def verify_trapping(p: LoziParams, n: int, region: ConvexPolygon, steps: int = 2,
                    budget: int = DEFAULT_BUDGET, segment: Optional[tuple] = None) -> TrappingCertificate:
    """Check that ``L^(n k)(region)`` stays in ``region`` for ``k = 1..steps``.

    ``segment`` (two points) enables the non-certified contraction
    diagnostic: the largest distance of a piece vertex to that segment.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    cert = TrappingCertificate(p, n, region, True)
    current = [region]
    scale = abs(p.b) ** n
    expected = region.area()
    for k in range(1, steps + 1):
        nxt = []
        for poly in current:
            for it, _, img in image_piecewise(p, n, poly, budget).pieces:
                nxt.append((it, img))
        expected *= scale
        area = sum((img.area() for _, img in nxt), Fraction(0))
        bad = next(((it, img) for it, img in nxt if not contains_polygon(region, img)), None)
        dist = None
        if segment is not None:
            dist = max(_distance_to_segment(v, *segment) for _, img in nxt for v in img.vertices)
        cert.steps.append(TrappingStep(k, len(nxt), area, expected, bad is None, dist))
        cert.layers.append([img for _, img in nxt])
        if bad is not None:
            cert.passed = False
            cert.offending = (k, bad[0], bad[1])
            break
        current = [img for _, img in nxt]
    return cert


def stable_slope(p: LoziParams, itinerary: str = PERIOD4_ITINERARY) -> Fraction:
    """Exact slope of the contracting eigendirection on the period-4 segment.

    The branch matrix there has eigenvalues 1 (along the segment) and
    ``b^4``; the second eigenvector is rational.
    """
    br = compose_branch(p, itinerary)
    (m00, m01), (m10, m11) = br.linear
    det = br.det()
    if m00 + m11 != 1 + det:
        raise ValueError("parameters carry no segment of period-4 points")
    lam = det
    if lam == 1:
        raise ValueError("stable direction undefined (degenerate eigenvalue)")
    if m01 != 0:
        vx, vy = m01, lam - m00
    else:
        vx, vy = lam - m11, m10
    if vx == 0:
        raise ValueError("stable direction is vertical")
    return vy / vx


def trapping_vertices(p: LoziParams) -> dict:
    """Named hexagon vertices R1, F1, R2, R3, F2, R4 for parameters on the segment family."""
    f2 = f2_point(p)
    if iterate(p, f2, 4) != f2:
        raise ValueError("F2 is not a period-4 point for these parameters")
    f1 = iterate(p, f2, 2)
    s = stable_slope(p)
    return {
        "R1": Point(f1.x, f1.y + Fraction(1, 5)),
        "F1": f1,
        "R2": Point(f1.x + Fraction(1, 10), f1.y + Fraction(1, 10) * s),
        "R3": Point(f2.x, f2.y - Fraction(1, 4)),
        "F2": f2,
        "R4": Point(f2.x - Fraction(1, 5), f2.y - Fraction(1, 5) * s),
    }


def trapping_region_for(p: LoziParams) -> ConvexPolygon:
    v = trapping_vertices(p)
    return ConvexPolygon.from_points([v[k] for k in ("R1", "F1", "R2", "R3", "F2", "R4")])


def segment_family_params(eps2) -> LoziParams:
    """``(7/5 + eps2, 2/5 + eps2)``, the zero-entropy parameter segment."""
    e = Fraction(eps2)
    return LoziParams(Fraction(7, 5) + e, Fraction(2, 5) + e)
