"""Exact fixed points of ``L^n``: one linear solve per affine branch."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .geometry import Point, format_rational
from .lozi import (
    AffineBranch,
    LoziParams,
    all_itineraries,
    branch_contains,
    compose_branch,
    iterate,
)

MAX_PERIOD = 12


@dataclass(frozen=True)
class IsolatedPoint:
    point: Point


@dataclass(frozen=True)
class Segment:
    start: Point
    end: Point

    def __post_init__(self):
        if self.end < self.start:
            s, e = self.end, self.start
            object.__setattr__(self, "start", s)
            object.__setattr__(self, "end", e)

    def point_at(self, t) -> Point:
        t = Fraction(t)
        return Point(self.start.x + t * (self.end.x - self.start.x),
                     self.start.y + t * (self.end.y - self.start.y))


@dataclass(frozen=True)
class WholeDomain:
    pass


@dataclass(frozen=True)
class Empty:
    candidate: Optional[Point] = None
    failed: tuple = ()  # indices of violated step constraints


BranchFixedSet = Union[IsolatedPoint, Segment, WholeDomain, Empty]


def _rank2(m) -> int:
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0:
        return 2
    return 0 if all(v == 0 for row in m for v in row) else 1


def _line_in_domain(br: AffineBranch, p0: Point, d: tuple) -> BranchFixedSet:
    """Intersect the line ``p0 + t d`` with the closed branch domain."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for h in br.closed_domain():
        nd = h.normal[0] * d[0] + h.normal[1] * d[1]
        v0 = h.value(p0)
        if nd == 0:
            if v0 < 0:
                return Empty()
            continue
        t = -v0 / nd
        if nd > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    if lo is None or hi is None:
        raise ValueError("unbounded set of fixed points")
    if lo > hi:
        return Empty()
    a = Point(p0.x + lo * d[0], p0.y + lo * d[1])
    if lo == hi:
        return IsolatedPoint(a)
    return Segment(a, Point(p0.x + hi * d[0], p0.y + hi * d[1]))


def solve_branch_fixed(br: AffineBranch) -> BranchFixedSet:
    """Solve ``(I - M) p = c`` on one branch, exactly."""
    (m00, m01), (m10, m11) = br.linear
    a = ((1 - m00, -m01), (-m10, 1 - m11))
    c0, c1 = br.translation
    rank = _rank2(a)
    if rank == 2:
        det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        pt = Point((c0 * a[1][1] - a[0][1] * c1) / det, (a[0][0] * c1 - c0 * a[1][0]) / det)
        if branch_contains(br, pt):
            return IsolatedPoint(pt)
        return Empty(pt, tuple(br.failed_constraints(pt)))
    if rank == 0:
        return WholeDomain() if c0 == 0 and c1 == 0 else Empty()
    # rank one: pick a nonzero row as the line equation, check consistency
    row, rhs = (a[0], c0) if any(a[0]) else (a[1], c1)
    other, orhs = (a[1], c1) if row is a[0] else (a[0], c0)
    # other = k * row must come with orhs = k * rhs
    k = other[0] / row[0] if row[0] != 0 else other[1] / row[1]
    if orhs != k * rhs:
        return Empty()
    if row[0] != 0:
        p0 = Point(rhs / row[0], Fraction(0))
    else:
        p0 = Point(Fraction(0), rhs / row[1])
    direction = (-row[1], row[0])
    return _line_in_domain(br, p0, direction)


@dataclass
class FixedPointSet:
    params: LoziParams
    period: int
    points: list = field(default_factory=list)  # (Point, itineraries)
    segments: list = field(default_factory=list)  # (Segment, itineraries)
    rejected: list = field(default_factory=list)  # (itinerary, Empty)

    def point_set(self) -> set:
        return {p for p, _ in self.points}

    def segment_set(self) -> set:
        return {(s.start, s.end) for s, _ in self.segments}

    def to_json(self) -> dict:
        return {
            "params": {"a": format_rational(self.params.a), "b": format_rational(self.params.b)},
            "period": self.period,
            "points": [{"point": p.to_json(), "itineraries": list(its)} for p, its in self.points],
            "segments": [
                {"start": s.start.to_json(), "end": s.end.to_json(), "itineraries": list(its)}
                for s, its in self.segments
            ],
            "rejected": [
                {
                    "itinerary": it,
                    "candidate": e.candidate.to_json() if e.candidate is not None else None,
                    "failed_steps": list(e.failed),
                }
                for it, e in self.rejected
            ],
        }


def _collinear(s: Segment, t: Segment) -> bool:
    d = (s.end.x - s.start.x, s.end.y - s.start.y)
    for q in (t.start, t.end):
        if d[0] * (q.y - s.start.y) - d[1] * (q.x - s.start.x) != 0:
            return False
    return True


def _on_segment(p: Point, s: Segment) -> bool:
    d = (s.end.x - s.start.x, s.end.y - s.start.y)
    if d[0] * (p.y - s.start.y) - d[1] * (p.x - s.start.x) != 0:
        return False
    return s.start <= p <= s.end


def _merge_segments(items: list) -> list:
    """Merge collinear segments that overlap or touch."""
    items = sorted(items, key=lambda it: (it[0].start, it[0].end))
    merged: list = []
    for seg, its in items:
        for k, (m, mits) in enumerate(merged):
            if _collinear(m, seg) and (_on_segment(seg.start, m) or _on_segment(m.start, seg)):
                merged[k] = (Segment(min(m.start, seg.start), max(m.end, seg.end)), mits | its)
                break
        else:
            merged.append((seg, set(its)))
    if len(merged) < len(items):
        return _merge_segments(merged)
    return merged


def enumerate_fixed_points(p: LoziParams, n: int) -> FixedPointSet:
    """All fixed points of ``L^n``, merged into maximal segments."""
    if n < 1:
        raise ValueError("period must be positive")
    if n > MAX_PERIOD:
        raise ValueError("branch budget exceeded")
    points: dict = {}
    segments: list = []
    rejected: list = []
    for it in all_itineraries(n):
        res = solve_branch_fixed(compose_branch(p, it))
        if isinstance(res, IsolatedPoint):
            points.setdefault(res.point, set()).add(it)
        elif isinstance(res, Segment):
            segments.append((res, {it}))
        elif isinstance(res, Empty):
            if res.candidate is not None:
                rejected.append((it, res))
        else:
            raise ValueError("branch is the identity: every domain point is fixed")
    segments = _merge_segments(segments)
    # isolated solutions that sit on a reported segment are absorbed into it
    final_points = []
    for pt, its in sorted(points.items()):
        host = next((k for k, (s, _) in enumerate(segments) if _on_segment(pt, s)), None)
        if host is None:
            final_points.append((pt, tuple(sorted(its))))
        else:
            s, sits = segments[host]
            segments[host] = (s, sits | its)
    out_segments = [(s, tuple(sorted(its))) for s, its in sorted(segments, key=lambda x: (x[0].start, x[0].end))]
    return FixedPointSet(p, n, final_points, out_segments, rejected)


def is_fixed(p: LoziParams, pt, n: int) -> bool:
    return iterate(p, pt, n) == Point(*pt)


def f2_point(p: LoziParams) -> Point:
    """Right endpoint ``(0, (1 - b^2) / (a (1 + b^2)))`` of the period-4 segment."""
    if p.a == 0:
        raise ValueError("a must be nonzero")
    return Point(Fraction(0), (1 - p.b**2) / (p.a * (1 + p.b**2)))
