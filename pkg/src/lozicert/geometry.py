"""Exact rational planar geometry.

Everything here works on :class:`fractions.Fraction` and never rounds.
Polygons are convex, counter-clockwise and canonicalized (collinear
vertices dropped, lexicographically smallest vertex first), so two
polygons describing the same set compare equal with ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

RationalLike = Union[int, str, Fraction]


def rat(num: RationalLike, den: RationalLike = 1) -> Fraction:
    """Build a reduced rational, e.g. ``rat(30, 58) == Fraction(15, 29)``."""
    den = Fraction(den)
    if den == 0:
        raise ZeroDivisionError("division by zero")
    return Fraction(num) / den


def parse_rational(token: str) -> Fraction:
    """Parse ``"num/den"`` or an integer/decimal literal exactly."""
    try:
        return Fraction(str(token).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {token!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike) -> "Point":
        return cls(Fraction(x), Fraction(y))

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, s) -> "Point":
        return Point(self.x * s, self.y * s)

    def to_json(self) -> list:
        return [format_rational(self.x), format_rational(self.y)]

    @classmethod
    def from_json(cls, data: Sequence) -> "Point":
        return cls(parse_rational(data[0]), parse_rational(data[1]))


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """z-component of (a - o) x (b - o)."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


@dataclass(frozen=True)
class HalfPlane:
    """``normal . p >= offset`` when closed, ``normal . p > offset`` otherwise.

    ``degenerate=True`` admits a zero normal: the constraint then holds
    everywhere or nowhere. Branch composition needs this when ``a = b = 0``.
    """

    normal: tuple
    offset: Fraction
    closed: bool = True
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        nx, ny = (Fraction(v) for v in self.normal)
        if nx == 0 and ny == 0 and not self.degenerate:
            raise ValueError("half-plane normal must be nonzero")
        object.__setattr__(self, "normal", (nx, ny))
        object.__setattr__(self, "offset", Fraction(self.offset))

    def value(self, p: Point) -> Fraction:
        return self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset

    def contains(self, p: Point) -> bool:
        v = self.value(p)
        return v >= 0 if self.closed else v > 0

    def closure(self) -> "HalfPlane":
        return HalfPlane(self.normal, self.offset, True, self.degenerate)

    def complement(self) -> "HalfPlane":
        return HalfPlane((-self.normal[0], -self.normal[1]), -self.offset, not self.closed, self.degenerate)


def _canonical_vertices(points: Iterable[Point]) -> tuple:
    pts = [Point(Fraction(p[0]), Fraction(p[1])) for p in points]
    dedup = []
    for p in pts:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    while len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    if _signed_area2(dedup) < 0:
        dedup.reverse()
    # drop collinear vertices until stable
    changed = True
    while changed and len(dedup) >= 3:
        changed = False
        n = len(dedup)
        for i in range(n):
            if cross(dedup[i - 1], dedup[i], dedup[(i + 1) % n]) == 0:
                del dedup[i]
                changed = True
                break
    if not dedup:
        return ()
    start = min(range(len(dedup)), key=lambda i: dedup[i])
    return tuple(dedup[start:] + dedup[:start])


def _signed_area2(pts: Sequence[Point]) -> Fraction:
    n = len(pts)
    s = Fraction(0)
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        s += p.x * q.y - q.x * p.y
    return s


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: tuple

    def __post_init__(self):
        verts = _canonical_vertices(self.vertices)
        if len(verts) < 3:
            raise ValueError("degenerate polygon (fewer than 3 non-collinear vertices)")
        n = len(verts)
        for i in range(n):
            if cross(verts[i - 1], verts[i], verts[(i + 1) % n]) <= 0:
                raise ValueError("polygon is not convex")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points: Iterable) -> "ConvexPolygon":
        return cls(tuple(Point(Fraction(p[0]), Fraction(p[1])) for p in points))

    @classmethod
    def try_from_points(cls, points: Iterable) -> Optional["ConvexPolygon"]:
        """Like :meth:`from_points` but returns None for degenerate input."""
        verts = _canonical_vertices(points)
        if len(verts) < 3:
            return None
        return cls(verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def edge_halfplanes(self) -> list:
        """Closed half-planes whose intersection is the polygon."""
        out = []
        for p, q in self.edges():
            # left side of p->q: (q - p) x (r - p) >= 0
            nx, ny = -(q.y - p.y), q.x - p.x
            out.append(HalfPlane((nx, ny), nx * p.x + ny * p.y, True))
        return out

    def contains_point(self, p: Point) -> bool:
        return all(h.contains(p) for h in self.edge_halfplanes())

    def area(self) -> Fraction:
        return polygon_area(self)

    def to_json(self) -> list:
        return [v.to_json() for v in self.vertices]

    @classmethod
    def from_json(cls, data) -> "ConvexPolygon":
        return cls(tuple(Point.from_json(v) for v in data))

    def as_floats(self) -> list:
        return [(float(v.x), float(v.y)) for v in self.vertices]


def polygon_area(p: ConvexPolygon) -> Fraction:
    """Shoelace area; always positive for a valid polygon."""
    return _signed_area2(p.vertices) / 2


def _clip_points(verts: Sequence[Point], h: HalfPlane) -> list:
    out = []
    n = len(verts)
    for i in range(n):
        cur, nxt = verts[i], verts[(i + 1) % n]
        vc, vn = h.value(cur), h.value(nxt)
        if vc >= 0:
            out.append(cur)
        if (vc > 0 and vn < 0) or (vc < 0 and vn > 0):
            t = vc / (vc - vn)
            out.append(Point(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)))
    return out


def clip_polygon(p: ConvexPolygon, h: HalfPlane) -> Optional[ConvexPolygon]:
    """Exact intersection of ``p`` with the closure of ``h``.

    Returns None when the intersection has zero area (empty, a point or a
    segment): polygons are two-dimensional by construction.
    """
    return ConvexPolygon.try_from_points(_clip_points(p.vertices, h))


def intersect_polygons(a: ConvexPolygon, b: ConvexPolygon) -> Optional[ConvexPolygon]:
    verts: list = list(a.vertices)
    for h in b.edge_halfplanes():
        verts = _clip_points(verts, h)
        if len(verts) < 3:
            return None
    return ConvexPolygon.try_from_points(verts)


def contains_polygon(outer: ConvexPolygon, inner: ConvexPolygon) -> bool:
    """True iff ``inner`` lies in the closed ``outer`` (area criterion)."""
    common = intersect_polygons(inner, outer)
    return common is not None and common.area() == inner.area()


def affine_image(poly: ConvexPolygon, linear, translation) -> ConvexPolygon:
    """Image of ``poly`` under ``p -> linear @ p + translation`` (invertible)."""
    (m00, m01), (m10, m11) = linear
    cx, cy = translation
    pts = [Point(m00 * v.x + m01 * v.y + cx, m10 * v.x + m11 * v.y + cy) for v in poly.vertices]
    return ConvexPolygon.from_points(pts)


def line_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Optional[Point]:
    """Intersection of the lines p1p2 and q1q2, or None if parallel."""
    d = (p2.x - p1.x) * (q2.y - q1.y) - (p2.y - p1.y) * (q2.x - q1.x)
    if d == 0:
        return None
    t = ((q1.x - p1.x) * (q2.y - q1.y) - (q1.y - p1.y) * (q2.x - q1.x)) / d
    return Point(p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y))


def square(x0, y0, side) -> ConvexPolygon:
    """Axis-aligned square with lower-left corner (x0, y0)."""
    x0, y0, s = Fraction(x0), Fraction(y0), Fraction(side)
    return ConvexPolygon.from_points([(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)])
