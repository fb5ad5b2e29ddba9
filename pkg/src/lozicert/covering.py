"""Covering relations between marked quadrilaterals and the entropy bound.

``check_cover`` is a sufficient, exactly decidable test for ``Ni => Nj``
when ``L^n`` is affine on ``Ni``:

* S0: every stepwise image of ``Ni`` lies in a closed half-plane
  ``x >= 0`` or ``x <= 0``, so ``L^n`` agrees with one affine branch on it;
* S1: ``Nj`` lies in the closed strip between its vertical support lines
  (only parallel lines are accepted; otherwise the verdict is
  indeterminate);
* S2: the images of the vertical edges of ``Ni`` lie strictly outside the
  strip, on opposite sides;
* S3: ``image(Ni)`` cut down to the strip is contained in ``Nj``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .geometry import (
    ConvexPolygon,
    HalfPlane,
    Point,
    affine_image,
    clip_polygon,
    contains_polygon,
    cross,
    format_rational,
    line_intersection,
)
from .lozi import LoziParams, compose_branch, lozi_apply


class MarkedQuadrilateral:
    """Convex quadrilateral with vertical edges ``v0v1`` and ``v2v3``.

    Clockwise input is reordered to ``v1, v0, v3, v2`` which keeps the edge
    roles and makes the orientation positive.
    """

    def __init__(self, vertices: Sequence, name: str = ""):
        vs = [Point(Fraction(v[0]), Fraction(v[1])) for v in vertices]
        if len(vs) != 4:
            raise ValueError("a marked quadrilateral needs exactly four vertices")
        turns = [cross(vs[i - 1], vs[i], vs[(i + 1) % 4]) for i in range(4)]
        if all(t < 0 for t in turns):
            vs = [vs[1], vs[0], vs[3], vs[2]]
        elif not all(t > 0 for t in turns):
            raise ValueError("quadrilateral is not strictly convex")
        self.vertices = tuple(vs)
        self.name = name
        self.polygon = ConvexPolygon.from_points(vs)
        # vertical support lines must not meet inside the hull
        x = line_intersection(vs[0], vs[1], vs[2], vs[3])
        if x is not None and self.polygon.contains_point(x):
            raise ValueError("vertical support lines intersect inside the quadrilateral")

    @property
    def vertical_edges(self):
        v = self.vertices
        return (v[0], v[1]), (v[2], v[3])

    def swapped(self) -> "MarkedQuadrilateral":
        """Same box with the two vertical edges exchanged."""
        v = self.vertices
        return MarkedQuadrilateral([v[2], v[3], v[0], v[1]], self.name)

    def fiber(self, rho) -> tuple:
        """Endpoints of the horizontal fiber at height ``rho`` in [0, 1]."""
        rho = Fraction(rho)
        v0, v1, v2, v3 = self.vertices
        p = Point(v0.x + rho * (v1.x - v0.x), v0.y + rho * (v1.y - v0.y))
        q = Point(v3.x + rho * (v2.x - v3.x), v3.y + rho * (v2.y - v3.y))
        return p, q

    def to_json(self) -> dict:
        return {"name": self.name, "vertices": [v.to_json() for v in self.vertices],
                "vertical": [[0, 1], [2, 3]]}

    @classmethod
    def from_json(cls, data) -> "MarkedQuadrilateral":
        vs = [Point.from_json(v) for v in data["vertices"]]
        vert = data.get("vertical", [[0, 1], [2, 3]])
        first = vert[0]
        if sorted(first) not in ([0, 1], [1, 2], [2, 3], [0, 3]):
            raise ValueError("vertical edges must be opposite sides of the quadrilateral")
        # rotate so the first vertical edge becomes v0v1
        start = first[0] if (first[1] - first[0]) % 4 == 1 else first[1]
        vs = vs[start:] + vs[:start]
        return cls(vs, data.get("name", ""))

    def __repr__(self):
        return f"MarkedQuadrilateral({self.name!r}, {[tuple(map(str, v)) for v in self.vertices]})"


class CoverStatus(enum.Enum):
    COVERED = "Covered"
    NOT_COVERED = "NotCovered"
    INDETERMINATE = "Indeterminate"


@dataclass
class CoverVerdict:
    status: CoverStatus
    reason: str = ""
    itinerary: str = ""
    image: Optional[ConvexPolygon] = None
    clipped: Optional[ConvexPolygon] = None
    sides: tuple = ()

    @property
    def covered(self) -> bool:
        return self.status is CoverStatus.COVERED

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "reason": self.reason,
            "itinerary": self.itinerary,
            "image": self.image.to_json() if self.image else None,
            "clipped": self.clipped.to_json() if self.clipped else None,
            "sides": list(self.sides),
        }


def singularity_clearance(p: LoziParams, n: int, q, strict: bool = False) -> tuple:
    """Check every stepwise image of ``q`` stays in a closed half-plane of x.

    Returns ``(ok, itinerary)``. A polygon in ``{x >= 0}`` uses the ``+``
    branch, one in ``{x <= 0}`` the ``-`` branch; both agree on ``x = 0``.
    With ``strict`` no vertex may touch ``x = 0``.
    """
    verts = list(q.vertices if hasattr(q, "vertices") else q)
    signs = []
    for _ in range(n):
        xs = [v[0] for v in verts]
        if strict and any(x == 0 for x in xs):
            return False, "".join(signs)
        if all(x >= 0 for x in xs):
            signs.append("+")
        elif all(x <= 0 for x in xs):
            signs.append("-")
        else:
            return False, "".join(signs)
        verts = [lozi_apply(p, v) for v in verts]
    return True, "".join(signs)


def _strip(nj: MarkedQuadrilateral):
    """Normal and the closed value range of the strip between vertical lines."""
    (a0, a1), (b0, b1) = nj.vertical_edges
    d = (a1.x - a0.x, a1.y - a0.y)
    e = (b1.x - b0.x, b1.y - b0.y)
    if d[0] * e[1] - d[1] * e[0] != 0:
        return None
    normal = (-d[1], d[0])
    s_a = normal[0] * a0.x + normal[1] * a0.y
    s_b = normal[0] * b0.x + normal[1] * b0.y
    return normal, s_a, s_b


def check_cover(p: LoziParams, n: int, ni: MarkedQuadrilateral, nj: MarkedQuadrilateral) -> CoverVerdict:
    ok, it = singularity_clearance(p, n, ni.vertices)
    if not ok:
        return CoverVerdict(CoverStatus.INDETERMINATE, f"S0: image straddles x = 0 at step {len(it)}", it)
    br = compose_branch(p, it)
    if br.det() == 0:
        raise ValueError("non-invertible branch")
    image_vertices = [br.apply(v) for v in ni.vertices]
    image = affine_image(ni.polygon, br.linear, br.translation)
    strip = _strip(nj)
    if strip is None:
        return CoverVerdict(CoverStatus.INDETERMINATE, "S1: vertical support lines are not parallel", it, image)
    normal, s_a, s_b = strip
    lo, hi = min(s_a, s_b), max(s_a, s_b)

    def side(pt):
        s = normal[0] * pt.x + normal[1] * pt.y
        return -1 if s < lo else (1 if s > hi else 0)

    e0 = {side(image_vertices[0]), side(image_vertices[1])}
    e1 = {side(image_vertices[2]), side(image_vertices[3])}
    if len(e0) != 1 or len(e1) != 1 or 0 in e0 or 0 in e1 or e0 == e1:
        return CoverVerdict(CoverStatus.NOT_COVERED,
                            "S2: vertical edge images are not strictly outside the strip on opposite sides",
                            it, image, sides=(sorted(e0), sorted(e1)))
    clipped = clip_polygon(image, HalfPlane(normal, lo, True))
    if clipped is not None:
        clipped = clip_polygon(clipped, HalfPlane((-normal[0], -normal[1]), -hi, True))
    if clipped is None or not contains_polygon(nj.polygon, clipped):
        return CoverVerdict(CoverStatus.NOT_COVERED, "S3: image inside the strip leaves the target box",
                            it, image, clipped, (e0.pop(), e1.pop()))
    return CoverVerdict(CoverStatus.COVERED, "", it, image, clipped, (e0.pop(), e1.pop()))


@dataclass
class TransitionMatrix:
    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def tolist(self) -> list:
        return self.entries.astype(int).tolist()


def build_matrix(verdicts) -> TransitionMatrix:
    """0/1 matrix; indeterminate verdicts count as 0."""
    m = np.array([[1 if v.status is CoverStatus.COVERED else 0 for v in row] for row in verdicts],
                 dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("verdict table must be square")
    return TransitionMatrix(m)


@dataclass
class EntropyBound:
    spectral_radius: float  # rounded down
    spectral_radius_upper: float  # rounded up
    bound: float
    n: int
    radius_exact_lower: Fraction = field(default=Fraction(0), repr=False)

    def to_json(self) -> dict:
        return {
            "spectral_radius_lower": self.spectral_radius,
            "spectral_radius_upper": self.spectral_radius_upper,
            "spectral_radius_lower_exact": format_rational(self.radius_exact_lower),
            "bound": self.bound,
            "iterate": self.n,
        }


def _float_down(q: Fraction) -> float:
    f = float(q)
    return math.nextafter(f, -math.inf) if Fraction(f) > q else f


def _float_up(q: Fraction) -> float:
    f = float(q)
    return math.nextafter(f, math.inf) if Fraction(f) < q else f


def _collatz_wielandt(block: np.ndarray, iterations: int) -> tuple:
    """Exact (lower, upper) bounds on the spectral radius of an irreducible block."""
    v = np.ones(block.shape[0])
    for _ in range(iterations):
        w = block @ v
        norm = w.max()
        if norm == 0:
            return Fraction(0), Fraction(0)
        v = w / norm
    vq = [Fraction(float(x)) for x in v]
    if any(x <= 0 for x in vq):
        return Fraction(0), Fraction(int(block.sum(axis=1).max()))
    rows = [[int(a) for a in r] for r in block]
    ratios = [sum(a * x for a, x in zip(r, vq)) / vi for r, vi in zip(rows, vq)]
    return min(ratios), max(ratios)


def charpoly(m) -> list:
    """Exact characteristic polynomial coefficients (leading 1) by Faddeev-LeVerrier."""
    rows = [[Fraction(int(a)) for a in r] for r in m]
    n = len(rows)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        prod = [[sum(rows[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        mk = [[prod[i][j] + coeffs[-1] * ident[i][j] for j in range(n)] for i in range(n)]
        am = [[sum(rows[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(am[i][i] for i in range(n)) / k)
    return coeffs


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def root_bracket(m, lower: Fraction, upper: Fraction, steps: int = 64) -> Optional[tuple]:
    """Bisect a real root of the characteristic polynomial inside [lower, upper].

    Returns None when the polynomial has no sign change on the interval.
    Any root found is at most the spectral radius, so the left end of the
    bracket is itself a valid lower bound.
    """
    coeffs = charpoly(m)
    lo, hi = Fraction(lower), Fraction(upper)
    flo, fhi = _poly_eval(coeffs, lo), _poly_eval(coeffs, hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        return None
    for _ in range(steps):
        mid = (lo + hi) / 2
        fm = _poly_eval(coeffs, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def entropy_lower_bound(m, n: int, iterations: int = 200) -> EntropyBound:
    """``log(lambda_1) / n`` with ``lambda_1`` bounded from below exactly.

    Power iteration supplies a positive vector; the Collatz-Wielandt ratios
    of that vector, evaluated in rational arithmetic, bracket the spectral
    radius of each strongly connected block. For small matrices the bracket
    is tightened by bisecting the exact characteristic polynomial.
    """
    a = np.asarray(m.entries if isinstance(m, TransitionMatrix) else m, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if np.any((a != 0) & (a != 1)):
        raise ValueError("matrix entries must be 0 or 1")
    best_lo, best_hi = Fraction(0), Fraction(0)
    if a.any():
        ncomp, labels = connected_components(a, directed=True, connection="strong")
        for c in range(ncomp):
            idx = np.flatnonzero(labels == c)
            block = a[np.ix_(idx, idx)].astype(float)
            if not block.any():
                continue
            lo, hi = _collatz_wielandt(block, iterations)
            best_lo, best_hi = max(best_lo, lo), max(best_hi, hi)
        if a.shape[0] <= 4 and best_lo > 0:
            bracket = root_bracket(a, best_lo, best_hi)
            if bracket is not None:
                best_lo = max(best_lo, bracket[0])
    lam_lo = _float_down(best_lo)
    lam_hi = _float_up(best_hi)
    if lam_lo <= 1.0:
        bound = 0.0
    else:
        bound = max(math.nextafter(math.log(lam_lo) / n, -math.inf), 0.0)
    return EntropyBound(lam_lo, lam_hi, bound, n, best_lo)


@dataclass
class CoverReport:
    params: LoziParams
    n: int
    boxes: list
    verdicts: list
    matrix: TransitionMatrix
    entropy: EntropyBound

    def to_json(self) -> dict:
        return {
            "params": {"a": format_rational(self.params.a), "b": format_rational(self.params.b)},
            "iterate": self.n,
            "boxes": [b.to_json() for b in self.boxes],
            "verdicts": [[v.to_json() for v in row] for row in self.verdicts],
            "matrix": self.matrix.tolist(),
            "entropy": self.entropy.to_json(),
        }


def certify(p: LoziParams, n: int, boxes: Sequence[MarkedQuadrilateral]) -> CoverReport:
    verdicts = [[check_cover(p, n, bi, bj) for bj in boxes] for bi in boxes]
    matrix = build_matrix(verdicts)
    return CoverReport(p, n, list(boxes), verdicts, matrix, entropy_lower_bound(matrix, n))


# vertex = (0, f2_height) + eps1 * offset
VERTEX_OFFSETS = {
    "A": (Fraction(0), Fraction(-1)),
    "B": (Fraction(1), Fraction(7, 2)),
    "C": (Fraction(5, 2), Fraction(5, 2)),
    "D": (Fraction(3, 2), Fraction(-2)),
    "E": (Fraction(-3), Fraction(7, 2)),
    "F": (Fraction(-2), Fraction(5, 6)),
    "G": (Fraction(0), Fraction(-1, 2)),
    "H": (Fraction(-1), Fraction(13, 6)),
}


def reference_vertices(eps1, f2_height=Fraction(15, 29)) -> dict:
    """Named vertices A..H around ``(0, f2_height)`` as exact points."""
    e, h = Fraction(eps1), Fraction(f2_height)
    if e <= 0:
        raise ValueError("eps1 must be positive")
    return {k: Point(dx * e, h + dy * e) for k, (dx, dy) in VERTEX_OFFSETS.items()}


def reference_boxes(eps1, f2_height=Fraction(15, 29)) -> tuple:
    """N1 = ABCD (vertical edges AB, CD) and N2 = EFGH (vertical EF, GH)."""
    v = reference_vertices(eps1, f2_height)
    return (MarkedQuadrilateral([v[k] for k in "ABCD"], "N1"),
            MarkedQuadrilateral([v[k] for k in "EFGH"], "N2"))
