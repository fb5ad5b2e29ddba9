"""Floating-point evidence: manifold tracing, critical lines, entropy estimates.

Nothing in this module certifies anything. Every result carries
``tag == "numerical evidence"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from matplotlib.path import Path
from scipy.spatial import cKDTree

from .lozi import LoziParams, saddle_data

EVIDENCE = "numerical evidence"
VIEWPORT = (-2.0, 2.0, -2.0, 2.0)


@dataclass
class PolylineF64:
    pieces: list  # list of (k, 2) float arrays
    role: str
    escaped: bool = False
    tag: str = EVIDENCE
    info: dict = field(default_factory=dict)

    @property
    def points(self) -> np.ndarray:
        if not self.pieces:
            return np.empty((0, 2))
        return np.concatenate(self.pieces)

    def arclength(self) -> float:
        return float(sum(np.linalg.norm(np.diff(p, axis=0), axis=1).sum() for p in self.pieces))

    def to_csv(self) -> str:
        rows = ["piece,x,y"]
        for k, piece in enumerate(self.pieces):
            rows.extend(f"{k},{x:.17g},{y:.17g}" for x, y in piece)
        return "\n".join(rows) + "\n"

    def to_json(self) -> dict:
        return {"role": self.role, "tag": self.tag, "escaped": self.escaped,
                "pieces": [p.tolist() for p in self.pieces], "info": self.info}


def lozi_map(p: LoziParams, pts: np.ndarray) -> np.ndarray:
    a, b = float(p.a), float(p.b)
    x, y = pts[:, 0], pts[:, 1]
    return np.column_stack([1 - a * np.abs(x) + b * y, x])


def lozi_inverse_map(p: LoziParams, pts: np.ndarray) -> np.ndarray:
    a, b = float(p.a), float(p.b)
    u, v = pts[:, 0], pts[:, 1]
    return np.column_stack([v, (u - 1 + a * np.abs(v)) / b])


def _insert_crossings(pts: np.ndarray, axis: int) -> np.ndarray:
    """Add the points where the polyline crosses ``coord[axis] = 0``."""
    c = pts[:, axis]
    cross = np.flatnonzero(c[:-1] * c[1:] < 0)
    if cross.size == 0:
        return pts
    t = c[cross] / (c[cross] - c[cross + 1])
    new = pts[cross] + t[:, None] * (pts[cross + 1] - pts[cross])
    new[:, axis] = 0.0
    return np.insert(pts, cross + 1, new, axis=0)


def _dedupe(pts: np.ndarray) -> np.ndarray:
    keep = np.ones(len(pts), bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return pts[keep]


def _refine(pts: np.ndarray, tol: float) -> np.ndarray:
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    counts = np.maximum(1, np.ceil(seg / tol).astype(int))
    if np.all(counts == 1):
        return pts
    out = [pts[:1]]
    for i, k in enumerate(counts):
        t = np.arange(1, k + 1)[:, None] / k
        out.append(pts[i] + t * (pts[i + 1] - pts[i]))
    return np.concatenate(out)


def map_polyline(p: LoziParams, pts: np.ndarray, steps: int = 1, inverse: bool = False) -> np.ndarray:
    """Exact (up to rounding) image of a polyline: kinks are inserted first."""
    for _ in range(steps):
        if inverse:
            pts = lozi_inverse_map(p, _insert_crossings(pts, 1))
        else:
            pts = lozi_map(p, _insert_crossings(pts, 0))
        pts = _dedupe(pts)
    return pts


def _truncate(pts: np.ndarray, length: float) -> np.ndarray:
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] <= length:
        return pts
    k = int(np.searchsorted(cum, length))
    t = (length - cum[k - 1]) / seg[k - 1]
    end = pts[k - 1] + t * (pts[k] - pts[k - 1])
    return np.vstack([pts[:k], end])


def trace_unstable(p: LoziParams, side: str = "left", arclength: float = 20.0,
                   refine_tol: float = 1e-2, seed_length: float = 1e-6,
                   max_iter: int = 60, escape_radius: float = 1e6,
                   max_points: int = 2_000_000) -> PolylineF64:
    """Trace one component of the unstable manifold of the saddle in ``x > 0``.

    The left component is grown by pushing a short seed segment along the
    unstable direction through ``L^4``; the right one is its image under
    ``L``. Kinks are inserted where the polyline crosses the singularity
    line, so each image is the true image up to rounding. Growth stops when
    an image leaves ``escape_radius`` (flagged ``escaped``, last bounded
    polyline kept) or would need more than ``max_points`` points.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    eig = saddle_data(p, "+")
    p1 = np.array([float(eig.fixed_point.x), float(eig.fixed_point.y)])
    d = eig.v_unstable if eig.v_unstable[0] < 0 else -eig.v_unstable
    pts = np.vstack([p1, p1 + seed_length * d])
    escaped = False
    iters = 0
    prev_len = 0.0
    while iters < max_iter:
        nxt = map_polyline(p, pts, 4)
        iters += 1
        if not np.all(np.isfinite(nxt)) or np.abs(nxt).max() > escape_radius:
            escaped = True
            break
        nxt_len = float(np.linalg.norm(np.diff(nxt, axis=0), axis=1).sum())
        if nxt_len / refine_tol > max_points:
            break
        pts = _refine(nxt, refine_tol)
        length = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
        if length >= arclength or length - prev_len < 1e-12:
            break
        prev_len = length
    pts = _truncate(pts, arclength)
    if side == "right":
        pts = _refine(map_polyline(p, pts, 1), refine_tol)
    role = "unstable-left" if side == "left" else "unstable-right"
    return PolylineF64([pts], role, escaped, info={"iterations": iters})


def z_point(p: LoziParams) -> np.ndarray:
    """Where the unstable half-line of the saddle in ``x > 0`` meets ``y = 0``."""
    eig = saddle_data(p, "+")
    fx = float(eig.fixed_point.x)
    lam = eig.lambda_unstable
    # points p1 + t (lam, 1); y = 0 at t = -p1.y
    return np.array([fx - fx * lam, 0.0])


def first_crossing(poly: PolylineF64, axis: int = 1, value: float = 0.0) -> Optional[np.ndarray]:
    pts = poly.points
    c = pts[:, axis] - value
    idx = np.flatnonzero((c[:-1] == 0) | (c[:-1] * c[1:] < 0))
    if idx.size == 0:
        return None
    i = idx[0]
    if c[i] == 0:
        return pts[i].copy()
    t = c[i] / (c[i] - c[i + 1])
    return pts[i] + t * (pts[i + 1] - pts[i])


def distance_to_segment(pts: np.ndarray, a, b) -> np.ndarray:
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = b - a
    t = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
    return np.linalg.norm(pts - (a + t[:, None] * d), axis=1)


def clip_to_viewport(pts: np.ndarray, viewport=VIEWPORT) -> list:
    """Split a polyline into the pieces lying inside the viewport rectangle."""
    x0, x1, y0, y1 = viewport
    pieces, current = [], []
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        # Liang-Barsky
        d = q - p
        t0, t1 = 0.0, 1.0
        ok = True
        for pk, qk in ((-d[0], p[0] - x0), (d[0], x1 - p[0]), (-d[1], p[1] - y0), (d[1], y1 - p[1])):
            if pk == 0:
                if qk < 0:
                    ok = False
                    break
            else:
                r = qk / pk
                if pk < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
        if not ok or t0 > t1:
            if len(current) > 1:
                pieces.append(np.array(current))
            current = []
            continue
        a_, b_ = p + t0 * d, p + t1 * d
        if not current:
            current = [a_]
        elif np.any(current[-1] != a_):
            if len(current) > 1:
                pieces.append(np.array(current))
            current = [a_]
        current.append(b_)
        if t1 < 1.0:
            pieces.append(np.array(current))
            current = []
    if len(current) > 1:
        pieces.append(np.array(current))
    return pieces


def critical_line(p: LoziParams, depth: int, viewport=VIEWPORT, extent: float = 1e3) -> list:
    """Pullbacks ``{x-coordinate of L^k = 0}`` for ``k < depth``.

    Level ``k`` is the inverse image of level ``k - 1``, so applying ``L``
    to a level-``k`` point lands on level ``k - 1``. With ``viewport=None``
    the unclipped broken lines are returned.
    """
    if not 1 <= depth <= 8:
        raise ValueError("depth must be between 1 and 8")
    pts = np.array([[0.0, -extent], [0.0, extent]])
    out = []
    for k in range(depth):
        if k > 0:
            pts = map_polyline(p, pts, 1, inverse=True)
        pieces = [pts.copy()] if viewport is None else clip_to_viewport(pts, viewport)
        out.append(PolylineF64(pieces, "critical-line", info={"level": k}))
    return out


def lc_line(p: LoziParams) -> tuple:
    """Exact ``(slope, intercept)`` of the critical line of ``L^4`` through F1.

    It is the piece of ``{second iterate has x = 0}`` on which ``x < 0`` and
    the first iterate is nonnegative:
    ``1 - a (1 + a x + b y) + b x = 0``.
    """
    a, b = p.a, p.b
    return (b - a * a) / (a * b), (1 - a) / (a * b)


def forward_image(p: LoziParams, poly: PolylineF64, steps: int, role: str = "image") -> PolylineF64:
    return PolylineF64([map_polyline(p, piece, steps) for piece in poly.pieces], role)


def entry_steps(p: LoziParams, pts: np.ndarray, region: Sequence, n: int = 4, max_steps: int = 50) -> np.ndarray:
    """Number of ``L^n`` steps until each point enters the polygon (-1 if never)."""
    path = Path(np.asarray(region, float))
    out = np.full(len(pts), -1)
    cur = np.asarray(pts, float).copy()
    for k in range(max_steps + 1):
        inside = path.contains_points(cur, radius=1e-12) & (out < 0)
        out[inside] = k
        if np.all(out >= 0):
            break
        for _ in range(n):
            cur = lozi_map(p, cur)
    return out


@dataclass
class EntropyEstimate:
    value: float  # log(count) / n
    count: int
    n: int
    eps: float
    samples: int
    increment: Optional[float] = None  # (log r(n) - log r(n/2)) / (n - n/2)
    tag: str = EVIDENCE

    def to_json(self) -> dict:
        return {"estimate": self.value, "count": self.count, "n": self.n, "eps": self.eps,
                "samples": self.samples, "increment_estimate": self.increment, "tag": self.tag}


def _grid(box, grid, region) -> np.ndarray:
    nx, ny = (grid, grid) if np.isscalar(grid) else grid
    if nx * ny > 10**6:
        raise ValueError("grid exceeds 10^6 points")
    xs = np.linspace(box[0], box[1], int(nx))
    ys = np.linspace(box[2], box[3], int(ny))
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    if region is not None:
        pts = pts[Path(np.asarray(region, float)).contains_points(pts, radius=1e-12)]
    return pts


def _orbit_features(p: LoziParams, pts: np.ndarray, n: int, clamp: float) -> np.ndarray:
    # max-norm over (x_m, y_m), m < n, equals max-norm over (y_0, x_0, ..., x_{n-1})
    a, b = float(p.a), float(p.b)
    x, y = pts[:, 0].copy(), pts[:, 1].copy()
    cols = [np.clip(y, -clamp, clamp)]
    for _ in range(n):
        cols.append(np.clip(x, -clamp, clamp))
        x, y = np.clip(1 - a * np.abs(x) + b * y, -1e12, 1e12), x
    return np.column_stack(cols)


def separated_count(feats: np.ndarray, eps: float) -> int:
    """Size of the greedy maximal set whose pairwise max-distance exceeds ``eps``."""
    tree = cKDTree(feats)
    covered = np.zeros(len(feats), bool)
    count = 0
    for i in range(len(feats)):
        if covered[i]:
            continue
        count += 1
        covered[tree.query_ball_point(feats[i], eps, p=np.inf)] = True
    return count


def estimate_entropy(p: LoziParams, n: int, eps: float, box=VIEWPORT, grid=(400, 400),
                     region=None, clamp: float = 100.0, increment: bool = False) -> EntropyEstimate:
    """Greedy ``(n, eps)``-separated subset of a grid sample; returns ``log(count) / n``.

    Distances use the max-norm; coordinates are clamped to ``[-clamp, clamp]``
    so escaping orbits collapse together, a crude stand-in for the point at
    infinity. ``region`` (polygon vertex list) restricts the sample.
    """
    if not 1 <= n <= 20:
        raise ValueError("n must be between 1 and 20")
    pts = _grid(box, grid, region)
    count = separated_count(_orbit_features(p, pts, n, clamp), eps)
    inc = None
    if increment and n >= 2:
        half = n // 2
        c_half = separated_count(_orbit_features(p, pts, half, clamp), eps)
        inc = (math.log(count) - math.log(c_half)) / (n - half)
    return EntropyEstimate(math.log(count) / n, count, n, eps, len(pts), inc)


def lc_segment(p: LoziParams, viewport=VIEWPORT) -> PolylineF64:
    """The part of the critical line through F1 where ``x < 0`` and ``x_1 >= 0``."""
    slope, icpt = (float(v) for v in lc_line(p))
    x0, x1, _, _ = viewport
    xs = np.linspace(x0, min(x1, 0.0), 2001)
    pts = np.column_stack([xs, slope * xs + icpt])
    a, b = float(p.a), float(p.b)
    keep = 1 + a * pts[:, 0] + b * pts[:, 1] >= 0
    pieces = [q for q in clip_to_viewport(pts[keep], viewport)] if keep.sum() > 1 else []
    return PolylineF64(pieces, "critical-line", info={"slope": slope, "intercept": icpt})


def lc_image(p: LoziParams, viewport=VIEWPORT, steps: int = 4) -> PolylineF64:
    """Forward image of ``lc_segment`` under ``L^steps`` (a broken line)."""
    seg = lc_segment(p, viewport)
    pieces = []
    for piece in seg.pieces:
        pieces.extend(clip_to_viewport(map_polyline(p, piece, steps), viewport))
    return PolylineF64(pieces, "image", info={"steps": steps})
