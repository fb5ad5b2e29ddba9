"""The Lozi family ``(x, y) -> (1 - a|x| + b y, x)`` and its affine branches.

Sign convention: ``+`` means ``x >= 0`` and ``-`` means ``x < 0``. A sign
itinerary of length ``n`` picks one affine branch of the ``n``-th iterate;
the branch domains tile the plane without overlap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .geometry import HalfPlane, Point, RationalLike


@dataclass(frozen=True)
class LoziParams:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def of(cls, a: RationalLike, b: RationalLike) -> "LoziParams":
        return cls(Fraction(a), Fraction(b))

    def step_matrix(self, sign: str):
        s = 1 if sign == "+" else -1
        return ((-s * self.a, self.b), (Fraction(1), Fraction(0)))


BASE_PARAMS = LoziParams(Fraction(7, 5), Fraction(2, 5))


def normalize_itinerary(it: str | Sequence[str]) -> str:
    """Accept ``"+-+-"`` (ASCII or unicode minus) or a sequence of signs."""
    s = "".join(it).replace("−", "-")
    if not s or any(c not in "+-" for c in s):
        raise ValueError(f"bad sign itinerary: {it!r}")
    return s


def all_itineraries(n: int) -> Iterator[str]:
    for signs in itertools.product("+-", repeat=n):
        yield "".join(signs)


def sign_of(x) -> str:
    return "+" if x >= 0 else "-"


def lozi_apply(p: LoziParams, pt) -> Point:
    x, y = pt
    return Point(1 - p.a * abs(x) + p.b * y, x)


def lozi_inverse(p: LoziParams, pt) -> Point:
    if p.b == 0:
        raise ValueError("not invertible")
    u, v = pt
    return Point(v, (u - 1 + p.a * abs(v)) / p.b)


def iterate(p: LoziParams, pt, n: int) -> Point:
    for _ in range(n):
        pt = lozi_apply(p, pt)
    return Point(*pt)


def orbit_itinerary(p: LoziParams, pt, n: int) -> str:
    signs = []
    for _ in range(n):
        signs.append(sign_of(pt[0]))
        pt = lozi_apply(p, pt)
    return "".join(signs)


def _matmul(m, n):
    return (
        (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
        (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
    )


def _matvec(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def det2(m) -> Fraction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


@dataclass(frozen=True)
class AffineBranch:
    """One affine piece ``p -> linear @ p + translation`` of an iterate.

    ``domain[k]`` is the step-``k`` sign condition pulled back to initial
    coordinates (closed for ``+``, open for ``-``).
    """

    itinerary: str
    linear: tuple
    translation: tuple
    domain: tuple
    params: LoziParams

    @property
    def order(self) -> int:
        return len(self.itinerary)

    def apply(self, pt) -> Point:
        x, y = _matvec(self.linear, pt)
        return Point(x + self.translation[0], y + self.translation[1])

    def det(self) -> Fraction:
        return det2(self.linear)

    def closed_domain(self) -> list:
        return [h.closure() for h in self.domain]

    def failed_constraints(self, pt) -> list:
        """Indices of the step constraints ``pt`` violates."""
        return [k for k, h in enumerate(self.domain) if not h.contains(pt)]


def compose_branch(p: LoziParams, it: str | Sequence[str]) -> AffineBranch:
    """Compose the affine branch of ``L^n`` selected by the itinerary.

    The empty itinerary gives ``L^0``, the identity on the whole plane.
    """
    it = normalize_itinerary(it) if len(it) else ""
    one, zero = Fraction(1), Fraction(0)
    m = ((one, zero), (zero, one))
    c = (zero, zero)
    domain = []
    for sign in it:
        # x-coordinate after the steps so far is m[0] . p + c[0]
        if sign == "+":
            domain.append(HalfPlane(m[0], -c[0], True, degenerate=True))
        else:
            domain.append(HalfPlane((-m[0][0], -m[0][1]), c[0], False, degenerate=True))
        step = p.step_matrix(sign)
        m = _matmul(step, m)
        cx, cy = _matvec(step, c)
        c = (cx + 1, cy)
    return AffineBranch(it, m, c, tuple(domain), p)


def branch_contains(br: AffineBranch, pt) -> bool:
    return all(h.contains(pt) for h in br.domain)


# Standard domain numbering: x varies fastest, then C (first iterate),
# then B (second iterate); odd numbers have A (third iterate) >= 0.
DOMAIN_SYMBOLS = ("x", "C", "B", "A")


def domain_number(it: str) -> int:
    it = normalize_itinerary(it)
    if len(it) != 4:
        raise ValueError("numbered domains are defined for L^4 only")
    sx, sc, sb, sa = (0 if s == "+" else 1 for s in it)
    return 1 + 2 * (sx + 2 * sc + 4 * sb) + sa


def domain_itinerary(domain: int) -> str:
    if not 1 <= domain <= 16:
        raise ValueError("domain index must be in 1..16")
    k = domain - 1
    sa = k % 2
    pair = k // 2
    sx, sc, sb = pair % 2, (pair // 2) % 2, pair // 4
    return "".join("+" if s == 0 else "-" for s in (sx, sc, sb, sa))


@dataclass(frozen=True)
class EigenData:
    fixed_point: Point
    lambda_stable: float
    lambda_unstable: float
    v_stable: np.ndarray
    v_unstable: np.ndarray
    jacobian: np.ndarray


def one_step_fixed_point(p: LoziParams, sign: str) -> Point:
    s = 1 if sign == "+" else -1
    den = 1 + s * p.a - p.b
    if den == 0:
        raise ValueError("no saddle on this side")
    x = 1 / den
    if sign_of(x) != sign:
        raise ValueError("no saddle on this side")
    return Point(x, x)


def saddle_data(p: LoziParams, branch_sign: str) -> EigenData:
    """Exact fixed point and float eigen-data of the one-step saddle."""
    fp = one_step_fixed_point(p, branch_sign)
    jac = np.array([[float(v) for v in row] for row in p.step_matrix(branch_sign)])
    # characteristic polynomial lambda^2 + s a lambda - b
    s = 1.0 if branch_sign == "+" else -1.0
    a, b = float(p.a), float(p.b)
    disc = a * a + 4 * b
    if disc < 0:
        raise ValueError("fixed point is not a saddle")
    r = np.sqrt(disc)
    ls, lu = sorted(((-s * a + r) / 2, (-s * a - r) / 2), key=abs)
    if not abs(ls) < 1 < abs(lu):
        raise ValueError("fixed point is not a saddle")
    # second row of J - lambda I reads x - lambda y = 0
    vs = np.array([ls, 1.0]) / np.hypot(ls, 1.0)
    vu = np.array([lu, 1.0]) / np.hypot(lu, 1.0)
    return EigenData(fp, ls, lu, vs, vu, jac)
