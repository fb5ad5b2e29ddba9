"""Truncated power series in one small positive parameter ``eps``.

Coefficients are exact rationals. Products drop terms above the degree cap
and set ``truncated`` so later sign decisions know information was lost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .geometry import format_rational, parse_rational

DEFAULT_DEGREE = 2


class IndeterminateSign(ArithmeticError):
    """The sign at ``eps -> 0+`` is hidden by truncation."""

    def __init__(self, message="indeterminate sign", step=None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


@dataclass(frozen=True)
class EpsPoly:
    coeffs: tuple
    degree: int = DEFAULT_DEGREE
    truncated: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree cap must be at least 1")
        cs = [Fraction(c) for c in self.coeffs][: self.degree + 1]
        cs += [Fraction(0)] * (self.degree + 1 - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c, degree: int = DEFAULT_DEGREE) -> "EpsPoly":
        return cls((Fraction(c),), degree)

    @classmethod
    def linear(cls, c0, c1, degree: int = DEFAULT_DEGREE) -> "EpsPoly":
        return cls((Fraction(c0), Fraction(c1)), degree)

    @classmethod
    def eps(cls, degree: int = DEFAULT_DEGREE) -> "EpsPoly":
        return cls((0, 1), degree)

    def _coerce(self, other) -> "EpsPoly":
        if isinstance(other, EpsPoly):
            if other.degree != self.degree:
                raise ValueError("degree caps differ")
            return other
        return EpsPoly.const(other, self.degree)

    def __add__(self, other):
        o = self._coerce(other)
        return EpsPoly(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)), self.degree,
                       self.truncated or o.truncated)

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly(tuple(-c for c in self.coeffs), self.degree, self.truncated)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self.degree
        out = [Fraction(0)] * (d + 1)
        dropped = False
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b == 0:
                    continue
                if i + j <= d:
                    out[i + j] += a * b
                else:
                    dropped = True
        # a truncated factor contaminates the product unless the other is zero
        lost = (self.truncated and any(o.coeffs)) or (o.truncated and any(self.coeffs))
        return EpsPoly(tuple(out), d, dropped or lost)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def lowest_index(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return None

    def sign_at_zero_plus(self) -> int:
        i = self.lowest_index()
        if i is None:
            if self.truncated:
                raise IndeterminateSign()
            return 0
        return 1 if self.coeffs[i] > 0 else -1

    def at(self, value) -> Fraction:
        """Evaluate the stored (truncated) polynomial."""
        v = Fraction(value)
        return sum((c * v**k for k, c in enumerate(self.coeffs)), Fraction(0))

    @property
    def constant(self) -> Fraction:
        return self.coeffs[0]

    @property
    def linear_coeff(self) -> Fraction:
        return self.coeffs[1]

    def to_json(self) -> dict:
        return {"coeffs": [format_rational(c) for c in self.coeffs], "truncated": self.truncated}

    @classmethod
    def from_json(cls, data) -> "EpsPoly":
        cs = [parse_rational(c) for c in data["coeffs"]]
        return cls(tuple(cs), len(cs) - 1, bool(data.get("truncated", False)))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(str(c) if k == 0 else f"{c}*eps" + (f"^{k}" if k > 1 else ""))
        body = " + ".join(terms) or "0"
        return body + (f" + O(eps^{self.degree + 1})" if self.truncated else "")


class AbsRecord(NamedTuple):
    sign: int
    witness: object  # index of the lowest nonzero coefficient, None if zero


def eps_abs(p: EpsPoly, log: list | None = None, step=None) -> EpsPoly:
    """``|p|`` for all sufficiently small ``eps > 0``."""
    try:
        s = p.sign_at_zero_plus()
    except IndeterminateSign:
        raise IndeterminateSign(step=step) from None
    if log is not None:
        log.append(AbsRecord(s, p.lowest_index()))
    return -p if s < 0 else p


class EpsPoint(NamedTuple):
    x: EpsPoly
    y: EpsPoly

    def at(self, value):
        return (self.x.at(value), self.y.at(value))


def lozi_apply_eps(a: EpsPoly, b: EpsPoly, pt: EpsPoint, log: list | None = None,
                   step=None) -> EpsPoint:
    x, y = pt
    return EpsPoint(1 - a * eps_abs(x, log, step) + b * y, x)


def lozi_iterate_eps(a: EpsPoly, b: EpsPoly, pt: EpsPoint, n: int,
                     log: list | None = None) -> EpsPoint:
    for k in range(n):
        pt = lozi_apply_eps(a, b, pt, log, step=k)
    return pt


def eps_point(x0, x1, y0, y1, degree: int = DEFAULT_DEGREE) -> EpsPoint:
    """``(x0 + x1 eps, y0 + y1 eps)``."""
    return EpsPoint(EpsPoly.linear(x0, x1, degree), EpsPoly.linear(y0, y1, degree))


def sign_string(records: Sequence[AbsRecord]) -> str:
    return "".join("-" if r.sign < 0 else "+" for r in records)
