"""Closed bounded intervals with Minkowski arithmetic and the gH-difference.

Endpoints are plain doubles; nothing here rounds outward.  Every operation is a
pure function returning a new :class:`Interval`.

    >>> gh_diff(Interval(1, 2), Interval(-1, 3))
    Interval(lo=-1.0, hi=2.0)
    >>> compare(Interval(1, 2), Interval(0, 5))
    <Order.INCOMPARABLE: 'incomparable'>
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Interval",
    "Order",
    "ZERO",
    "add",
    "scale",
    "neg",
    "sub",
    "gh_diff",
    "hausdorff",
    "norm",
    "compare",
    "preceq",
    "prec",
    "nprec",
    "equal",
    "contains",
    "random_interval",
]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"interval lower endpoint exceeds upper: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, a: float) -> Interval:
        return cls(a, a)

    @classmethod
    def hull(cls, a: float, b: float) -> Interval:
        """Interval spanned by two reals in either order."""
        return cls(min(a, b), max(a, b))

    @classmethod
    def from_list(cls, pair) -> Interval:
        lo, hi = pair
        return cls(lo, hi)

    def to_list(self) -> list[float]:
        return [self.lo, self.hi]

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: Interval) -> Interval:
        return add(self, other)

    def __neg__(self) -> Interval:
        return neg(self)

    def __rmul__(self, lam: float) -> Interval:
        return scale(lam, self)

    def __iter__(self):
        yield self.lo
        yield self.hi


ZERO = Interval(0.0, 0.0)


class Order(enum.Enum):
    EQUAL = "equal"
    LESS = "less"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def scale(lam: float, a: Interval) -> Interval:
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError(f"scale factor must be finite, got {lam}")
    if lam >= 0:
        return Interval(lam * a.lo, lam * a.hi)
    return Interval(lam * a.hi, lam * a.lo)


def neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def sub(a: Interval, b: Interval) -> Interval:
    """Minkowski difference ``a + (-1) b``, not the gH-difference."""
    return add(a, neg(b))


def gh_diff(a: Interval, b: Interval) -> Interval:
    d_lo = a.lo - b.lo
    d_hi = a.hi - b.hi
    return Interval(min(d_lo, d_hi), max(d_lo, d_hi))


def hausdorff(a: Interval, b: Interval) -> float:
    return max(abs(a.lo - b.lo), abs(a.hi - b.hi))


def norm(a: Interval) -> float:
    return max(abs(a.lo), abs(a.hi))


def _sign(d: float, tol: float) -> int:
    if d > tol:
        return 1
    if d < -tol:
        return -1
    return 0


def compare(a: Interval, b: Interval, tol: float = 0.0) -> Order:
    """Dominance relation between ``a`` and ``b``.

    With ``tol > 0`` endpoint gaps of at most ``tol`` count as ties, which is
    what derivative pipelines need when a finite-difference endpoint should
    be exactly zero.
    """
    s_lo = _sign(b.lo - a.lo, tol)
    s_hi = _sign(b.hi - a.hi, tol)
    if s_lo == 0 and s_hi == 0:
        return Order.EQUAL
    if s_lo >= 0 and s_hi >= 0:
        return Order.LESS
    if s_lo <= 0 and s_hi <= 0:
        return Order.GREATER
    return Order.INCOMPARABLE


def preceq(a: Interval, b: Interval, tol: float = 0.0) -> bool:
    return compare(a, b, tol) in (Order.LESS, Order.EQUAL)


def prec(a: Interval, b: Interval, tol: float = 0.0) -> bool:
    return compare(a, b, tol) is Order.LESS


def nprec(a: Interval, b: Interval, tol: float = 0.0) -> bool:
    return compare(a, b, tol) is not Order.LESS


def equal(a: Interval, b: Interval, tol: float = 0.0) -> bool:
    return compare(a, b, tol) is Order.EQUAL


def contains(a: Interval, x: float, tol: float = 0.0) -> bool:
    return a.lo - tol <= x <= a.hi + tol


def random_interval(rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> Interval:
    """Sorted pair of uniforms on ``[low, high]``."""
    u, w = rng.uniform(low, high, size=2)
    return Interval(min(u, w), max(u, w))
