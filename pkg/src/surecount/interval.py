"""Closed-interval arithmetic over software floats with outward rounding.

Every operation rounds the low endpoint toward -inf and the high endpoint
toward +inf, so an interval seeded from an exact value keeps containing
the exact result of any add/mul expression built on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .rational import Rational, log10_fraction
from .softfloat import (
    NEAREST_EVEN,
    TOWARD_NEG,
    TOWARD_POS,
    SoftFloat,
    sf_add,
    sf_round_from_rational,
    sf_to_rational,
    sf_zero,
)


@dataclass(frozen=True)
class Interval:
    lo: SoftFloat
    hi: SoftFloat

    def __post_init__(self) -> None:
        if self.lo.precision != self.hi.precision:
            raise ValueError("interval endpoints must share a width")
        if sf_to_rational(self.lo) > sf_to_rational(self.hi):
            raise ValueError("interval endpoints out of order")

    @property
    def precision(self) -> int:
        return self.lo.precision

    def render(self) -> str:
        digits = iv_decimal_precision(self)
        tag = "exact" if digits == math.inf else (">= %.2f digits" % digits)
        return "[%s, %s] (%s)" % (self.lo.debug(), self.hi.debug(), tag)


def iv_from_rational(v: Rational, p: int) -> Interval:
    """Tightest enclosing interval; degenerate iff v is representable."""
    return Interval(
        sf_round_from_rational(v, p, TOWARD_NEG),
        sf_round_from_rational(v, p, TOWARD_POS),
    )


def iv_add(a: Interval, b: Interval) -> Interval:
    return Interval(
        sf_add(a.lo, b.lo, TOWARD_NEG),
        sf_add(a.hi, b.hi, TOWARD_POS),
    )


def iv_mul(a: Interval, b: Interval) -> Interval:
    """Endpoint products with sign-aware min/max, rounded outward.

    The four exact endpoint products are compared as rationals, which
    sidesteps the usual case analysis; only the chosen extremes are
    rounded.
    """
    p = a.precision
    products = [
        sf_to_rational(x) * sf_to_rational(y)
        for x in (a.lo, a.hi)
        for y in (b.lo, b.hi)
    ]
    return Interval(
        sf_round_from_rational(min(products), p, TOWARD_NEG),
        sf_round_from_rational(max(products), p, TOWARD_POS),
    )


def iv_error(x: Interval) -> Rational:
    """Relative width of the interval.

    Zero-free intervals score (hi - lo) / min(|lo|, |hi|); the degenerate
    zero interval scores 0; any other interval containing zero (endpoints
    included) scores 1.
    """
    lo = sf_to_rational(x.lo)
    hi = sf_to_rational(x.hi)
    if lo == 0 and hi == 0:
        return Fraction(0)
    if lo <= 0 <= hi:
        return Fraction(1)
    return (hi - lo) / min(abs(lo), abs(hi))


def iv_decimal_precision(x: Interval) -> float:
    """max(0, -log10 of the relative width); +inf for a degenerate interval."""
    err = iv_error(x)
    if err == 0:
        return math.inf
    if err >= 1:
        return 0.0
    return max(0.0, -log10_fraction(err))


def iv_midpoint(x: Interval) -> SoftFloat:
    """Nearest float to the exact midpoint (lo + hi) / 2."""
    mid = (sf_to_rational(x.lo) + sf_to_rational(x.hi)) / 2
    if mid == 0:
        return sf_zero(x.precision)
    return sf_round_from_rational(mid, x.precision, NEAREST_EVEN)
