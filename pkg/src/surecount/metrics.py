"""Approximation-error and decimal-precision scoring against exact values.

The relative error is kept as an exact rational; a logarithm enters only
in the final digit count, computed to well under 1e-6, so scoring never
adds noise of its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .rational import Rational, _log10_int


@dataclass(frozen=True)
class PrecisionScore:
    delta: Rational | None  # None marks an exact match
    decimal_digits: float  # +inf iff exact

    @property
    def exact(self) -> bool:
        return self.delta is None


def approx_error(approx: Rational, exact: Rational) -> Rational:
    """Relative error |approx - exact| / |exact|.

    A zero exact value demands exactness: both zero scores 0, a nonzero
    approximation of zero scores 1.
    """
    if exact == 0:
        return Fraction(0) if approx == 0 else Fraction(1)
    return abs(approx - exact) / abs(exact)


def decimal_precision(approx: Rational, exact: Rational) -> float:
    """Significant decimal digits of agreement: max(0, -log10 error).

    Works directly on the integer parts so huge exact values (powers with
    multi-megabit numerators) never pay for fraction normalization.
    """
    a_n, a_d = approx.numerator, approx.denominator
    e_n, e_d = exact.numerator, exact.denominator
    if a_n * e_d == e_n * a_d:
        return math.inf
    if e_n == 0:
        return 0.0
    diff = abs(a_n * e_d - e_n * a_d)
    base = abs(e_n) * a_d
    log_delta = _log10_int(diff) - _log10_int(base)
    return max(0.0, -log_delta)


def score(approx: Rational, exact: Rational) -> PrecisionScore:
    if approx == exact:
        return PrecisionScore(None, math.inf)
    return PrecisionScore(approx_error(approx, exact), decimal_precision(approx, exact))


def meets_target(s: PrecisionScore, target_digits: float) -> bool:
    """True when the scored precision reaches the requested digit count."""
    if target_digits < 0:
        raise ValueError("target precision must be nonnegative")
    return s.decimal_digits >= target_digits
