"""Software binary floating point with a configurable fraction width.

A value is sign * f * 2**e where the fraction f is a p-bit binary number
with the implicit point on the left (so 1/2 <= f < 1 for normalized
values) and the exponent e is a 64-bit signed integer.  The kernel works
for any width p >= 2 (tiny widths let tests enumerate the whole value
space); the counting pipeline only ever selects 53 (binary64-compatible)
or a positive multiple of 64.

All three rounding modes are correct: add and mul behave as if the exact
rational result were computed and then rounded once.  There are no
subnormals, infinities, or NaNs; exceeding the 64-bit exponent range is a
hard error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .rational import Rational

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


class RoundingMode(enum.Enum):
    NEAREST_EVEN = "nearest-even"
    TOWARD_NEG = "toward-neg"
    TOWARD_POS = "toward-pos"


NEAREST_EVEN = RoundingMode.NEAREST_EVEN
TOWARD_NEG = RoundingMode.TOWARD_NEG
TOWARD_POS = RoundingMode.TOWARD_POS


class PrecisionConfigError(ValueError):
    """Unsupported fraction width."""


class ExponentRangeError(OverflowError):
    """Result exponent left the 64-bit signed range."""


def production_width(p: int) -> bool:
    """Widths the counting pipeline selects: 53 or a positive multiple of 64."""
    return p == 53 or (p > 0 and p % 64 == 0)


def _require_width(p: int) -> None:
    if not isinstance(p, int) or p < 2:
        raise PrecisionConfigError("fraction width %r not supported" % (p,))


def _check_exponent(e: int) -> int:
    if not INT64_MIN <= e <= INT64_MAX:
        raise ExponentRangeError("exponent %d outside 64-bit range" % e)
    return e


@dataclass(frozen=True)
class SoftFloat:
    """Immutable normalized software float.

    ``fraction`` is the integer f * 2**p, so normalized values satisfy
    2**(p-1) <= fraction < 2**p.  Zero is the unique (+, 0, 0) triple.
    """

    sign: int  # 0 positive, 1 negative
    fraction: int
    exponent: int
    precision: int

    def is_zero(self) -> bool:
        return self.fraction == 0

    def to_rational(self) -> Rational:
        f = -self.fraction if self.sign else self.fraction
        shift = self.exponent - self.precision
        if shift >= 0:
            return Fraction(f << shift)
        return Fraction(f, 1 << -shift)

    def debug(self) -> str:
        """Platform-stable rendering: sign, hex fraction, decimal exponent."""
        sgn = "-" if self.sign else "+"
        return "%s0x%x e%d p%d" % (sgn, self.fraction, self.exponent, self.precision)

    def __repr__(self) -> str:
        return "SoftFloat(%s)" % self.debug()


@dataclass(frozen=True)
class Epsilon:
    """Unit of relative rounding error for a p-bit fraction: exactly 2**-p."""

    p: int
    value: Rational


def sf_zero(p: int) -> SoftFloat:
    _require_width(p)
    return SoftFloat(0, 0, 0, p)


def sf_epsilon(p: int) -> Epsilon:
    _require_width(p)
    return Epsilon(p, Fraction(1, 1 << p))


def _round_up_mag(sign: int, mode: RoundingMode) -> bool:
    """Directed modes round the magnitude up away from the signed floor/ceiling."""
    if mode is TOWARD_POS:
        return sign == 0
    if mode is TOWARD_NEG:
        return sign == 1
    return False


def _round_scaled(sign: int, mag: int, scale: int, p: int, mode: RoundingMode,
                  sticky: bool = False) -> SoftFloat:
    """Round the exact value (-1)**sign * (mag + theta) * 2**scale to p bits.

    ``sticky`` marks nonzero discarded bits strictly below the lowest bit of
    ``mag`` (theta in (0,1)); it breaks ties and drives directed rounding.
    """
    if mag == 0:
        if sticky:
            raise AssertionError("sticky bit without magnitude")
        return sf_zero(p)
    length = mag.bit_length()
    e = length + scale
    drop = length - p
    if drop <= 0:
        # sticky never reaches here: the capped-alignment path always
        # leaves at least p+2 bits to drop
        assert not sticky
        _check_exponent(e)
        return SoftFloat(sign, mag << -drop, e, p)
    f = mag >> drop
    low = mag & ((1 << drop) - 1)
    if low or sticky:
        if mode is NEAREST_EVEN:
            half = 1 << (drop - 1)
            above_tie = low > half or (low == half and sticky)
            tie = low == half and not sticky
            if above_tie or (tie and f & 1):
                f += 1
        elif _round_up_mag(sign, mode):
            f += 1
    if f == 1 << p:
        f >>= 1
        e += 1
    _check_exponent(e)
    return SoftFloat(sign, f, e, p)


def sf_round_from_rational(v: Rational, p: int, mode: RoundingMode = NEAREST_EVEN) -> SoftFloat:
    """Round an exact rational to a p-bit float under the given mode.

    Nearest mode keeps the relative error at or below 2**-p; the directed
    modes land on the adjacent representable value on the requested side.
    """
    _require_width(p)
    if v == 0:
        return sf_zero(p)
    sign = 1 if v < 0 else 0
    num = -v.numerator if v < 0 else v.numerator
    den = v.denominator
    # e such that 2**(e-1) <= num/den < 2**e
    e = num.bit_length() - den.bit_length()
    if (num >> e if e >= 0 else num << -e) >= den:
        e += 1
    shift = p - e
    if shift >= 0:
        q, r = divmod(num << shift, den)
        d = den
    else:
        d = den << -shift
        q, r = divmod(num, d)
    f = q
    if r:
        if mode is NEAREST_EVEN:
            cmp_half = 2 * r - d
            if cmp_half > 0 or (cmp_half == 0 and f & 1):
                f += 1
        elif _round_up_mag(sign, mode):
            f += 1
    if f == 1 << p:
        f >>= 1
        e += 1
    _check_exponent(e)
    return SoftFloat(sign, f, e, p)


def _require_same_width(a: SoftFloat, b: SoftFloat) -> int:
    if a.precision != b.precision:
        raise PrecisionConfigError(
            "mixed widths %d and %d" % (a.precision, b.precision)
        )
    return a.precision


def sf_mul(a: SoftFloat, b: SoftFloat, mode: RoundingMode = NEAREST_EVEN) -> SoftFloat:
    """Correctly rounded product."""
    p = _require_same_width(a, b)
    if a.is_zero() or b.is_zero():
        return sf_zero(p)
    sign = a.sign ^ b.sign
    mag = a.fraction * b.fraction
    scale = (a.exponent - p) + (b.exponent - p)
    return _round_scaled(sign, mag, scale, p, mode)


def sf_add(a: SoftFloat, b: SoftFloat, mode: RoundingMode = NEAREST_EVEN) -> SoftFloat:
    """Correctly rounded sum.

    Operands are aligned exactly up to a p+3 bit window; anything further
    out is folded into a sticky bit, which preserves correct rounding while
    keeping huge exponent gaps cheap.
    """
    p = _require_same_width(a, b)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    hi, lo = (a, b) if a.exponent >= b.exponent else (b, a)
    gap = hi.exponent - lo.exponent
    window = p + 3
    if gap <= window:
        hi_mag = hi.fraction << gap
        lo_mag = lo.fraction
        lo_sticky = False
        scale = lo.exponent - p
    else:
        cut = gap - window
        hi_mag = hi.fraction << window
        lo_mag = lo.fraction >> cut
        lo_sticky = bool(lo.fraction & ((1 << cut) - 1))
        scale = hi.exponent - p - window
    if hi.sign == lo.sign:
        return _round_scaled(hi.sign, hi_mag + lo_mag, scale, p, mode, lo_sticky)
    if lo_sticky:
        # capped alignment guarantees hi_mag dominates; the discarded tail
        # belongs to the subtrahend, so borrow one unit and keep it sticky
        assert hi_mag > lo_mag
        return _round_scaled(hi.sign, hi_mag - lo_mag - 1, scale, p, mode, True)
    if hi_mag == lo_mag:
        return sf_zero(p)
    if hi_mag > lo_mag:
        return _round_scaled(hi.sign, hi_mag - lo_mag, scale, p, mode)
    return _round_scaled(lo.sign, lo_mag - hi_mag, scale, p, mode)


def sf_to_rational(a: SoftFloat) -> Rational:
    """Exact value of a software float."""
    return a.to_rational()


def sf_neg(a: SoftFloat) -> SoftFloat:
    if a.is_zero():
        return a
    return SoftFloat(1 - a.sign, a.fraction, a.exponent, a.precision)


def sf_cmp(a: SoftFloat, b: SoftFloat) -> int:
    """Exact three-way comparison of two same-width floats."""
    _require_same_width(a, b)
    if a.sign != b.sign and not (a.is_zero() and b.is_zero()):
        return -1 if a.sign else 1
    if a.is_zero() and b.is_zero():
        return 0
    if a.is_zero():
        return -1 if b.sign == 0 else 1
    if b.is_zero():
        return 1 if a.sign == 0 else -1
    flip = -1 if a.sign else 1
    if a.exponent != b.exponent:
        return flip * (1 if a.exponent > b.exponent else -1)
    if a.fraction != b.fraction:
        return flip * (1 if a.fraction > b.fraction else -1)
    return 0
