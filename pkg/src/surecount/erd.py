"""Extended-range double: an IEEE binary64 paired with a 64-bit exponent.

The pair <d, e> denotes d * 2**e.  Normalized form keeps the double's own
exponent field at zero (1.0 <= |d| < 2.0), or <0.0, 0> for zero, so the
separate exponent carries the full dynamic range.  Infinities, NaNs, and
subnormals are rejected outright; hardware double arithmetic does the
rounding, which keeps this bit-exact with the 53-bit software float.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction

from .rational import Rational
from .softfloat import (
    INT64_MAX,
    INT64_MIN,
    NEAREST_EVEN,
    ExponentRangeError,
    SoftFloat,
    sf_round_from_rational,
)

_EXP_MASK = 0x7FF0000000000000
_EXP_SHIFT = 52
_EXP_BIAS = 1023

# Sequence products renormalize well under the 1023-factor overflow limit;
# a power of two keeps loop blocking simple.
RENORM_EVERY = 512

ADD_EXPONENT_GAP = 54


class ErdDomainError(ValueError):
    """Input double is an infinity or NaN."""


def _bits(d: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", d))[0]


def _from_bits(b: int) -> float:
    return struct.unpack("<d", struct.pack("<Q", b))[0]


def _biased_exponent(d: float) -> int:
    return (_bits(d) >> _EXP_SHIFT) & 0x7FF


def _with_exponent_field(d: float, unbiased: int) -> float:
    """Replace the exponent field, keeping sign and fraction bits."""
    b = _bits(d) & ~_EXP_MASK
    return _from_bits(b | ((unbiased + _EXP_BIAS) << _EXP_SHIFT))


def _check_exponent(e: int) -> int:
    if not INT64_MIN <= e <= INT64_MAX:
        raise ExponentRangeError("extended exponent %d outside 64-bit range" % e)
    return e


@dataclass(frozen=True)
class ErdNumber:
    d: float
    e: int

    def is_zero(self) -> bool:
        return self.d == 0.0

    def __repr__(self) -> str:
        return "ErdNumber(%r * 2**%d)" % (self.d, self.e)


ERD_ZERO = ErdNumber(0.0, 0)


def erd_normalize(d: float, e: int) -> ErdNumber:
    """Normalize a raw pair: zero collapses to <0.0, 0>, otherwise the
    double's exponent field moves into the separate exponent."""
    if math.isnan(d) or math.isinf(d):
        raise ErdDomainError("cannot normalize %r" % d)
    if d == 0.0:
        return ERD_ZERO
    biased = _biased_exponent(d)
    if biased == 0:
        # subnormal input: scale up exactly before reading the field
        d *= 2.0**52
        e -= 52
        biased = _biased_exponent(d)
    _check_exponent(e + biased - _EXP_BIAS)
    return ErdNumber(_with_exponent_field(d, 0), e + biased - _EXP_BIAS)


def erd_mul2(a: ErdNumber, b: ErdNumber) -> ErdNumber:
    """Product of two normalized values; |d| stays in [1, 4) so the single
    hardware multiply never overflows."""
    if a.is_zero() or b.is_zero():
        return ERD_ZERO
    return erd_normalize(a.d * b.d, _check_exponent(a.e + b.e))


def erd_mul(xs) -> ErdNumber:
    """Product of a sequence, renormalizing the running double every
    RENORM_EVERY factors to stay clear of the 1023-factor overflow bound."""
    dprod = 1.0
    esum = 0
    pending = 0
    for x in xs:
        if x.is_zero():
            return ERD_ZERO
        dprod *= x.d
        esum = _check_exponent(esum + x.e)
        pending += 1
        if pending == RENORM_EVERY:
            norm = erd_normalize(dprod, esum)
            dprod, esum = norm.d, norm.e
            pending = 0
    return erd_normalize(dprod, esum)


def erd_add(a: ErdNumber, b: ErdNumber) -> ErdNumber:
    """Sum with the wide-gap shortcut.

    A zero operand returns the other; when one exponent exceeds the other
    by more than ADD_EXPONENT_GAP the smaller operand is below the kept
    operand's rounding granularity and is dropped; otherwise the smaller
    is brought onto the larger's scale exactly and hardware addition
    rounds once.
    """
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.e > ADD_EXPONENT_GAP + b.e:
        return a
    if b.e > ADD_EXPONENT_GAP + a.e:
        return b
    shifted = _with_exponent_field(a.d, a.e - b.e)
    return erd_normalize(shifted + b.d, b.e)


def erd_from_rational(v: Rational) -> ErdNumber:
    """Nearest 53-bit rounding of an exact rational."""
    if v == 0:
        return ERD_ZERO
    sf = sf_round_from_rational(v, 53, NEAREST_EVEN)
    # fraction in [2**52, 2**53) maps exactly onto a double in [1, 2)
    d = float(sf.fraction) * 2.0**-52
    if sf.sign:
        d = -d
    return ErdNumber(d, _check_exponent(sf.exponent - 1))


def erd_to_rational(x: ErdNumber) -> Rational:
    """Exact value; materializes 2**|e| so callers keep e at desk scale."""
    base = Fraction(x.d)
    if x.e >= 0:
        return base * (1 << x.e)
    return base / (1 << -x.e)


def erd_to_softfloat(x: ErdNumber) -> SoftFloat:
    """Bit-exact view as a 53-bit software float."""
    if x.is_zero():
        return SoftFloat(0, 0, 0, 53)
    bits = _bits(x.d)
    sign = bits >> 63
    frac = (bits & ((1 << 52) - 1)) | (1 << 52)
    return SoftFloat(sign, frac, x.e + 1, 53)


def erd_render_pow2(x: ErdNumber) -> str:
    return "%.17g*2^%d" % (x.d, x.e)


# log10(2) scaled by 10**30; integer exponent math keeps the rendered
# decimal exponent accurate even at 64-bit binary exponents
_LOG10_2_SCALED = 301029995663981195213738894724
_LOG10_SCALE = 10**30


def erd_render_decimal(x: ErdNumber) -> str:
    """Approximate decimal m x 10^k; k may be far outside double range."""
    if x.is_zero():
        return "0.0"
    dpart = int(math.log10(abs(x.d)) * _LOG10_SCALE)
    total = x.e * _LOG10_2_SCALED + dpart
    k, frac = divmod(total, _LOG10_SCALE)
    m = 10.0 ** (frac / _LOG10_SCALE)
    if x.d < 0:
        m = -m
    return "%.6fe%+d" % (m, k)
