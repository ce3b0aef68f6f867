"""Exact rational arithmetic: the ground-truth number domain.

Values are ``fractions.Fraction`` instances, which keep arbitrary-precision
integer numerator/denominator in canonical form (denominator positive, gcd
one, zero as 0/1) after every operation.  Everything here is pure and
immutable, so values can be shared freely between threads.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

Rational = Fraction

_DECIMAL_RE = re.compile(
    r"""^(?P<sign>[+-])?
        (?P<int>\d+)?
        (?:\.(?P<frac>\d*))?
        (?:[eE](?P<exp>[+-]?\d+))?$""",
    re.VERBOSE,
)

_FRACTION_RE = re.compile(r"^(?P<sign>[+-])?(?P<num>\d+)/(?P<den>\d+)$")


class RationalParseError(ValueError):
    """Raised when a numeric literal does not parse; names the bad token."""


class ResourceLimitExceeded(RuntimeError):
    """An exact value outgrew the configured bit budget.

    Reported as a resource failure rather than silently producing a wrong
    or truncated value.
    """


def rat_add(a: Rational, b: Rational) -> Rational:
    """Exact sum, canonical form."""
    return a + b


def rat_mul(a: Rational, b: Rational) -> Rational:
    """Exact product, canonical form."""
    return a * b


def rat_compare(a: Rational, b: Rational) -> int:
    """Exact three-way ordering: -1, 0, or +1."""
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


def rat_from_decimal(text: str) -> Rational:
    """Parse a decimal literal ("0.25", "-1e-9", "1.000000453") exactly.

    Grammar: optional sign, digits, optional fractional part, optional
    exponent part.  At least one digit must be present.
    """
    token = text.strip()
    m = _DECIMAL_RE.match(token)
    if not m or (m.group("int") is None and not m.group("frac")):
        raise RationalParseError("malformed decimal literal: %r" % token)
    sign = -1 if m.group("sign") == "-" else 1
    int_part = m.group("int") or "0"
    frac_part = m.group("frac") or ""
    exp = int(m.group("exp") or 0)
    digits = int(int_part + frac_part) if (int_part + frac_part) else 0
    scale = exp - len(frac_part)
    if scale >= 0:
        return Fraction(sign * digits * 10**scale)
    return Fraction(sign * digits, 10**-scale)


def rat_from_text(text: str) -> Rational:
    """Parse either a decimal literal or an explicit "p/q" fraction."""
    token = text.strip()
    m = _FRACTION_RE.match(token)
    if m:
        den = int(m.group("den"))
        if den == 0:
            raise RationalParseError("zero denominator in %r" % token)
        sign = -1 if m.group("sign") == "-" else 1
        return Fraction(sign * int(m.group("num")), den)
    return rat_from_decimal(token)


def check_bit_budget(v: Rational, max_bits: int | None) -> Rational:
    """Enforce an optional ceiling on the stored size of an exact value.

    ``max_bits`` bounds numerator plus denominator bit length.  ``None``
    disables the check.  Returns ``v`` unchanged when within budget.
    """
    if max_bits is not None:
        used = v.numerator.bit_length() + v.denominator.bit_length()
        if used > max_bits:
            raise ResourceLimitExceeded(
                "exact value needs %d bits, ceiling is %d" % (used, max_bits)
            )
    return v


def _log10_int(n: int) -> float:
    """log10 of a positive integer, accurate to ~1e-12 even for huge n."""
    if n <= 0:
        raise ValueError("log of nonpositive integer")
    bl = n.bit_length()
    if bl <= 512:
        return math.log10(n)
    shift = bl - 64
    top = n >> shift
    return math.log10(top) + shift * math.log10(2.0)


def log10_fraction(v: Rational) -> float:
    """log10 of a positive rational, safe for values far outside float range."""
    if v <= 0:
        raise ValueError("log of nonpositive rational")
    return _log10_int(v.numerator) - _log10_int(v.denominator)


def render_decimal(v: Rational, digits: int) -> str:
    """Render ``v`` in scientific notation with ``digits`` significant digits.

    Digit extraction is exact long division; only the final digit is rounded
    (half to even).  Rendering a terminating decimal with enough digits
    round-trips through rat_from_decimal.
    """
    if digits < 1:
        raise ValueError("need at least one significant digit")
    if v == 0:
        return "0." + "0" * (digits - 1) + "e+0"
    sign = "-" if v < 0 else ""
    a = -v if v < 0 else v
    e10 = math.floor(log10_fraction(a))
    # The float estimate can be off by one near powers of ten; fix exactly.
    while a >= 10 ** (e10 + 1):
        e10 += 1
    while a < 10**e10:
        e10 -= 1
    # mantissa scaled so that digits significant digits sit left of the point
    scale = digits - 1 - e10
    if scale >= 0:
        scaled = a * 10**scale
    else:
        scaled = a / 10**-scale
    q, r = divmod(scaled.numerator, scaled.denominator)
    half = 2 * r - scaled.denominator
    if half > 0 or (half == 0 and q % 2 == 1):
        q += 1
    if q >= 10**digits:  # rounding carried into a new decade
        q //= 10
        e10 += 1
    s = str(q)
    mantissa = s[0] + "." + s[1:] if digits > 1 else s
    return "%s%se%+d" % (sign, mantissa, e10)
