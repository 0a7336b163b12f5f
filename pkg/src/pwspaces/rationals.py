"""Exact rational arithmetic helpers.

All symbolic weight/partition queries are decided on rational parameters;
these utilities centralize parsing ("num/den" strings), exact rational
powers with rational exponents (returning None when the value is
irrational), and the INFINITE sentinel used for block sizes, counts and
divergent sums.
"""

from __future__ import annotations

import math
from fractions import Fraction

INFINITE = math.inf

Extent = int | float  # a nonnegative integer or INFINITE


def is_infinite(x) -> bool:
    return x == INFINITE


def parse_rational(value, location: str | None = None) -> Fraction:
    """Convert an int, float, Fraction or "num/den" string to a Fraction.

    Floats convert exactly (binary value), so 0.5 -> 1/2 but 0.1 -> the
    binary approximation; fixture files should prefer rational strings.
    """
    from .errors import SpecValidationError

    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SpecValidationError("expected a number, got a boolean", location)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SpecValidationError("expected a finite number", location)
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecValidationError(
                f"not a rational number: {value!r}", location
            ) from exc
    raise SpecValidationError(
        f"expected a rational number, got {type(value).__name__}", location
    )


def format_rational(x: Fraction) -> str:
    """Canonical text form: integers bare, otherwise num/den."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_nth_root(n: int, k: int) -> int | None:
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 0 or k <= 0:
        return None
    if n in (0, 1) or k == 1:
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def rational_pow(base: Fraction, exponent: Fraction) -> Fraction | None:
    """base**exponent as an exact Fraction, or None when irrational.

    Requires base > 0.  exponent may be any rational.
    """
    base = Fraction(base)
    exponent = Fraction(exponent)
    if base <= 0:
        raise ValueError("rational_pow requires base > 0")
    if exponent == 0 or base == 1:
        return Fraction(1)
    m, n = exponent.numerator, exponent.denominator
    if m < 0:
        base = 1 / base
        m = -m
    powed = base**m  # Fraction ** positive int is exact
    if n == 1:
        return powed
    num = _int_nth_root(powed.numerator, n)
    den = _int_nth_root(powed.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def pow_value(base: Fraction, exponent: Fraction) -> float:
    """Floating-point base**exponent (base > 0)."""
    exact = rational_pow(base, exponent)
    if exact is not None:
        return float(exact)
    return math.exp(float(exponent) * math.log(float(base)))
