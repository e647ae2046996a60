"""Exact rational scalars.

All coefficients are :class:`gmpy2.mpq` values (always in lowest terms with a
positive denominator).  They compare and hash equal to the matching
:class:`fractions.Fraction`, so either may be passed in.
"""

from __future__ import annotations

from numbers import Rational

from gmpy2 import mpq

__all__ = ["Q", "ZERO", "ONE", "as_rational", "format_rational", "parse_rational"]

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


def as_rational(value) -> mpq:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if type(value) is mpq:
        return value
    if isinstance(value, bool):
        raise TypeError(f"not an exact rational: {value!r}")
    if isinstance(value, (int, Rational)):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> mpq:
    num, sep, den = text.strip().partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError as exc:
        raise ValueError(f"malformed rational {text!r}") from exc
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(n, d)


def format_rational(value) -> str:
    value = as_rational(value)
    return f"{value.numerator}/{value.denominator}"
