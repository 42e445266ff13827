"""Exact-rational helpers and the "num/den" JSON convention.

Rationals travel through JSON as "num/den" strings or bare integers, e.g.
{"p": ["1/2", "1/3", 1]}.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import UsageError

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value) -> Fraction:
    """Parse an int, "num/den" string, or Fraction into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise UsageError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a rational: {value!r}") from exc
    raise UsageError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_point(values) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in values)


def parse_bias_vector(doc) -> tuple[Fraction, ...]:
    """Parse {"p": [...]} (or a bare list) of biases in [0,1]."""
    if isinstance(doc, dict):
        if "p" not in doc:
            raise UsageError('bias document must have a "p" key')
        doc = doc["p"]
    biases = parse_point(doc)
    for b in biases:
        if not (0 <= b <= 1):
            raise UsageError(f"bias {format_rational(b)} outside [0,1]")
    return biases
