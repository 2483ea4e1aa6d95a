"""Exact rational scalars.

``Rational`` is :class:`fractions.Fraction`: arbitrary-precision numerator and
denominator, always in lowest terms with a positive denominator, immutable.
Everything that makes a decision (feasibility, optimality, comparisons against
bounds) runs on these values; floats only appear in reports.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction

RationalLike = Union[Fraction, int, str]

_INT = r"[+-]?\d+"
_RATIO_RE = re.compile(rf"^\s*({_INT})\s*/\s*(\d+)\s*$")
_INT_RE = re.compile(rf"^\s*({_INT})\s*$")
_DEC_RE = re.compile(r"^\s*([+-]?)(\d*)\.(\d*)\s*$")


class RationalParseError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"int"``, ``"int/int"`` or a finite decimal into an exact value.

    >>> parse_rational("2/4")
    Fraction(1, 2)
    >>> parse_rational("0.3")
    Fraction(3, 10)
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a string, got {type(text).__name__}")
    m = _INT_RE.match(text)
    if m:
        return Fraction(int(m.group(1)))
    m = _RATIO_RE.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise RationalParseError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    m = _DEC_RE.match(text)
    if m and (m.group(2) or m.group(3)):
        sign, whole, frac = m.groups()
        value = Fraction(int(whole or "0")) + (
            Fraction(int(frac), 10 ** len(frac)) if frac else 0
        )
        return -value if sign == "-" else value
    raise RationalParseError(f"not a rational literal: {text!r}")


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and rational strings. Floats are rejected."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def fmt(value: Fraction) -> str:
    """Serialize as ``"num/den"`` (integers keep the ``/1``)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def fmt_list(values: Iterable[Fraction]) -> list[str]:
    return [fmt(v) for v in values]


def to_float(value: Fraction) -> float:
    """Display-only float snapshot."""
    return float(value)
