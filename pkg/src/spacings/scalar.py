"""Dual-mode numbers: exact rationals and error-tracked floats.

Every probability-valued result in the package is a :class:`Scalar`.  In exact
mode ``value`` is a :class:`fractions.Fraction` (always reduced, positive
denominator, courtesy of ``Fraction`` itself).  In floating mode ``value`` is a
``float`` and ``error`` is a rigorous-in-spirit bound on ``|value - true|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Any, Mapping, Union

Number = Union[int, float, str, Fraction, Decimal]

UNIT_ROUNDOFF = 2.0**-53


class SpacingsError(ValueError):
    """Base class for invalid arguments."""


class RankError(SpacingsError):
    pass


class ThresholdError(SpacingsError):
    pass


class CountError(SpacingsError):
    pass


class DimensionError(SpacingsError):
    pass


@dataclass(frozen=True)
class Scalar:
    """A number produced by one of the evaluation paths.

    Attributes
    ----------
    value : Fraction or float
        The result.  A ``Fraction`` exactly when the exact path produced it
        for an exact request.
    error : float
        Bound on the absolute error of ``value``; zero for exact results.
    condition : float or None
        Cancellation ratio ``sum|terms| / |sum|`` seen by the floating path.
    fallback : bool
        True when a floating request was answered by the rational path
        because the cancellation guard tripped.
    exact : Fraction or None
        The exact value whenever it was computed.
    info : mapping
        Free-form diagnostics (iteration counts, brackets, clamping).
    """

    value: Union[Fraction, float]
    error: float = 0.0
    condition: float | None = None
    fallback: bool = False
    exact: Fraction | None = None
    info: Mapping[str, Any] = field(default_factory=dict, compare=False)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def mode(self) -> str:
        if self.is_exact:
            return "exact"
        return "float-fallback-exact" if self.fallback else "float"

    def __float__(self) -> float:
        return float(self.value)

    @classmethod
    def of(cls, value: Fraction) -> "Scalar":
        return cls(Fraction(value), exact=Fraction(value))


def to_fraction(x: Number) -> Fraction:
    """Convert ``x`` to an exact rational.

    Strings are parsed as rationals (``"1/4"``, ``"0.05"``, ``"1e-3"``);
    floats convert to their exact binary value.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not thresholds")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ThresholdError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ThresholdError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpacingsError(f"cannot parse {x!r} as a rational number") from exc
    raise TypeError(f"unsupported number type {type(x).__name__}")


def resolve(x: Number, exact: bool | None) -> Union[Fraction, float]:
    """Pick the evaluation path for an input.

    ``exact=None`` keeps floats on the floating path and sends everything
    else down the rational path.
    """
    if exact is None:
        exact = not isinstance(x, float)
    if exact:
        return to_fraction(x)
    if isinstance(x, str):
        x = float(to_fraction(x))
    x = float(x)
    if not math.isfinite(x):
        raise ThresholdError(f"non-finite value {x!r}")
    return x


def format_decimal(value: Union[Fraction, float, int], digits: int = 15) -> str:
    """Render ``value`` correctly rounded to ``digits`` significant digits.

    Rounding is done in integer arithmetic (half-even), so the string is the
    true nearest decimal, not an artefact of binary conversion.  Trailing
    zeros are dropped.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    q = Fraction(value)
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    e = len(str(q.numerator)) - len(str(q.denominator))
    while q < Fraction(10) ** e:
        e -= 1
    while q >= Fraction(10) ** (e + 1):
        e += 1
    shift = digits - 1 - e
    mantissa = round(q * Fraction(10) ** shift)
    if mantissa == 10**digits:
        mantissa //= 10
        shift -= 1
        e += 1
    d = Decimal(f"{mantissa}E{-shift}")
    if -7 <= e < max(digits, 16):
        text = format(d, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
    else:
        m = str(mantissa)
        frac = m[1:].rstrip("0")
        text = m[0] + ("." + frac if frac else "") + f"e{e:+d}"
    return sign + text


def format_rational(q: Fraction) -> str:
    """Lossless ``num/den`` rendering (``den`` omitted when it is 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
