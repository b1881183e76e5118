"""Closed-form distributions of the ordered uniform spacings.

Let ``U_1..U_n`` be i.i.d. uniform on [0, 1] and ``G_1..G_{n+1}`` the spacings
between consecutive order statistics (with sentinels 0 and 1).  Writing
``G_{n+1:k}`` for the k-th smallest spacing, this module evaluates

* ``survival(n, k, x)``        P(G_{n+1:k} > x)
* ``band_probability(n, m, x)`` P(exactly m spacings exceed x)
* ``max_gap_survival(n, x)``   P(largest spacing > x), Fisher's formula
* ``joint_exceedance(n, j, x, y)`` P(G_1..G_j <= x, G_{j+1}..G_n > x, sum < y)
* ``tail_pvalue(n, ell, x)``   P(at least ell spacings exceed x)

Each is an alternating sum of truncated powers ``(offset - c*x)_+^n``.  Rational
inputs are evaluated exactly.  Float inputs go through an error-tracked
floating sum that falls back to rational arithmetic when cancellation makes the
float answer untrustworthy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence, Union

from .scalar import (
    UNIT_ROUNDOFF,
    CountError,
    Number,
    RankError,
    Scalar,
    ThresholdError,
    resolve,
)

__all__ = [
    "GapSpec",
    "BandQuery",
    "TailQuery",
    "TruncatedPowerTerm",
    "COND_THRESHOLD",
    "MAX_REL_ERROR",
    "survival",
    "cdf",
    "band_probability",
    "max_gap_survival",
    "joint_exceedance",
    "tail_pvalue",
    "survival_terms",
    "band_terms",
    "evaluate_terms",
]

#: Cancellation ratio sum|terms|/|sum| above which floats are abandoned.
COND_THRESHOLD = 1e12
#: Relative error bound above which floats are abandoned.
MAX_REL_ERROR = 1e-10


@dataclass(frozen=True)
class GapSpec:
    """The k-th smallest of the n+1 spacings of n uniform points.

    Rank 0 is the sentinel G_{n+1:0} = 0 and rank n+2 the sentinel 1.
    """

    n: int
    k: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise RankError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.k, int) or not 0 <= self.k <= self.n + 2:
            raise RankError(f"k must lie in [0, {self.n + 2}] for n={self.n}, got {self.k!r}")

    @property
    def is_sentinel(self) -> bool:
        return self.k == 0 or self.k == self.n + 2

    @property
    def support_end(self) -> Fraction:
        """Smallest x with P(G_{n+1:k} > x) = 0, for 1 <= k <= n+1."""
        return Fraction(1, self.n - self.k + 2)


@dataclass(frozen=True)
class BandQuery:
    """Exactly ``m`` of the n+1 spacings strictly exceed ``x``."""

    n: int
    m: int
    x: Number

    def __post_init__(self):
        _check_n(self.n)
        if not isinstance(self.m, int) or not 0 <= self.m <= self.n + 1:
            raise CountError(f"m must lie in [0, {self.n + 1}] for n={self.n}, got {self.m!r}")

    @property
    def k(self) -> int:
        return self.n + 1 - self.m

    def evaluate(self, **kwargs) -> Scalar:
        return band_probability(self.n, self.m, self.x, **kwargs)


@dataclass(frozen=True)
class TailQuery:
    """At least ``ell`` of the n+1 spacings strictly exceed ``x``."""

    n: int
    ell: int
    x: Number

    def __post_init__(self):
        _check_n(self.n)
        if not isinstance(self.ell, int) or not 1 <= self.ell <= self.n + 1:
            raise CountError(f"ell must lie in [1, {self.n + 1}] for n={self.n}, got {self.ell!r}")

    @property
    def k(self) -> int:
        return self.n + 2 - self.ell

    def evaluate(self, **kwargs) -> Scalar:
        return tail_pvalue(self.n, self.ell, self.x, **kwargs)


@dataclass(frozen=True)
class TruncatedPowerTerm:
    """``sign * coefficient * max(0, offset - c*x) ** exponent``.

    Vanishes identically for ``x >= offset / c``.  ``c = 0`` gives a constant.
    """

    sign: int
    coefficient: Fraction
    c: int
    exponent: int
    offset: Fraction = Fraction(1)

    @property
    def support_end(self) -> Fraction | None:
        return None if self.c == 0 else self.offset / self.c

    def __call__(self, x: Fraction) -> Fraction:
        base = self.offset - self.c * Fraction(x)
        if base <= 0:
            return Fraction(0)
        return self.sign * self.coefficient * base**self.exponent


def _check_n(n):
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise RankError(f"n must be a positive integer, got {n!r}")


def _check_unit(x, name="x", *, open_left=False, open_right=False):
    lo_ok = x > 0 if open_left else x >= 0
    hi_ok = x < 1 if open_right else x <= 1
    if not (lo_ok and hi_ok):
        lo = "(" if open_left else "["
        hi = ")" if open_right else "]"
        raise ThresholdError(f"{name} must lie in {lo}0, 1{hi}, got {x}")


# -- term tables -------------------------------------------------------------


@lru_cache(maxsize=1024)
def survival_terms(n: int, k: int) -> tuple[TruncatedPowerTerm, ...]:
    """Truncated-power expansion of P(G_{n+1:k} > x), 1 <= k <= n+1."""
    lead = (n + 1) * comb(n, k - 1)
    terms = []
    for r in range(k):
        coef = Fraction(lead * comb(k - 1, r), n - r + 1)
        terms.append(TruncatedPowerTerm((-1) ** (k + 1 + r), coef, n - r + 1, n))
    return tuple(terms)


@lru_cache(maxsize=1024)
def band_terms(n: int, k: int) -> tuple[TruncatedPowerTerm, ...]:
    """Expansion of P(G_{n+1:k} <= x < G_{n+1:k+1}), 0 <= k <= n+1.

    For k = n+1 the r = n+1 term has c = 0 and is the constant 1.
    """
    lead = comb(n + 1, k)
    return tuple(
        TruncatedPowerTerm((-1) ** (k + r), Fraction(lead * comb(k, r)), n - r + 1, n)
        for r in range(k + 1)
    )


@lru_cache(maxsize=256)
def _max_gap_terms(n: int) -> tuple[TruncatedPowerTerm, ...]:
    return tuple(
        TruncatedPowerTerm((-1) ** (s - 1), Fraction(comb(n + 1, s)), s, n)
        for s in range(1, n + 2)
    )


def _joint_terms(n: int, j: int, y: Fraction) -> tuple[TruncatedPowerTerm, ...]:
    return tuple(
        TruncatedPowerTerm((-1) ** (j - r), Fraction(comb(j, r)), n - r, n, y)
        for r in range(j + 1)
    )


# -- evaluation --------------------------------------------------------------


def _exact_sum(terms: Sequence[TruncatedPowerTerm], x: Fraction) -> Fraction:
    # Shared denominator keeps the powers in integer arithmetic.
    total = Fraction(0)
    for t in terms:
        d = math.lcm(t.offset.denominator, x.denominator)
        num = t.offset.numerator * (d // t.offset.denominator) - t.c * x.numerator * (
            d // x.denominator
        )
        if num <= 0:
            continue
        total += t.sign * t.coefficient * Fraction(num**t.exponent, d**t.exponent)
    return total


def _float_sum(terms: Sequence[TruncatedPowerTerm], x: float):
    """Return (sum, error bound, sum of magnitudes).

    Raises OverflowError when a term is not representable.
    """
    u = UNIT_ROUNDOFF
    values = []
    err = 0.0
    for t in terms:
        cx = t.c * x
        base = float(t.offset) - cx
        if base <= 0.0:
            continue
        coef = float(t.coefficient)
        v = t.sign * coef * base**t.exponent
        if not math.isfinite(v):
            raise OverflowError("term overflow")
        # c*x and the subtraction each round once; pow and the products add a few ulps.
        rel_base = u * (abs(cx) + base) / base
        rel = math.expm1(t.exponent * math.log1p(rel_base)) + 4 * u
        err += 1.01 * rel * abs(v)
        values.append(v)
    values.sort(key=abs, reverse=True)
    total = math.fsum(values)
    magnitude = math.fsum(abs(v) for v in values)
    return total, err + u * abs(total), magnitude


def evaluate_terms(
    terms: Sequence[TruncatedPowerTerm],
    x: Union[Fraction, float],
    *,
    probability: bool = True,
    cond_threshold: float = COND_THRESHOLD,
    max_rel_error: float = MAX_REL_ERROR,
) -> Scalar:
    """Sum a truncated-power expansion at ``x``.

    A ``Fraction`` x is summed exactly.  A float x is summed in floating point
    with an error bound; if the cancellation ratio exceeds ``cond_threshold``,
    the relative error bound exceeds ``max_rel_error``, or a term overflows,
    the sum is redone exactly and ``fallback`` is set on the result.
    """
    if isinstance(x, Fraction):
        v = _exact_sum(terms, x)
        if probability and not 0 <= v <= 1:
            raise ArithmeticError(f"exact probability {v} outside [0, 1]")
        return Scalar(v, exact=v)

    try:
        total, err, magnitude = _float_sum(terms, x)
    except OverflowError:
        total, err, magnitude = math.nan, math.inf, math.inf
    if total != 0.0:
        condition = magnitude / abs(total)
    else:
        condition = 1.0 if magnitude == 0.0 else math.inf
    rel_err = err / abs(total) if total != 0.0 else (0.0 if err == 0.0 else math.inf)
    if not math.isfinite(total) or condition > cond_threshold or rel_err > max_rel_error:
        exact = _exact_sum(terms, Fraction(x))
        value = float(exact)
        return Scalar(
            value,
            error=UNIT_ROUNDOFF * abs(value),
            condition=condition,
            fallback=True,
            exact=exact,
        )
    info = {}
    if probability and not 0.0 <= total <= 1.0:
        clamped = min(1.0, max(0.0, total))
        info["clamped_from"] = total
        err += abs(total - clamped)
        total = clamped
    return Scalar(total, error=err, condition=condition, info=info)


def _constant(v: int, like: Union[Fraction, float]) -> Scalar:
    if isinstance(like, Fraction):
        return Scalar.of(Fraction(v))
    return Scalar(float(v), condition=1.0)


# -- public operations -------------------------------------------------------


def survival(
    n: int,
    k: int,
    x: Number,
    *,
    exact: bool | None = None,
    cond_threshold: float = COND_THRESHOLD,
    max_rel_error: float = MAX_REL_ERROR,
) -> Scalar:
    """P(G_{n+1:k} > x), the upper tail of the k-th smallest spacing.

    Parameters
    ----------
    n : int
        Number of uniform points (there are n+1 spacings).
    k : int
        Rank, 1 <= k <= n+1.  The sentinels k = 0 and k = n+2 return the
        constants 0 and 1 (P(1 > x) for x < 1).
    x : number
        Threshold in [0, 1].  Floats use the floating path unless
        ``exact=True``; everything else is evaluated exactly.

    Examples
    --------
    >>> survival(2, 3, "1/2").value
    Fraction(3, 4)
    """
    spec = GapSpec(n, k)
    xv = resolve(x, exact)
    _check_unit(xv)
    if k == 0:
        return _constant(0, xv)
    if k == n + 2:
        return _constant(1 if xv < 1 else 0, xv)
    return evaluate_terms(
        survival_terms(spec.n, spec.k),
        xv,
        cond_threshold=cond_threshold,
        max_rel_error=max_rel_error,
    )


def cdf(n: int, k: int, x: Number, **kwargs) -> Scalar:
    """P(G_{n+1:k} <= x); the complement of :func:`survival`."""
    s = survival(n, k, x, **kwargs)
    exact = None if s.exact is None else 1 - s.exact
    if s.is_exact:
        return Scalar(exact, exact=exact)
    return Scalar(
        1.0 - s.value,
        error=s.error + UNIT_ROUNDOFF,
        condition=s.condition,
        fallback=s.fallback,
        exact=exact,
        info=s.info,
    )


def band_probability(
    n: int,
    m: int,
    x: Number,
    *,
    exact: bool | None = None,
    cond_threshold: float = COND_THRESHOLD,
    max_rel_error: float = MAX_REL_ERROR,
) -> Scalar:
    """Probability that exactly ``m`` of the n+1 spacings strictly exceed ``x``.

    Equals P(G_{n+1:k} <= x < G_{n+1:k+1}) with k = n+1-m.  Defined for x in
    [0, 1]; at the endpoints the expansion reduces to the limiting constants
    (all spacings exceed 0, none exceed 1).
    """
    q = BandQuery(n, m, x)
    xv = resolve(x, exact)
    _check_unit(xv)
    return evaluate_terms(
        band_terms(q.n, q.k),
        xv,
        cond_threshold=cond_threshold,
        max_rel_error=max_rel_error,
    )


def max_gap_survival(
    n: int,
    x: Number,
    *,
    exact: bool | None = None,
    cond_threshold: float = COND_THRESHOLD,
    max_rel_error: float = MAX_REL_ERROR,
) -> Scalar:
    """P(max spacing > x) = sum_s (-1)^(s-1) C(n+1, s) (1 - s x)_+^n.

    This is Fisher's null distribution for the largest normalised
    periodogram ordinate among n+1.
    """
    _check_n(n)
    xv = resolve(x, exact)
    _check_unit(xv)
    return evaluate_terms(
        _max_gap_terms(n),
        xv,
        cond_threshold=cond_threshold,
        max_rel_error=max_rel_error,
    )


def joint_exceedance(
    n: int,
    j: int,
    x: Number,
    y: Number,
    *,
    exact: bool | None = None,
    cond_threshold: float = COND_THRESHOLD,
    max_rel_error: float = MAX_REL_ERROR,
) -> Scalar:
    """P(G_1..G_j <= x, G_{j+1}..G_n > x, G_1 + ... + G_n < y).

    Only the first n (unordered) spacings enter.  Requires 0 <= j <= n,
    0 < x < 1 and 0 < y <= 1.
    """
    _check_n(n)
    if not isinstance(j, int) or not 0 <= j <= n:
        raise RankError(f"j must lie in [0, {n}] for n={n}, got {j!r}")
    if exact is None:
        exact = not (isinstance(x, float) or isinstance(y, float))
    xv = resolve(x, exact)
    yv = resolve(y, exact)
    _check_unit(xv, open_left=True, open_right=True)
    _check_unit(yv, "y", open_left=True)
    return evaluate_terms(
        _joint_terms(n, j, Fraction(yv)),
        xv,
        cond_threshold=cond_threshold,
        max_rel_error=max_rel_error,
    )


def tail_pvalue(n: int, ell: int, x: Number, **kwargs) -> Scalar:
    """P(at least ``ell`` of the n+1 normalised statistics exceed ``x``).

    The significance level of observing ``ell`` or more exceedances of the
    critical value ``x``; equal to survival(n, n+2-ell, x).
    """
    q = TailQuery(n, ell, x)
    return survival(q.n, q.k, x, **kwargs)
