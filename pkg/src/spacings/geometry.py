"""Exact small-n oracle built from box / half-space volumes.

Nothing here uses the closed forms in :mod:`spacings.exact`.  Spacing
probabilities are assembled from first principles: the gaps G_1..G_n have the
uniform density n! on the simplex, so an event that constrains each gap to an
interval and bounds their sum is n! times the volume of an axis-aligned box
cut by one half-space.  That volume comes from inclusion-exclusion over the
2^n box vertices of the tail function of the measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

from .scalar import DimensionError, Number, RankError, SpacingsError, ThresholdError, to_fraction

__all__ = [
    "Box",
    "HalfSpace",
    "MAX_DIMENSION",
    "tail_measure_power",
    "box_measure",
    "box_halfspace_volume",
    "oracle_joint_exceedance",
    "oracle_band_probability",
    "oracle_survival",
]

MAX_DIMENSION = 20


@dataclass(frozen=True)
class Box:
    """The half-open box prod_i (a_i, b_i]."""

    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    def __init__(self, a: Sequence[Number], b: Sequence[Number]):
        a = tuple(to_fraction(v) for v in a)
        b = tuple(to_fraction(v) for v in b)
        if len(a) != len(b):
            raise DimensionError("box corners differ in dimension")
        if any(lo > hi for lo, hi in zip(a, b)):
            raise SpacingsError("box requires a_i <= b_i")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def h(self) -> tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in zip(self.a, self.b))

    def split(self, axis: int, at: Number) -> tuple["Box", "Box"]:
        at = to_fraction(at)
        if not self.a[axis] <= at <= self.b[axis]:
            raise SpacingsError("split point outside the box")
        lower_b = list(self.b)
        upper_a = list(self.a)
        lower_b[axis] = at
        upper_a[axis] = at
        return Box(self.a, lower_b), Box(upper_a, self.b)


@dataclass(frozen=True)
class HalfSpace:
    """{x : gamma . x <= y} with strictly positive gamma."""

    gamma: tuple[Fraction, ...]
    y: Fraction

    def __init__(self, gamma: Sequence[Number], y: Number):
        gamma = tuple(to_fraction(g) for g in gamma)
        if any(g <= 0 for g in gamma):
            raise SpacingsError("half-space normal must be strictly positive")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "y", to_fraction(y))

    @property
    def dim(self) -> int:
        return len(self.gamma)


def tail_measure_power(
    y: Number, alpha: int, gamma: Sequence[Number], x: Sequence[Number]
) -> Fraction:
    """Measure of the orthant prod (x_i, inf) under density (y - gamma.x)_+^alpha.

    Closed form (y - gamma.x)_+^(alpha+n) / prod((alpha+i) gamma_i).
    For alpha = 0 the density is the indicator of the half-space.
    """
    if not isinstance(alpha, int) or alpha < 0:
        raise SpacingsError("alpha must be a nonnegative integer")
    gamma = [to_fraction(g) for g in gamma]
    x = [to_fraction(v) for v in x]
    if len(gamma) != len(x):
        raise DimensionError("gamma and x differ in dimension")
    if any(g <= 0 for g in gamma):
        raise SpacingsError("gamma must be strictly positive")
    n = len(gamma)
    base = to_fraction(y) - sum(g * v for g, v in zip(gamma, x))
    if base <= 0:
        return Fraction(0)
    denom = Fraction(1)
    for i, g in enumerate(gamma, start=1):
        denom *= (alpha + i) * g
    return base ** (alpha + n) / denom


def _gray_vertices(a: Sequence[Fraction], h: Sequence[Fraction], gamma: Sequence[Fraction]):
    """Yield (parity, gamma . (a + eps*h)) over eps in {0,1}^n in Gray-code order.

    Each step flips one coordinate, so the dot product updates in O(1).
    """
    n = len(a)
    dot = sum(g * v for g, v in zip(gamma, a))
    eps = [0] * n
    parity = 0
    yield parity, dot
    for step in range(1, 1 << n):
        i = (step & -step).bit_length() - 1
        delta = gamma[i] * h[i]
        if eps[i]:
            dot -= delta
        else:
            dot += delta
        eps[i] ^= 1
        parity ^= 1
        yield parity, dot


def box_measure(tail: Callable[[Sequence[Fraction]], Fraction], box: Box) -> Fraction:
    """mu(box) from a joint tail function by inclusion-exclusion over vertices."""
    n = box.dim
    h = box.h
    total = Fraction(0)
    for mask in range(1 << n):
        vertex = [box.a[i] + (h[i] if mask >> i & 1 else 0) for i in range(n)]
        sign = -1 if bin(mask).count("1") % 2 else 1
        total += sign * tail(vertex)
    return total


def box_halfspace_volume(box: Box, hs: HalfSpace, *, max_dim: int = MAX_DIMENSION) -> Fraction:
    """Exact volume of box ∩ {gamma . x <= y}."""
    n = box.dim
    if hs.dim != n:
        raise DimensionError("box and half-space differ in dimension")
    if n > max_dim:
        raise DimensionError(f"dimension {n} exceeds cap {max_dim} (cost 2^n)")
    h = box.h
    if any(e == 0 for e in h):
        return Fraction(0)
    if n == 0:
        return Fraction(1 if hs.y >= 0 else 0)
    # Integer arithmetic over a common denominator.
    d = math.lcm(
        hs.y.denominator,
        *(v.denominator for v in box.a),
        *(v.denominator for v in h),
    )
    gd = math.lcm(*(g.denominator for g in hs.gamma))
    scale = d * gd
    a_i = [int(v * d) for v in box.a]
    h_i = [int(v * d) for v in h]
    g_i = [int(g * gd) for g in hs.gamma]
    y_i = int(hs.y * scale)
    total = 0
    for parity, dot in _gray_vertices(a_i, h_i, g_i):
        r = y_i - dot
        if r <= 0:
            continue
        total += -(r**n) if parity else r**n
    prod_gamma = math.prod(hs.gamma)
    return Fraction(total, scale**n) / (factorial(n) * prod_gamma)


def _gap_box(n: int, j: int, x: Fraction) -> Box:
    return Box([0] * j + [x] * (n - j), [x] * j + [1] * (n - j))


def oracle_joint_exceedance(
    n: int, j: int, x: Number, y: Number, *, max_dim: int = MAX_DIMENSION
) -> Fraction:
    """n! * vol(box ∩ {sum <= y}) for the box [0,x]^j x [x,1]^(n-j)."""
    if not isinstance(n, int) or n < 1:
        raise RankError(f"n must be a positive integer, got {n!r}")
    if not isinstance(j, int) or not 0 <= j <= n:
        raise RankError(f"j must lie in [0, {n}], got {j!r}")
    x = to_fraction(x)
    y = to_fraction(y)
    if not 0 < x < 1:
        raise ThresholdError(f"x must lie in (0, 1), got {x}")
    if not 0 < y <= 1:
        raise ThresholdError(f"y must lie in (0, 1], got {y}")
    vol = box_halfspace_volume(_gap_box(n, j, x), HalfSpace([1] * n, y), max_dim=max_dim)
    return factorial(n) * vol


def oracle_band_probability(n: int, m: int, x: Number, *, max_dim: int = MAX_DIMENSION) -> Fraction:
    """P(exactly m of the n+1 spacings exceed x), by exchangeability.

    With k = n+1-m spacings at most x: either the last spacing G_{n+1} exceeds
    x (k small gaps among the first n, their total below 1-x), or it does not
    (k-1 small gaps among the first n, total in [1-x, 1)).
    """
    if not isinstance(m, int) or not 0 <= m <= n + 1:
        raise RankError(f"m must lie in [0, {n + 1}], got {m!r}")
    x = to_fraction(x)
    k = n + 1 - m
    total = Fraction(0)
    if k <= n:
        total += comb(n, k) * oracle_joint_exceedance(n, k, x, 1 - x, max_dim=max_dim)
    if k >= 1:
        j = k - 1
        total += comb(n, j) * (
            oracle_joint_exceedance(n, j, x, 1, max_dim=max_dim)
            - oracle_joint_exceedance(n, j, x, 1 - x, max_dim=max_dim)
        )
    return total


def oracle_survival(n: int, k: int, x: Number, *, max_dim: int = MAX_DIMENSION) -> Fraction:
    """P(G_{n+1:k} > x) as the sum of band probabilities with fewer than k small gaps."""
    if not isinstance(k, int) or not 1 <= k <= n + 1:
        raise RankError(f"k must lie in [1, {n + 1}], got {k!r}")
    return sum(
        (oracle_band_probability(n, n + 1 - j, x, max_dim=max_dim) for j in range(k)),
        Fraction(0),
    )
