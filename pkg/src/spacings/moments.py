"""Expectations, critical values and asymptotic diagnostics for ordered spacings."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from . import exact
from .exact import GapSpec
from .scalar import Number, RankError, Scalar, SpacingsError, to_fraction

__all__ = [
    "HarmonicTable",
    "harmonic",
    "Breakpoints",
    "expected_gap",
    "integrate_survival",
    "quantile",
    "ConvergenceError",
    "Asymptotic",
    "mean_asymptotics",
]


class ConvergenceError(RuntimeError):
    """Root finding ran out of iterations; ``bracket`` holds the best interval."""

    def __init__(self, message, bracket):
        super().__init__(message)
        self.bracket = bracket


class HarmonicTable:
    """Exact harmonic numbers H_0 = 0, H_j = 1 + 1/2 + ... + 1/j.

    Extended on demand under a lock; reads of already-stored entries never
    block on a concurrent extension.
    """

    def __init__(self):
        self._values = [Fraction(0)]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._values)

    def __getitem__(self, j: int) -> Fraction:
        if j < 0:
            raise IndexError("harmonic numbers are indexed from 0")
        values = self._values
        if j < len(values):
            return values[j]
        with self._lock:
            values = self._values
            # Build on a copy so readers always see a consistent list.
            if j >= len(values):
                extended = list(values)
                h = extended[-1]
                for i in range(len(extended), j + 1):
                    h += Fraction(1, i)
                    extended.append(h)
                self._values = extended
            return self._values[j]


_HARMONIC = HarmonicTable()


def harmonic(j: int) -> Fraction:
    return _HARMONIC[j]


@dataclass(frozen=True)
class Breakpoints:
    """Thresholds where the survival function of G_{n+1:k} changes polynomial piece.

    ``points`` ascend: 1/(n+1), 1/n, ..., 1/(n-k+2).  Beyond the last point
    the survival function is identically zero.
    """

    n: int
    k: int
    points: tuple[Fraction, ...]

    @classmethod
    def of(cls, n: int, k: int) -> "Breakpoints":
        spec = GapSpec(n, k)
        if spec.is_sentinel:
            raise RankError("breakpoints are defined for 1 <= k <= n+1")
        return cls(n, k, tuple(Fraction(1, n - r + 1) for r in range(k)))

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        """Polynomial pieces covering [0, last point]."""
        edges = (Fraction(0),) + self.points
        return list(zip(edges[:-1], edges[1:]))


def expected_gap(n: int, k: int) -> Scalar:
    """E G_{n+1:k} = (H_{n+1} - H_{n+1-k}) / (n+1), exactly.

    >>> expected_gap(2, 2).value
    Fraction(5, 18)
    """
    spec = GapSpec(n, k)
    if spec.k == n + 2:
        raise RankError(f"k must lie in [0, {n + 1}] for n={n}, got {k}")
    return Scalar.of((harmonic(n + 1) - harmonic(n + 1 - k)) / (n + 1))


@lru_cache(maxsize=64)
def _newton_cotes(points: int) -> tuple[Fraction, ...]:
    """Closed Newton-Cotes weights on [0, 1]; exact for degree < points."""
    nodes = [Fraction(i, points - 1) for i in range(points)]
    weights = []
    for i, xi in enumerate(nodes):
        # Lagrange basis polynomial, coefficients in ascending order.
        poly = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            poly = [Fraction(0)] + poly
            for d in range(len(poly) - 1):
                poly[d] -= xj * poly[d + 1]
            denom *= xi - xj
        weights.append(sum(c / (d + 1) for d, c in enumerate(poly)) / denom)
    return tuple(weights)


def integrate_survival(n: int, k: int) -> Fraction:
    """Exact integral of P(G_{n+1:k} > x) over [0, 1].

    The survival function is used as a black box: on each polynomial piece
    between breakpoints it is sampled at n+1 equispaced rationals and
    integrated with closed Newton-Cotes, which is exact for degree n.
    """
    bp = Breakpoints.of(n, k)
    weights = _newton_cotes(n + 1)
    total = Fraction(0)
    for lo, hi in bp.intervals():
        width = hi - lo
        acc = Fraction(0)
        for i, w in enumerate(weights):
            t = lo + width * Fraction(i, n)
            acc += w * exact.survival(n, k, t).value
        total += width * acc
    return total


def quantile(
    n: int,
    k: int,
    p: Number,
    tol: float = 1e-12,
    *,
    max_iter: int = 200,
) -> Scalar:
    """Upper-tail critical value: x with |P(G_{n+1:k} > x) - p| <= tol.

    The survival function is monotone and piecewise polynomial, so the
    breakpoints are scanned for the piece that brackets ``p`` and the root is
    refined there by secant steps safeguarded by bisection.  Inner evaluations
    use the floating path; the returned x is validated exactly (a float is a
    rational) and refinement continues with exact evaluations if the floating
    answer does not survive validation.

    Returns a float ``Scalar`` whose ``info`` carries the exact survival at
    the returned point, the residual, the final bracket and the iteration
    count.
    """
    spec = GapSpec(n, k)
    if spec.is_sentinel:
        raise RankError(f"k must lie in [1, {n + 1}] for n={n}, got {k}")
    if not tol > 0:
        raise SpacingsError("tolerance must be positive")
    pq = to_fraction(p)
    if not 0 < pq < 1:
        raise SpacingsError(f"p must lie in (0, 1), got {p}")
    pf = float(pq)
    inner_rel = min(exact.MAX_REL_ERROR, tol / 4)

    def f_float(x: float) -> float:
        return float(exact.survival(n, k, x, max_rel_error=inner_rel))

    def f_exact(x: float) -> float:
        return float(exact.survival(n, k, x, exact=True).value - pq)

    # Bracket on breakpoints; survival is 1 at 0 and 0 at the last point.
    edges = [0.0] + [float(b) for b in Breakpoints.of(n, k).points]
    lo, hi = edges[0], edges[-1]
    g_lo, g_hi = 1.0 - pf, -pf
    for left, right in zip(edges[:-1], edges[1:]):
        g_right = f_float(right) - pf if right != edges[-1] else -pf
        if g_right <= 0:
            lo, hi, g_hi = left, right, g_right
            break
        g_lo = g_right
    else:  # pragma: no cover - survival vanishes at the last breakpoint
        raise ConvergenceError("no bracketing piece found", (lo, hi))

    iterations = 0

    def refine(g, lo, hi, g_lo, g_hi, target):
        nonlocal iterations
        best = (abs(g_lo), lo) if abs(g_lo) <= abs(g_hi) else (abs(g_hi), hi)
        width = hi - lo
        while iterations < max_iter:
            if best[0] <= target:
                return best[1], lo, hi
            iterations += 1
            x = lo + g_lo * (hi - lo) / (g_lo - g_hi) if g_lo != g_hi else 0.5 * (lo + hi)
            # Bisect when the secant point is degenerate or the bracket stalls.
            if not lo < x < hi or (hi - lo) > 0.5 * width:
                x = 0.5 * (lo + hi)
            width = hi - lo
            if not lo < x < hi:
                return best[1], lo, hi
            gx = g(x)
            if abs(gx) < best[0]:
                best = (abs(gx), x)
            if gx > 0:
                lo, g_lo = x, gx
            else:
                hi, g_hi = x, gx
        raise ConvergenceError(
            f"quantile did not converge in {max_iter} iterations", (lo, hi)
        )

    x, lo, hi = refine(lambda t: f_float(t) - pf, lo, hi, g_lo, g_hi, tol / 2)
    s_exact = exact.survival(n, k, x, exact=True).value
    exact_pass = False
    if abs(float(s_exact - pq)) > tol:
        exact_pass = True
        x, lo, hi = refine(f_exact, lo, hi, f_exact(lo), f_exact(hi), tol)
        s_exact = exact.survival(n, k, x, exact=True).value
    residual = abs(float(s_exact - pq))
    if residual > tol:
        raise ConvergenceError(f"residual {residual:g} exceeds tolerance {tol:g}", (lo, hi))
    return Scalar(
        x,
        error=hi - lo,
        info={
            "survival": s_exact,
            "residual": residual,
            "bracket": (lo, hi),
            "iterations": iterations,
            "exact_refinement": exact_pass,
        },
    )


class Asymptotic(NamedTuple):
    value: float
    regime: str


def mean_asymptotics(n: int, k: int, regime: str = "auto") -> Asymptotic:
    """Large-n approximation to E G_{n+1:k}, for diagnostics only.

    ``"linear"``: k / n**2, appropriate when k = o(n).
    ``"log"``: ln(n / (n-k)) / n, appropriate when n - k grows.
    ``"auto"`` picks linear when k*k <= n and log otherwise.
    """
    GapSpec(n, k)
    if not 1 <= k <= n:
        raise RankError(f"k must lie in [1, {n}] for the asymptotic forms, got {k}")
    if regime == "auto":
        regime = "linear" if k * k <= n else "log"
    if regime == "linear":
        return Asymptotic(k / n**2, "linear")
    if regime == "log":
        if k == n:
            raise RankError("the log form needs k < n")
        return Asymptotic(math.log(n / (n - k)) / n, "log")
    raise ValueError(f"unknown regime {regime!r}")
