"""Seeded Monte Carlo estimates of spacing probabilities and means.

Two samplers generate sorted spacing vectors:

``uniform-sort``
    sort n uniforms and take consecutive differences with the sentinels 0, 1.
``exponential-ratio``
    draw n+1 standard exponentials (by inverse CDF) and divide by their sum.

Samples are produced in fixed-size blocks.  Block ``b`` draws from a Philox
generator keyed by ``SeedSequence(seed, spawn_key=(b,))``, so the set of draws
depends only on (seed, samples, representation).  ``streams`` only sets how
many worker threads consume blocks; per-block accumulators are merged in block
order, making reports bitwise identical for any stream count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

import numpy as np
from scipy import stats

from . import exact, moments
from .scalar import Number, SpacingsError, format_rational, to_fraction

__all__ = [
    "REPRESENTATIONS",
    "SimConfig",
    "Query",
    "SimEntry",
    "SimReport",
    "sample_gaps",
    "estimate",
    "estimate_survival",
    "estimate_band",
    "estimate_mean",
    "verify",
    "default_queries",
    "sign_test",
]

REPRESENTATIONS = ("uniform-sort", "exponential-ratio")
_ALIASES = {"uniform": "uniform-sort", "expratio": "exponential-ratio"}


@dataclass(frozen=True)
class SimConfig:
    n: int
    samples: int
    seed: int = 0
    representation: str = "uniform-sort"
    streams: int = 1
    block_size: int = 1 << 16

    def __post_init__(self):
        rep = _ALIASES.get(self.representation, self.representation)
        object.__setattr__(self, "representation", rep)
        if rep not in REPRESENTATIONS:
            raise SpacingsError(f"unknown representation {self.representation!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise SpacingsError("n must be a positive integer")
        if self.samples < 1 or self.streams < 1 or self.block_size < 1:
            raise SpacingsError("samples, streams and block_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise SpacingsError("seed must be a 64-bit unsigned integer")

    @property
    def blocks(self) -> int:
        return -(-self.samples // self.block_size)


def _block(cfg: SimConfig, b: int) -> np.ndarray:
    size = min(cfg.block_size, cfg.samples - b * cfg.block_size)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(b,))))
    if cfg.representation == "uniform-sort":
        u = np.sort(rng.random((size, cfg.n)), axis=1)
        g = np.diff(u, axis=1, prepend=0.0, append=1.0)
    else:
        e = -np.log1p(-rng.random((size, cfg.n + 1)))
        g = e / e.sum(axis=1, keepdims=True)
    g /= g.sum(axis=1, keepdims=True)
    g.sort(axis=1)
    return g


def sample_gaps(cfg: SimConfig) -> Iterator[np.ndarray]:
    """Yield blocks of sorted spacing vectors, shape (block, n+1), in block order."""
    for b in range(cfg.blocks):
        yield _block(cfg, b)


def _map_blocks(cfg: SimConfig, fn):
    work = lambda b: fn(_block(cfg, b))  # noqa: E731
    if cfg.streams == 1:
        return [work(b) for b in range(cfg.blocks)]
    with ThreadPoolExecutor(max_workers=cfg.streams) as pool:
        return list(pool.map(work, range(cfg.blocks)))


@dataclass(frozen=True)
class Query:
    """One estimable quantity for a fixed n.

    kind is ``"survival"`` (index k, threshold x), ``"band"`` (index m,
    threshold x) or ``"mean"`` (index k).
    """

    kind: str
    index: int
    x: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("survival", "band", "mean"):
            raise SpacingsError(f"unknown query kind {self.kind!r}")
        if self.kind != "mean":
            if self.x is None:
                raise SpacingsError(f"{self.kind} query needs a threshold")
            object.__setattr__(self, "x", to_fraction(self.x))

    def describe(self, n: int) -> dict:
        d = {"kind": self.kind, "n": n}
        d["m" if self.kind == "band" else "k"] = self.index
        if self.x is not None:
            d["x"] = format_rational(self.x)
        return d

    def exact_value(self, n: int) -> Fraction:
        if self.kind == "survival":
            return exact.survival(n, self.index, self.x, exact=True).value
        if self.kind == "band":
            return exact.band_probability(n, self.index, self.x, exact=True).value
        return moments.expected_gap(n, self.index).value


@dataclass
class SimEntry:
    query: dict
    estimate: float
    se: float
    exact: Fraction | None = None
    z: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"query": self.query, "estimate": self.estimate, "se": self.se}
        if self.exact is not None:
            d["exact"] = float(self.exact)
            d["exact_rational"] = format_rational(self.exact)
        if self.z is not None:
            d["z"] = self.z
        if self.error is not None:
            d["error"] = self.error
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimEntry":
        ex = d.get("exact_rational")
        return cls(
            d["query"],
            d["estimate"],
            d["se"],
            None if ex is None else Fraction(ex),
            d.get("z"),
            d.get("error"),
        )


@dataclass
class SimReport:
    meta: dict
    entries: list[SimEntry] = field(default_factory=list)

    @property
    def z_scores(self) -> list[float]:
        return [e.z for e in self.entries if e.z is not None]

    def alarms(self, threshold: float | None = None) -> list[SimEntry]:
        t = self.meta.get("alarm", 4.0) if threshold is None else threshold
        return [e for e in self.entries if e.z is not None and abs(e.z) > t]

    def extend(self, other: "SimReport") -> None:
        self.entries.extend(other.entries)

    def to_dict(self) -> dict:
        return {"meta": self.meta, "queries": [e.to_dict() for e in self.entries]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "SimReport":
        return cls(dict(d["meta"]), [SimEntry.from_dict(q) for q in d["queries"]])


def _accumulate(cfg: SimConfig, queries: Sequence[Query]):
    """Run the sampler once and collect what every query needs."""
    xs = sorted({q.x for q in queries if q.x is not None})
    xf = np.array([float(x) for x in xs])
    need_mean = any(q.kind == "mean" for q in queries)
    n1 = cfg.n + 1

    def per_block(g: np.ndarray):
        # hist[i, c] = number of vectors with exactly c spacings > xs[i]
        hist = np.zeros((len(xs), n1 + 1), dtype=np.int64)
        for i, x in enumerate(xf):
            hist[i] = np.bincount((g > x).sum(axis=1), minlength=n1 + 1)
        if need_mean:
            mean = g.mean(axis=0)
            m2 = ((g - mean) ** 2).sum(axis=0)
        else:
            mean = m2 = None
        return len(g), hist, mean, m2

    parts = _map_blocks(cfg, per_block)
    hist = np.zeros((len(xs), n1 + 1), dtype=np.int64)
    count, mean, m2 = 0, np.zeros(n1), np.zeros(n1)
    for size, h, bmean, bm2 in parts:
        hist += h
        if need_mean:
            # Chan et al. pairwise merge, in block order.
            delta = bmean - mean
            total = count + size
            mean = mean + delta * (size / total)
            m2 = m2 + bm2 + delta**2 * (count * size / total)
        count += size
    return {x: hist[i] for i, x in enumerate(xs)}, mean, m2, count


def _z(est: float, exact_value: Fraction, n_samples: int, se: float, kind: str) -> float:
    p = float(exact_value)
    if kind == "mean":
        scale = se
    else:
        # Standardise with the null-hypothesis standard error.
        scale = math.sqrt(p * (1.0 - p) / n_samples)
    if scale == 0.0:
        return 0.0 if est == p else math.copysign(math.inf, est - p)
    return (est - p) / scale


def estimate(
    cfg: SimConfig,
    queries: Iterable[Query],
    *,
    with_exact: bool = False,
    alarm: float = 4.0,
) -> SimReport:
    """Empirical frequency or mean, with standard error, for each query."""
    queries = list(queries)
    hists, mean, m2, count = _accumulate(cfg, queries)
    n = cfg.n
    meta = {
        "n": n,
        "samples": count,
        "seed": cfg.seed,
        "representation": cfg.representation,
        "streams": cfg.streams,
        "block_size": cfg.block_size,
        "alarm": alarm,
    }
    report = SimReport(meta)
    for q in queries:
        if q.kind == "mean":
            if not 0 <= q.index <= n + 1:
                report.entries.append(
                    SimEntry(q.describe(n), math.nan, math.nan, error="rank out of range")
                )
                continue
            if q.index == 0:
                est, se = 0.0, 0.0
            else:
                est = float(mean[q.index - 1])
                se = math.sqrt(m2[q.index - 1] / (count - 1) / count) if count > 1 else math.inf
        else:
            h = hists[q.x]
            if q.kind == "survival":
                # G_{n+1:k} > x  iff  at least n+2-k spacings exceed x
                hits = int(h[max(n + 2 - q.index, 0):].sum()) if q.index <= n + 2 else 0
            else:
                hits = int(h[q.index]) if 0 <= q.index <= n + 1 else 0
            est = hits / count
            se = math.sqrt(est * (1.0 - est) / count)
        entry = SimEntry(q.describe(n), est, se)
        if with_exact:
            try:
                entry.exact = q.exact_value(n)
                entry.z = _z(est, entry.exact, count, se, q.kind)
            except (ValueError, ArithmeticError) as exc:
                entry.error = f"{type(exc).__name__}: {exc}"
        report.entries.append(entry)
    return report


def _single(cfg: SimConfig, query: Query) -> SimEntry:
    return estimate(cfg, [query]).entries[0]


def estimate_survival(cfg: SimConfig, k: int, x: Number) -> SimEntry:
    """Empirical P(G_{n+1:k} > x)."""
    return _single(cfg, Query("survival", k, to_fraction(x)))


def estimate_band(cfg: SimConfig, m: int, x: Number) -> SimEntry:
    """Empirical P(exactly m spacings > x)."""
    return _single(cfg, Query("band", m, to_fraction(x)))


def estimate_mean(cfg: SimConfig, k: int) -> SimEntry:
    """Empirical E G_{n+1:k}."""
    return _single(cfg, Query("mean", k))


def default_queries(n: int, xs: Iterable[Number]) -> list[Query]:
    """Every survival and band query on the grid ``xs``, plus every mean."""
    xs = [to_fraction(x) for x in xs]
    out = [Query("survival", k, x) for x in xs for k in range(1, n + 2)]
    out += [Query("band", m, x) for x in xs for m in range(n + 2)]
    out += [Query("mean", k) for k in range(1, n + 2)]
    return out


def verify(cfg: SimConfig, queries: Iterable[Query] | None = None, *, alarm: float = 4.0) -> SimReport:
    """Estimate every query, attach exact values and z-scores, flag |z| > alarm.

    Errors on the exact side are recorded per entry; the batch continues.
    Without explicit queries the grid x = 0.05, 0.10, ..., 0.95 is used.
    """
    if queries is None:
        queries = default_queries(cfg.n, [Fraction(i, 20) for i in range(1, 20)])
    report = estimate(cfg, queries, with_exact=True, alarm=alarm)
    report.meta["alarms"] = len(report.alarms(alarm))
    return report


def sign_test(a: SimReport, b: SimReport) -> float:
    """Two-sided sign-test p-value for est_a - est_b over matching queries.

    Ties are dropped.  Queries are matched on their descriptor.
    """
    key = lambda e: json.dumps(e.query, sort_keys=True)  # noqa: E731
    other = {key(e): e.estimate for e in b.entries}
    diffs = [e.estimate - other[key(e)] for e in a.entries if key(e) in other]
    pos = sum(d > 0 for d in diffs)
    neg = sum(d < 0 for d in diffs)
    if pos + neg == 0:
        return 1.0
    return float(stats.binomtest(pos, pos + neg, 0.5).pvalue)
