import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacings import exact
from spacings.exact import (
    BandQuery,
    GapSpec,
    TailQuery,
    band_probability,
    cdf,
    joint_exceedance,
    max_gap_survival,
    survival,
    tail_pvalue,
)
from spacings.scalar import CountError, RankError, ThresholdError


def brute_force(n, event, grid=2000):
    """Fraction of an n-dim midpoint grid of uniforms whose sorted gaps satisfy ``event``.

    ``event`` maps an array of gap vectors (rows, unsorted, length n+1) to booleans.
    Only n <= 2 is practical; the error is O(1/grid).
    """
    axis = (np.arange(grid) + 0.5) / grid
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), -1).reshape(-1, n)
    u = np.sort(pts, axis=1)
    gaps = np.diff(u, axis=1, prepend=0.0, append=1.0)
    return event(gaps).mean()


# -- documented values -------------------------------------------------------


@pytest.mark.parametrize(
    "n, k, x, expected",
    [(2, 3, "1/2", F(3, 4)), (5, 1, 0, F(1)), (1, 2, "3/4", F(1, 2)), (3, 1, "1/3", F(0)), (3, 1, "1/2", F(0))],
)
def test_survival_values(n, k, x, expected):
    s = survival(n, k, x)
    assert s.is_exact and s.value == expected


def test_survival_brute_force():
    got = brute_force(2, lambda g: g.max(axis=1) > 0.5)
    assert got == pytest.approx(0.75, abs=2e-3)
    got = brute_force(1, lambda g: g.max(axis=1) > 0.75, grid=100_000)
    assert got == pytest.approx(0.5, abs=1e-4)


@pytest.mark.parametrize("n, k, x, expected", [(2, 3, "1/2", F(1, 4)), (4, 2, 1, F(1)), (1, 1, "1/4", F(1, 2))])
def test_cdf_values(n, k, x, expected):
    assert cdf(n, k, x).value == expected


def test_cdf_brute_force():
    got = brute_force(1, lambda g: g.min(axis=1) <= 0.25, grid=100_000)
    assert got == pytest.approx(0.5, abs=1e-4)


@pytest.mark.parametrize("n, m, x, expected", [(1, 2, "1/4", F(1, 2)), (2, 0, "1/2", F(1, 4))])
def test_band_values(n, m, x, expected):
    assert band_probability(n, m, x).value == expected


def test_band_tends_to_one_near_one():
    # for x >= 1/2 only the constant and the c = 1 term remain: 1 - 5 (1-x)^4
    x = F(999, 1000)
    assert band_probability(4, 0, x).value == 1 - 5 * (1 - x) ** 4
    assert band_probability(4, 0, 1).value == 1
    assert band_probability(4, 0, 1 - 1e-6).value == pytest.approx(1.0, abs=1e-15)


def test_band_brute_force():
    got = brute_force(1, lambda g: (g > 0.25).sum(axis=1) == 2, grid=100_000)
    assert got == pytest.approx(0.5, abs=1e-4)
    got = brute_force(2, lambda g: (g > 0.5).sum(axis=1) == 0)
    assert got == pytest.approx(0.25, abs=2e-3)


@pytest.mark.parametrize("n, x, expected", [(2, "1/2", F(3, 4)), (1, "3/4", F(1, 2)), (3, 1, F(0))])
def test_max_gap_values(n, x, expected):
    assert max_gap_survival(n, x).value == expected


@pytest.mark.parametrize(
    "n, j, x, y, expected",
    [(1, 0, "1/4", 1, F(3, 4)), (1, 1, "1/4", 1, F(1, 4)), (2, 2, "1/2", 1, F(1, 2))],
)
def test_joint_exceedance_values(n, j, x, y, expected):
    assert joint_exceedance(n, j, x, y).value == expected


def test_joint_exceedance_brute_force():
    # G_1 <= 1/2, G_2 <= 1/2, G_1 + G_2 < 1 for n = 2
    got = brute_force(2, lambda g: (g[:, 0] <= 0.5) & (g[:, 1] <= 0.5))
    assert got == pytest.approx(0.5, abs=2e-3)


@pytest.mark.parametrize(
    "n, ell, x, expected",
    [(2, 1, "1/2", F(3, 4)), (5, 6, "1/6", F(0)), (1, 2, "1/4", F(1, 2)), (2, 1, "0.9", F(3, 100))],
)
def test_tail_pvalue_values(n, ell, x, expected):
    assert tail_pvalue(n, ell, x).value == expected


# -- validation --------------------------------------------------------------


def test_gapspec_validation():
    GapSpec(3, 0)
    GapSpec(3, 5)
    with pytest.raises(RankError):
        GapSpec(3, 6)
    with pytest.raises(RankError):
        GapSpec(0, 1)
    assert GapSpec(3, 1).support_end == F(1, 4)


def test_sentinel_ranks():
    assert survival(3, 0, "1/2").value == 0
    assert survival(3, 5, "1/2").value == 1
    assert survival(3, 5, 1).value == 0
    assert survival(3, 5, 0.5).value == 1.0


def test_query_types():
    assert BandQuery(4, 2, "1/3").k == 3
    assert TailQuery(4, 1, "1/3").k == 5
    assert BandQuery(2, 0, "1/2").evaluate().value == F(1, 4)
    with pytest.raises(CountError):
        BandQuery(2, 4, "1/2")
    with pytest.raises(CountError):
        TailQuery(2, 0, "1/2")


@pytest.mark.parametrize(
    "call",
    [
        lambda: survival(3, 6, "1/2"),
        lambda: survival(0, 1, "1/2"),
        lambda: joint_exceedance(3, 4, "1/2", 1),
    ],
)
def test_rank_errors(call):
    with pytest.raises(RankError):
        call()


@pytest.mark.parametrize(
    "call",
    [
        lambda: survival(3, 1, "-1/2"),
        lambda: survival(3, 1, 1.5),
        lambda: max_gap_survival(3, 2),
        lambda: joint_exceedance(3, 1, 0, 1),
        lambda: joint_exceedance(3, 1, "1/2", 0),
        lambda: band_probability(3, 1, "3/2"),
    ],
)
def test_threshold_errors(call):
    with pytest.raises(ThresholdError):
        call()


def test_count_errors():
    with pytest.raises(CountError):
        band_probability(3, 5, "1/2")
    with pytest.raises(CountError):
        tail_pvalue(3, 5, "1/2")


# -- structural properties ---------------------------------------------------

rational_x = st.fractions(min_value=F(1, 10**6), max_value=1 - F(1, 10**6), max_denominator=10**6)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), rational_x)
def test_band_normalisation(n, x):
    assert sum(band_probability(n, m, x).value for m in range(n + 2)) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), rational_x)
def test_telescoping(n, x):
    for j in range(n + 1):
        diff = survival(n, j + 1, x).value - survival(n, j, x).value
        assert diff == band_probability(n, n + 1 - j, x).value


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), rational_x)
def test_monotone_in_rank(n, x):
    values = [survival(n, k, x).value for k in range(0, n + 3)]
    assert all(a <= b for a, b in zip(values, values[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.data())
def test_monotone_in_threshold(n, data):
    k = data.draw(st.integers(1, n + 1))
    xs = sorted(data.draw(st.lists(rational_x, min_size=2, max_size=8)))
    values = [survival(n, k, x).value for x in xs]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert survival(n, k, 0).value == 1
    end = F(1, n - k + 2)
    assert survival(n, k, end).value == 0
    assert survival(n, k, end - F(1, 10**9)).value > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 25), rational_x)
def test_fisher_consistency(n, x):
    assert max_gap_survival(n, x).value == survival(n, n + 1, x).value


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), rational_x)
def test_decomposition(n, x):
    from math import comb

    for k in range(1, n + 1):
        rhs = comb(n, k) * joint_exceedance(n, k, x, 1 - x).value + comb(n, k - 1) * (
            joint_exceedance(n, k - 1, x, 1).value - joint_exceedance(n, k - 1, x, 1 - x).value
        )
        assert band_probability(n, n + 1 - k, x).value == rhs


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), rational_x, st.data())
def test_nonnegative_without_clamping(n, x, data):
    k = data.draw(st.integers(1, n + 1))
    m = data.draw(st.integers(0, n + 1))
    # evaluate_terms raises if an exact probability leaves [0, 1]
    assert 0 <= survival(n, k, x).value <= 1
    assert 0 <= band_probability(n, m, x).value <= 1


def test_truncation_skips_dead_terms():
    # at x = 1/2 only the c = 1 term of the max-gap sum for n = 1 survives
    terms = exact.survival_terms(1, 2)
    assert [t.c for t in terms] == [2, 1]
    assert terms[0](F(1, 2)) == 0


def test_term_support_end():
    t = exact.TruncatedPowerTerm(1, F(1), 4, 3)
    assert t.support_end == F(1, 4)
    assert t(F(1, 3)) == 0
    assert t(F(1, 8)) == F(1, 8)


# -- floating path -----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5, 10, 15, 20])
def test_float_within_reported_bound(n):
    rng = np.random.default_rng(n)
    for x in rng.uniform(0.0, 1.0, 25):
        x = float(x)
        for k in range(1, n + 2):
            s = survival(n, k, x)
            ex = survival(n, k, x, exact=True).value
            assert abs(F(s.value) - ex) <= F(s.error) + F(2.0**-53) * abs(ex)
        for m in range(n + 2):
            s = band_probability(n, m, x)
            ex = band_probability(n, m, x, exact=True).value
            assert abs(F(s.value) - ex) <= F(s.error) + F(2.0**-53) * abs(ex)


def test_guard_disabled_bound_still_holds():
    # With the guard off the error bound must still cover the true error.
    for n, k, x in itertools.product([15, 20], [3, 8, 12], [0.01, 0.02, 0.03]):
        s = survival(n, k, x, cond_threshold=float("inf"), max_rel_error=float("inf"))
        assert not s.fallback
        ex = survival(n, k, x, exact=True).value
        assert abs(F(s.value) - ex) <= F(s.error)


def test_fallback_at_heavy_cancellation():
    s = survival(50, 25, 0.01)
    assert s.fallback and s.mode == "float-fallback-exact"
    assert s.exact == survival(50, 25, 0.01, exact=True).value
    # condition ~3.6e11: below the ratio threshold, so the error-bound guard fires
    assert s.condition > 1e11
    assert survival(50, 25, 0.01, max_rel_error=1.0).fallback is False


def test_condition_threshold_is_configurable():
    s = survival(5, 3, 0.1, cond_threshold=0.5)
    assert s.fallback
    s = survival(5, 3, 0.1)
    assert not s.fallback and s.condition >= 1


def test_overflowing_terms_fall_back():
    s = survival(1200, 600, 0.0005)
    assert s.fallback
    assert 0.0 <= s.value <= 1.0


def test_cdf_float_path():
    s = cdf(2, 3, 0.5)
    assert s.value == pytest.approx(0.25, abs=1e-15)
    assert s.mode == "float"
