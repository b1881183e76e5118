import itertools
from fractions import Fraction as F
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from spacings import exact
from spacings.geometry import (
    Box,
    HalfSpace,
    box_halfspace_volume,
    box_measure,
    oracle_band_probability,
    oracle_joint_exceedance,
    oracle_survival,
    tail_measure_power,
)
from spacings.scalar import DimensionError, SpacingsError


@pytest.mark.parametrize(
    "y, alpha, gamma, x, expected",
    [
        (1, 0, (1, 1), (0, 0), F(1, 2)),
        (1, 0, (1, 1, 1), (0, 0, 0), F(1, 6)),
        (1, 1, (1, 1), (0, 0), F(1, 6)),
        (1, 0, (1, 1), (1, 1), F(0)),
    ],
)
def test_tail_measure_power(y, alpha, gamma, x, expected):
    assert tail_measure_power(y, alpha, gamma, x) == expected


def test_tail_measure_power_iterated_integral():
    # alpha = 1, n = 2: integral of (1 - x1 - x2)_+ over the quadrant above (1/4, 0)
    # = int_{1/4}^{1} (1 - x1)^2 / 2 dx1 = (3/4)^3 / 6
    assert tail_measure_power(1, 1, (1, 1), (F(1, 4), 0)) == F(27, 64) / 6


def test_tail_measure_power_rejects_nonpositive_gamma():
    with pytest.raises(SpacingsError):
        tail_measure_power(1, 0, (1, 0), (0, 0))


@pytest.mark.parametrize(
    "a, b, gamma, y, expected",
    [
        ((0, 0), (1, 1), (1, 1), 2, F(1)),
        ((0, 0), (1, 1), (1, 1), 1, F(1, 2)),
        ((F(1, 4), F(1, 4)), (1, 1), (1, 1), 1, F(1, 8)),
        ((0, 0), (0, 1), (1, 1), 1, F(0)),
    ],
)
def test_box_halfspace_volume(a, b, gamma, y, expected):
    assert box_halfspace_volume(Box(a, b), HalfSpace(gamma, y)) == expected


def test_halfspace_requires_positive_normal():
    with pytest.raises(SpacingsError):
        HalfSpace((1, -1), 1)
    with pytest.raises(SpacingsError):
        Box((1, 0), (0, 1))


def test_dimension_cap():
    box = Box([0] * 5, [1] * 5)
    hs = HalfSpace([1] * 5, 1)
    with pytest.raises(DimensionError):
        box_halfspace_volume(box, hs, max_dim=4)
    with pytest.raises(DimensionError):
        box_halfspace_volume(box, HalfSpace([1] * 4, 1))


def test_twenty_dimensions_feasible():
    box = Box([0] * 20, [1] * 20)
    assert box_halfspace_volume(box, HalfSpace([1] * 20, 1)) == F(1, factorial(20))


@pytest.mark.parametrize("n", range(1, 8))
def test_simplex_identity(n):
    for y in (F(1, 3), F(1), F(5, 2)):
        box = Box([0] * n, [y] * n)  # contains the simplex of size y
        assert box_halfspace_volume(box, HalfSpace([1] * n, y)) == y**n / factorial(n)


boxes = st.integers(1, 5).flatmap(
    lambda n: st.tuples(
        st.lists(st.fractions(0, 1, max_denominator=12), min_size=n, max_size=n),
        st.lists(st.fractions(0, 1, max_denominator=12), min_size=n, max_size=n),
        st.lists(st.fractions(F(1, 4), 3, max_denominator=6), min_size=n, max_size=n),
        st.fractions(0, 3, max_denominator=12),
    )
)


@settings(max_examples=80, deadline=None)
@given(boxes, st.data())
def test_split_additivity(case, data):
    lo, width, gamma, y = case
    hi = [a + w for a, w in zip(lo, width)]
    box, hs = Box(lo, hi), HalfSpace(gamma, y)
    axis = data.draw(st.integers(0, box.dim - 1))
    t = data.draw(st.fractions(0, 1, max_denominator=10))
    at = box.a[axis] + t * (box.b[axis] - box.a[axis])
    left, right = box.split(axis, at)
    assert box_halfspace_volume(left, hs) + box_halfspace_volume(right, hs) == box_halfspace_volume(box, hs)


@settings(max_examples=80, deadline=None)
@given(boxes, st.fractions(F(1, 5), 7, max_denominator=5))
def test_scaling_covariance(case, c):
    lo, width, gamma, y = case
    box = Box(lo, [a + w for a, w in zip(lo, width)])
    v = box_halfspace_volume(box, HalfSpace(gamma, y))
    assert box_halfspace_volume(box, HalfSpace([c * g for g in gamma], c * y)) == v


@settings(max_examples=50, deadline=None)
@given(boxes)
def test_gray_code_matches_plain_vertex_sum(case):
    lo, width, gamma, y = case
    box = Box(lo, [a + w for a, w in zip(lo, width)])
    plain = box_measure(lambda v: tail_measure_power(y, 0, gamma, v), box)
    assert box_halfspace_volume(box, HalfSpace(gamma, y)) == plain


def test_box_measure_recovers_lebesgue():
    # tail prod(1 - x_i)_+ is the uniform measure on the unit cube
    def tail(v):
        out = F(1)
        for t in v:
            out *= max(F(0), 1 - t)
        return out

    assert box_measure(tail, Box((F(1, 4), 0, F(1, 2)), (F(1, 2), 1, 1))) == F(1, 4) * F(1, 2)


@pytest.mark.parametrize(
    "n, j, x, y, expected",
    [(1, 0, F(1, 4), 1, F(3, 4)), (2, 2, F(1, 2), 1, F(1, 2)), (2, 0, F(1, 2), 1, F(0))],
)
def test_oracle_joint_exceedance(n, j, x, y, expected):
    assert oracle_joint_exceedance(n, j, x, y) == expected


@pytest.mark.parametrize(
    "n, m, x, expected",
    [(1, 2, F(1, 4), F(1, 2)), (2, 0, F(1, 2), F(1, 4)), (2, 3, F(1, 3), F(0))],
)
def test_oracle_band_probability(n, m, x, expected):
    assert oracle_band_probability(n, m, x) == expected


@pytest.mark.parametrize("n", range(1, 6))
def test_oracle_matches_closed_forms(n):
    for i in range(1, 10):
        x = F(i, 10)
        for j in range(n + 1):
            for y in (1 - x, F(1)):
                assert oracle_joint_exceedance(n, j, x, y) == exact.joint_exceedance(n, j, x, y).value
        for m in range(n + 2):
            assert oracle_band_probability(n, m, x) == exact.band_probability(n, m, x).value
        for k in range(1, n + 2):
            assert oracle_survival(n, k, x) == exact.survival(n, k, x).value


def test_oracle_band_normalises():
    for n, x in itertools.product(range(1, 6), (F(1, 7), F(2, 5), F(5, 6))):
        assert sum(oracle_band_probability(n, m, x) for m in range(n + 2)) == 1
