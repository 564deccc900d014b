"""Positive/negative component decomposition."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from asymcause.decompose import ComponentPair, decompose, recompose
from asymcause.errors import DataError, LengthError, StructuralError
from asymcause.series import TimeSeries


def make_series(values, series_id="x"):
    values = np.asarray(values, dtype=float)
    return TimeSeries(series_id, np.arange(len(values)), values, "index")


def test_mixed_increments():
    pair = decompose(make_series([5.0, 7.0, 4.0]))
    assert_allclose(pair.positive.values, [2.5, 4.5, 4.5])
    assert_allclose(pair.negative.values, [2.5, 2.5, -0.5])
    assert pair.initial_value == 5.0


def test_monotone_input_leaves_negative_flat():
    pair = decompose(make_series([1.0, 2.0, 3.0]))
    assert_allclose(pair.positive.values, [0.5, 1.5, 2.5])
    assert_allclose(pair.negative.values, [0.5, 0.5, 0.5])


@pytest.mark.parametrize("c", [0.0, 3.0, -2.5, 1e6])
def test_constant_series_splits_evenly(c):
    pair = decompose(make_series([c, c, c, c]))
    assert_allclose(pair.positive.values, np.full(4, c / 2.0))
    assert_allclose(pair.negative.values, np.full(4, c / 2.0))


def test_round_trip_exact_small():
    series = make_series([5.0, 7.0, 4.0])
    assert_allclose(recompose(decompose(series)).values, series.values)


def test_round_trip_random_walks():
    rng = np.random.default_rng(42)
    for _ in range(25):
        values = np.cumsum(rng.standard_normal(200)) + 10.0
        series = make_series(values)
        back = recompose(decompose(series))
        assert np.max(np.abs(back.values - values)) < 1e-9


def test_component_labels_and_dates():
    series = make_series([1.0, 4.0, 2.0], series_id="S")
    pair = decompose(series)
    assert pair.positive.id == "S+"
    assert pair.negative.id == "S-"
    assert pair.origin_id == "S"
    assert np.array_equal(pair.positive.dates, series.dates)
    assert recompose(pair).id == "S"


def test_recompose_explicit_components():
    pos = TimeSeries("x+", np.arange(2, 5), [2.5, 4.5, 4.5], "index")
    neg = TimeSeries("x-", np.arange(2, 5), [2.5, 2.5, -0.5], "index")
    pair = ComponentPair(pos, neg, "x", 5.0)
    assert_allclose(recompose(pair).values, [5.0, 7.0, 4.0])


def test_length_mismatch_rejected():
    pos = TimeSeries("x+", np.arange(4), [1.0, 2.0, 3.0, 4.0], "index")
    neg = TimeSeries("x-", np.arange(3), [1.0, 0.0, -1.0], "index")
    with pytest.raises(StructuralError):
        ComponentPair(pos, neg, "x", 2.0)


def test_short_series_rejected():
    with pytest.raises(LengthError):
        make_series([1.0, 2.0])


def test_non_finite_rejected():
    with pytest.raises(DataError):
        make_series([1.0, np.nan, 2.0])
    with pytest.raises(DataError):
        make_series([1.0, np.inf, 2.0])


@st.composite
def level_series(draw):
    n = draw(st.integers(min_value=3, max_value=60))
    increments = draw(
        st.lists(
            st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
            min_size=n - 1,
            max_size=n - 1,
        )
    )
    start = draw(st.floats(min_value=-1000.0, max_value=1000.0, allow_nan=False))
    return make_series(np.concatenate([[start], start + np.cumsum(increments)]))


@given(level_series())
@settings(max_examples=120, deadline=None)
def test_invariants_hold(series):
    pair = decompose(series)
    half = series.values[0] / 2.0
    assert pair.positive.values[0] == half
    assert pair.negative.values[0] == half
    assert np.all(np.diff(pair.positive.values) >= 0.0)
    assert np.all(np.diff(pair.negative.values) <= 0.0)
    scale = np.maximum(np.abs(series.values), 1.0)
    err = np.abs(recompose(pair).values - series.values) / scale
    assert err.max() < 1e-10


@given(level_series(), st.floats(min_value=-50.0, max_value=50.0))
@settings(max_examples=60, deadline=None)
def test_shift_moves_both_components_by_half(series, shift):
    base = decompose(series)
    shifted = decompose(series.with_values(series.values + shift))
    assert_allclose(shifted.positive.values, base.positive.values + shift / 2.0, atol=1e-8)
    assert_allclose(shifted.negative.values, base.negative.values + shift / 2.0, atol=1e-8)


@given(level_series(), st.floats(min_value=0.01, max_value=50.0))
@settings(max_examples=60, deadline=None)
def test_positive_scaling_commutes(series, k):
    base = decompose(series)
    scaled = decompose(series.with_values(series.values * k))
    assert_allclose(scaled.positive.values, base.positive.values * k, rtol=1e-9, atol=1e-9)
    assert_allclose(scaled.negative.values, base.negative.values * k, rtol=1e-9, atol=1e-9)
