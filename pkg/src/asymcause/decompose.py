"""Cumulative positive/negative component decomposition.

A level series is split around its first observation: with ``Y0`` the first
value and increments ``e_i = Y_i - Y_{i-1}``, the components are

    Y+_t = Y0/2 + sum_{i<=t} max(e_i, 0)
    Y-_t = Y0/2 + sum_{i<=t} min(e_i, 0)

so ``Y+_t + Y-_t == Y_t`` at every index.  Index 0 carries ``Y0/2`` in each
component.  Note the even split of the initial value between the components;
tools that assign ``Y0`` wholly to one side will not reproduce these series.
Series are decomposed in levels as given; any log transform is the caller's
job at ingestion time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, StructuralError
from .series import TimeSeries

POSITIVE_SUFFIX = "+"
NEGATIVE_SUFFIX = "-"


@dataclass(frozen=True)
class ComponentPair:
    """Positive and negative cumulative components of one source series."""

    positive: TimeSeries
    negative: TimeSeries
    origin_id: str
    initial_value: float

    def __post_init__(self) -> None:
        if len(self.positive) != len(self.negative):
            raise StructuralError(
                f"component lengths differ: {len(self.positive)} vs {len(self.negative)}"
            )
        if not np.array_equal(self.positive.dates, self.negative.dates):
            raise StructuralError("component date axes differ")
        if np.any(np.diff(self.positive.values) < 0):
            raise DataError("positive component must be non-decreasing")
        if np.any(np.diff(self.negative.values) > 0):
            raise DataError("negative component must be non-increasing")
        half = self.initial_value / 2.0
        if self.positive.values[0] != half or self.negative.values[0] != half:
            raise DataError("components must both start at half the initial value")


def decompose(series: TimeSeries) -> ComponentPair:
    """Split a series into cumulative positive and negative components.

    The first observation is taken as the initial value; increments start at
    the second observation.  Output series keep the input's dates and length.
    """
    y = series.values
    y0 = float(y[0])
    increments = np.diff(y)
    pos = np.empty_like(y)
    neg = np.empty_like(y)
    pos[0] = neg[0] = y0 / 2.0
    np.cumsum(np.maximum(increments, 0.0), out=pos[1:])
    np.cumsum(np.minimum(increments, 0.0), out=neg[1:])
    pos[1:] += y0 / 2.0
    neg[1:] += y0 / 2.0
    return ComponentPair(
        positive=series.with_values(pos, series.id + POSITIVE_SUFFIX),
        negative=series.with_values(neg, series.id + NEGATIVE_SUFFIX),
        origin_id=series.id,
        initial_value=y0,
    )


def recompose(pair: ComponentPair) -> TimeSeries:
    """Recover the source series as the elementwise sum of the components."""
    total = pair.positive.values + pair.negative.values
    return TimeSeries(
        pair.origin_id, pair.positive.dates, total, pair.positive.freq
    )
