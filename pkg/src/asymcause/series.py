"""Time-series container and quarterly period arithmetic.

A series is stored against integer period ordinals.  Quarterly stamps use
``year * 4 + (quarter - 1)`` so that consecutive quarters differ by one;
a plain integer index works the same way for synthetic data.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DateParseError, LengthError

QUARTERLY = "Q"
INDEX = "index"

_QUARTER_RE = re.compile(r"^(\d{4})[Qq]([1-4])$")
_ISO_RE = re.compile(r"^(\d{4})-(\d{2})(?:-(\d{2}))?$")


def parse_period(text: str) -> int:
    """Parse ``1960Q1`` or an ISO date like ``1960-01-01`` to a quarterly ordinal."""
    text = text.strip()
    m = _QUARTER_RE.match(text)
    if m:
        return int(m.group(1)) * 4 + int(m.group(2)) - 1
    m = _ISO_RE.match(text)
    if m:
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise DateParseError(f"month out of range in date {text!r}")
        return year * 4 + (month - 1) // 3
    raise DateParseError(f"cannot parse period {text!r} (expected YYYYQn or YYYY-MM-DD)")


def format_period(ordinal: int) -> str:
    """Render a quarterly ordinal as ``1960Q1``."""
    year, quarter = divmod(int(ordinal), 4)
    return f"{year}Q{quarter + 1}"


@dataclass(frozen=True)
class TimeSeries:
    """A dated, equally-spaced sequence of real observations.

    Attributes
    ----------
    id : str
        Short label, e.g. ``"Y"`` or ``"S+"``.
    dates : ndarray of int64
        Strictly increasing, equally spaced period stamps.
    values : ndarray of float64
        Observations, same length as ``dates``; no NaN/inf allowed.
    freq : str
        ``"Q"`` for quarterly ordinals, ``"index"`` for a generic index.
    """

    id: str
    dates: np.ndarray
    values: np.ndarray
    freq: str = QUARTERLY

    def __post_init__(self) -> None:
        dates = np.asarray(self.dates, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if dates.ndim != 1 or values.ndim != 1:
            raise DataError(f"series {self.id!r}: dates and values must be 1-d")
        if dates.shape[0] != values.shape[0]:
            raise DataError(
                f"series {self.id!r}: {dates.shape[0]} dates vs {values.shape[0]} values"
            )
        if dates.shape[0] < 3:
            raise LengthError(
                f"series {self.id!r}: need at least 3 observations, got {dates.shape[0]}"
            )
        steps = np.diff(dates)
        if not (steps > 0).all():
            raise DataError(f"series {self.id!r}: dates must be strictly increasing")
        if not (steps == steps[0]).all():
            raise DataError(f"series {self.id!r}: dates must be equally spaced")
        if not np.isfinite(values).all():
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"series {self.id!r}: non-finite value at position {bad}")
        if self.freq not in (QUARTERLY, INDEX):
            raise DataError(f"series {self.id!r}: unknown frequency {self.freq!r}")
        dates.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def start(self) -> int:
        return int(self.dates[0])

    @property
    def end(self) -> int:
        return int(self.dates[-1])

    def label_for(self, ordinal: int) -> str:
        """Human-readable stamp for one period of this series."""
        return format_period(ordinal) if self.freq == QUARTERLY else str(int(ordinal))

    def window(self, start: int, end: int) -> "TimeSeries":
        """Clip to ordinals ``start..end`` inclusive."""
        mask = (self.dates >= start) & (self.dates <= end)
        return TimeSeries(self.id, self.dates[mask], self.values[mask], self.freq)

    def difference(self, suffix: str = "_d1") -> "TimeSeries":
        """First difference, one observation shorter."""
        return TimeSeries(
            self.id + suffix, self.dates[1:], np.diff(self.values), self.freq
        )

    def with_values(self, values: np.ndarray, new_id: str | None = None) -> "TimeSeries":
        """Same dates and frequency, different values (and optionally id)."""
        return TimeSeries(new_id or self.id, self.dates, values, self.freq)
