"""Series ingestion: local CSV files, the FRED CSV export, and caching.

Remote fetches go through an on-disk cache holding the raw response bytes
next to a small metadata file (code, URL, retrieval timestamp, content
hash); repeated calls are served from the cache unless a refresh is forced,
and a fetch that fails with a warm cache degrades to the cached bytes.  The
cache directory doubles as the archived snapshot shipped for replication.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .errors import (
    AlignmentError,
    DataError,
    DateParseError,
    DuplicateDateError,
    FetchError,
    MissingColumnError,
    MissingValueError,
    PeriodGapError,
    SchemaError,
)
from .series import QUARTERLY, TimeSeries, format_period, parse_period

DEFAULT_BASE_URL = "https://fred.stlouisfed.org"
FRED_MISSING_MARKER = "."
FRED_DATE_HEADERS = ("DATE", "observation_date")

LOCAL_CSV = "local_csv"
FRED_REMOTE = "fred_remote"


@dataclass(frozen=True)
class SeriesSource:
    """Where one series comes from and how its columns are named."""

    kind: str
    identifier: str
    date_column: str = "DATE"
    value_column: str | None = None
    frequency: str = QUARTERLY

    def __post_init__(self) -> None:
        if self.kind not in (LOCAL_CSV, FRED_REMOTE):
            raise DataError(f"unknown source kind {self.kind!r}")
        if not self.identifier:
            raise DataError("source identifier must be non-empty")

    @property
    def value_field(self) -> str:
        return self.value_column or Path(self.identifier).stem


@dataclass(frozen=True)
class StudyWindow:
    """Inclusive period range, stored as quarterly ordinals."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise DataError(
                f"window start {format_period(self.start)} must precede "
                f"end {format_period(self.end)}"
            )

    @classmethod
    def parse(cls, start: str, end: str) -> "StudyWindow":
        return cls(parse_period(start), parse_period(end))

    @property
    def n_periods(self) -> int:
        return self.end - self.start + 1

    def label(self) -> str:
        return f"{format_period(self.start)}-{format_period(self.end)}"


def _parse_rows(
    rows: list[dict[str, str]],
    date_column: str,
    value_column: str,
    series_id: str,
) -> TimeSeries:
    if not rows:
        raise DataError(f"{series_id}: no data rows")
    header = rows[0].keys()
    for needed in (date_column, value_column):
        if needed not in header:
            raise MissingColumnError(
                f"{series_id}: column {needed!r} not found (have {sorted(header)})"
            )
    stamped: list[tuple[int, float]] = []
    for line_no, row in enumerate(rows, start=2):
        raw_date = (row[date_column] or "").strip()
        raw_value = (row[value_column] or "").strip()
        try:
            ordinal = parse_period(raw_date)
        except DateParseError as exc:
            raise DateParseError(f"{series_id}: row {line_no}: {exc}") from None
        if raw_value in ("", FRED_MISSING_MARKER):
            raise MissingValueError(
                f"{series_id}: missing value at row {line_no} ({raw_date})"
            )
        try:
            value = float(raw_value)
        except ValueError:
            raise MissingValueError(
                f"{series_id}: non-numeric value {raw_value!r} at row {line_no}"
            ) from None
        stamped.append((ordinal, value))

    stamped.sort(key=lambda pair: pair[0])
    ordinals = np.array([p[0] for p in stamped], dtype=np.int64)
    values = np.array([p[1] for p in stamped], dtype=np.float64)
    steps = np.diff(ordinals)
    dupes = np.flatnonzero(steps == 0)
    if dupes.size:
        raise DuplicateDateError(
            f"{series_id}: duplicate period {format_period(int(ordinals[dupes[0]]))}"
        )
    gaps = np.flatnonzero(steps > 1)
    if gaps.size:
        missing = int(ordinals[gaps[0]]) + 1
        raise PeriodGapError(f"{series_id}: missing period {format_period(missing)}")
    return TimeSeries(series_id, ordinals, values, QUARTERLY)


def load_csv(source: SeriesSource, path: str | Path | None = None) -> TimeSeries:
    """Read one series from a local CSV file.

    Rows are date-sorted, equal spacing is enforced and FRED's "." missing
    marker is rejected with the offending row named.
    """
    target = Path(path) if path is not None else Path(source.identifier)
    if not target.exists():
        raise DataError(f"file not found: {target}")
    with target.open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    series_id = source.value_field
    return _parse_rows(rows, source.date_column, series_id, series_id)


def _parse_fred_bytes(raw: bytes, code: str) -> TimeSeries:
    text = raw.decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(text))
    fields = reader.fieldnames or []
    date_column = next((f for f in fields if f in FRED_DATE_HEADERS), None)
    if date_column is None or code not in fields:
        raise SchemaError(
            f"{code}: unexpected CSV header {fields!r} "
            f"(expected a date column and a {code!r} column)"
        )
    return _parse_rows(list(reader), date_column, code, code)


def _sha256(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def write_cache_entry(
    cache_dir: str | Path,
    code: str,
    raw: bytes,
    url: str,
    retrieved_at: str,
) -> None:
    """Persist raw bytes plus metadata for one series (write-temp-then-rename)."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(cache_dir / f"{code}.csv", raw)
    meta = {
        "code": code,
        "url": url,
        "retrieved_at": retrieved_at,
        "sha256": _sha256(raw),
    }
    _atomic_write(
        cache_dir / f"{code}.meta.json",
        json.dumps(meta, indent=2, sort_keys=True).encode() + b"\n",
    )


def read_cache_meta(cache_dir: str | Path, code: str) -> dict | None:
    meta_path = Path(cache_dir) / f"{code}.meta.json"
    if not meta_path.exists():
        return None
    return json.loads(meta_path.read_text())


def fetch_fred(
    code: str,
    window: StudyWindow | None = None,
    cache_dir: str | Path = ".fred-cache",
    base_url: str = DEFAULT_BASE_URL,
    refresh: bool = False,
    timeout: float = 30.0,
) -> TimeSeries:
    """Fetch one series from the FRED CSV export, caching the raw bytes.

    With a warm cache and ``refresh=False`` no network access happens at
    all.  A failed refresh falls back to the cache when one exists.
    """
    cache_dir = Path(cache_dir)
    raw_path = cache_dir / f"{code}.csv"
    raw: bytes | None = None
    if raw_path.exists() and not refresh:
        raw = raw_path.read_bytes()
    else:
        url = f"{base_url}/graph/fredgraph.csv?id={code}"
        try:
            response = requests.get(url, timeout=timeout)
        except requests.RequestException as exc:
            if raw_path.exists():
                raw = raw_path.read_bytes()
            else:
                raise FetchError(f"{code}: download failed ({exc}) and no cache") from exc
        else:
            if response.status_code != 200:
                raise FetchError(
                    f"{code}: endpoint returned status {response.status_code}"
                )
            raw = response.content
            from datetime import datetime, timezone

            stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            write_cache_entry(cache_dir, code, raw, url, stamp)
    series = _parse_fred_bytes(raw, code)
    if window is not None:
        series = series.window(window.start, window.end)
    return series


def load_source(
    source: SeriesSource,
    window: StudyWindow | None = None,
    cache_dir: str | Path = ".fred-cache",
    base_url: str = DEFAULT_BASE_URL,
    refresh: bool = False,
) -> TimeSeries:
    """Materialize a series from whichever backend the source names."""
    if source.kind == LOCAL_CSV:
        series = load_csv(source)
        if window is not None:
            series = series.window(window.start, window.end)
        return series
    return fetch_fred(
        source.identifier,
        window=window,
        cache_dir=cache_dir,
        base_url=base_url,
        refresh=refresh,
    )


def align(series_list: list[TimeSeries], window: StudyWindow) -> np.ndarray:
    """Stack series into a variables-by-time matrix over the window.

    Every series must cover every period of the window; the first hole found
    is reported with the series and period named.  Row order follows the
    input order.
    """
    out = np.empty((len(series_list), window.n_periods))
    for i, series in enumerate(series_list):
        wanted = np.arange(window.start, window.end + 1, dtype=np.int64)
        positions = np.searchsorted(series.dates, wanted)
        ok = (positions < len(series)) & (series.dates[np.minimum(positions, len(series) - 1)] == wanted)
        if not ok.all():
            missing = int(wanted[np.flatnonzero(~ok)[0]])
            raise AlignmentError(
                f"series {series.id!r} is missing period {series.label_for(missing)}"
            )
        out[i] = series.values[positions]
    return out
