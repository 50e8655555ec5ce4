"""Time series carrier and the shared trend/statistics helpers."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientDataError, ParseError, ZeroMeanError
from .units import SECONDS_PER_DAY


@dataclass(frozen=True)
class TimeSeries:
    """Immutable (timestamp, value) channel.

    Timestamps are seconds (since epoch or scenario start), strictly
    increasing; values must be finite; the unit tag applies to every value.
    """

    times: np.ndarray
    values: np.ndarray
    channel: str = ""
    unit: str = ""

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValueError(f"timestamps must be strictly increasing (channel {self.channel!r})")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite sample in channel {self.channel!r}")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def sample_at(self, t: float) -> float:
        """Linear interpolation; endpoints hold outside the covered span."""
        return float(np.interp(t, self.times, self.values))

    def value_at_hold(self, t: float) -> float:
        """Step ('hold-last') interpolation; the first value holds before t0."""
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.values[max(i, 0)])

    def tail(self, window_seconds: float) -> "TimeSeries":
        """Samples with t >= t_end - window (window boundary inclusive)."""
        if len(self) == 0:
            return self
        mask = self.times >= self.times[-1] - window_seconds
        return TimeSeries(self.times[mask], self.values[mask], self.channel, self.unit)

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[float, float]], channel: str = "",
                   unit: str = "") -> "TimeSeries":
        pts = list(pairs)
        t = [p[0] for p in pts]
        v = [p[1] for p in pts]
        return TimeSeries(np.array(t, dtype=float), np.array(v, dtype=float), channel, unit)


def linear_trend(series: TimeSeries, window_seconds: float) -> float:
    """Ordinary least-squares slope over the trailing window, per day.

    Centering makes the estimate invariant to constant shifts in both time
    and value.
    """
    tail = series.tail(window_seconds)
    if len(tail) < 2:
        raise InsufficientDataError(
            f"need >=2 samples in trailing {window_seconds} s window, have {len(tail)}")
    t = tail.times - tail.times.mean()
    v = tail.values - tail.values.mean()
    denom = float(np.dot(t, t))
    if denom == 0.0:
        raise InsufficientDataError("window has no time spread")
    slope_per_second = float(np.dot(t, v)) / denom
    return slope_per_second * SECONDS_PER_DAY


def coefficient_of_variation(values: Sequence[float]) -> float:
    """Sample standard deviation divided by |mean|."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size < 2:
        raise InsufficientDataError(f"CV needs >=2 values, have {arr.size}")
    mean = float(arr.mean())
    if mean == 0.0:
        raise ZeroMeanError("CV undefined for zero-mean data")
    return float(arr.std(ddof=1)) / abs(mean)


def read_series_csv(path: str | Path, channel: str = "", unit: str = "") -> TimeSeries:
    """Read a two-column series CSV: a time header starting with 't' plus one
    value column (the column name doubles as the channel name)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if len(header) != 2 or not header[0].strip().lower().startswith("t"):
            raise ParseError(f"{path}: expected header 't_seconds,<channel>'")
        name = channel or header[1].strip()
        t: list[float] = []
        v: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns")
            try:
                t.append(float(row[0]))
                v.append(float(row[1]))
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from None
    try:
        return TimeSeries(np.array(t), np.array(v), name, unit)
    except ValueError as e:
        raise ParseError(f"{path}: {e}") from None


def write_series_csv(series: TimeSeries, path: str | Path,
                     time_header: str = "t_seconds") -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([time_header, series.channel or "value"])
        for t, v in zip(series.times, series.values):
            writer.writerow([repr(float(t)), repr(float(v))])
