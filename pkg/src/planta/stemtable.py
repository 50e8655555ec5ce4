"""Ingestion of the 40-day stem diameter dataset.

Six diameter columns per day: three treatments (unstressed, water
deficit, salinity) times two sensor histories (pristine and pre-stretched
through 100 stretch cycles).  All diameters are millimetres.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datafiles import STEM_TABLE, data_path
from .errors import InvariantViolationError, ParseError
from .series import TimeSeries
from .units import MILLIMETRE, SECONDS_PER_DAY

HEADER = ["day", "unstressed_pristine", "unstressed_stretched",
          "water_pristine", "water_stretched",
          "salinity_pristine", "salinity_stretched"]

CONDITIONS = ("unstressed", "water", "salinity")

DIAMETER_BOUNDS = (3.0, 15.0)  # mm, sanity window


@dataclass(frozen=True)
class StemTable:
    """Parsed table; each column is a numpy array aligned with `days`."""

    days: np.ndarray
    columns: dict[str, np.ndarray]

    def series(self, condition: str, variant: str = "pristine") -> TimeSeries:
        """Column as a TimeSeries with day stamps converted to seconds."""
        key = f"{condition}_{variant}"
        if key not in self.columns:
            raise KeyError(f"no column {key!r}")
        return TimeSeries(self.days * SECONDS_PER_DAY, self.columns[key],
                          channel=key, unit=MILLIMETRE)


@dataclass(frozen=True)
class OffsetStats:
    """Pristine-minus-stretched column statistics for one treatment, mm."""

    mean: float
    max_abs_dev_from_mean: float


def parse_stem_table(path: str | Path | None = None) -> StemTable:
    """Parse and validate a stem diameter CSV (bundled dataset by default)."""
    path = Path(path) if path is not None else data_path(STEM_TABLE)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != HEADER:
            raise ParseError(f"{path}: expected header {','.join(HEADER)!r}")
        days: list[float] = []
        cols: list[list[float]] = [[] for _ in HEADER[1:]]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(HEADER):
                raise ParseError(f"{path}:{lineno}: expected {len(HEADER)} columns")
            try:
                days.append(float(row[0]))
                for j, cell in enumerate(row[1:]):
                    cols[j].append(float(cell))
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from None
    if not days:
        raise ParseError(f"{path}: no data rows")
    day_arr = np.array(days)
    if not np.all(np.diff(day_arr) > 0):
        raise InvariantViolationError(f"{path}: days must be strictly increasing")
    lo, hi = DIAMETER_BOUNDS
    columns = {}
    for name, col in zip(HEADER[1:], cols):
        arr = np.array(col)
        if np.any(arr <= lo) or np.any(arr >= hi):
            raise InvariantViolationError(
                f"{path}: column {name!r} outside ({lo}, {hi}) mm")
        columns[name] = arr
    return StemTable(day_arr, columns)


def stretched_offset_check(table: StemTable) -> dict[str, OffsetStats]:
    """Per-treatment pristine-minus-stretched offsets.

    Pre-stretched sensors track pristine ones up to a constant offset; the
    max deviation from the mean quantifies how constant that offset is.
    """
    out: dict[str, OffsetStats] = {}
    for cond in CONDITIONS:
        diff = table.columns[f"{cond}_pristine"] - table.columns[f"{cond}_stretched"]
        mean = float(diff.mean())
        out[cond] = OffsetStats(mean, float(np.abs(diff - mean).max()))
    return out


def condition_slopes(table: StemTable, variant: str = "pristine") -> dict[str, float]:
    """Full-span OLS growth slope per treatment, mm/day."""
    out: dict[str, float] = {}
    d = table.days - table.days.mean()
    denom = float(np.dot(d, d))
    for cond in CONDITIONS:
        v = table.columns[f"{cond}_{variant}"]
        out[cond] = float(np.dot(d, v - v.mean())) / denom
    return out
