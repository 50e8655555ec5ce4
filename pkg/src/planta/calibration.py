"""Invertible piecewise-linear calibration tables.

A :class:`CalibrationTable` maps a physical stimulus to an electrical
response through straight segments between measured knots.  Interpolation
is deliberately linear, mirroring the lookup a microcontroller performs
against a stored curve, and keeping the inverse map exact.

Tables are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import enum
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    NonMonotonicError,
    OutOfDomainError,
    OutOfRangeError,
    ParseError,
)

CSV_HEADER = ["stimulus", "response", "unit_stimulus", "unit_response"]


class Extrapolation(enum.Enum):
    """Behaviour outside the calibrated domain.

    CLAMP holds the endpoint value (safe default for forward simulation
    sources), LINEAR extends the end segment, ERROR raises (safe default
    for inverse maps).
    """

    CLAMP = "clamp"
    LINEAR = "linear-extend"
    ERROR = "error"


def _interp(xs: tuple[float, ...], ys: tuple[float, ...], x: float,
            policy: Extrapolation, exc: type[Exception], what: str) -> float:
    # xs strictly increasing; exact at knots, linear between them
    if x < xs[0] or x > xs[-1]:
        if policy is Extrapolation.ERROR:
            raise exc(f"{what} {x!r} outside [{xs[0]!r}, {xs[-1]!r}]")
        if policy is Extrapolation.CLAMP:
            return ys[0] if x < xs[0] else ys[-1]
        i = 0 if x < xs[0] else len(xs) - 2
    else:
        i = min(bisect_right(xs, x) - 1, len(xs) - 2)
        i = max(i, 0)
    t = (x - xs[i]) / (xs[i + 1] - xs[i])
    return ys[i] + t * (ys[i + 1] - ys[i])


@dataclass(frozen=True)
class CalibrationTable:
    """Monotone piecewise-linear stimulus -> response map.

    Stimuli must be strictly increasing and responses strictly monotone
    (either direction), which makes the table invertible.  At least two
    knots are required.
    """

    stimulus: tuple[float, ...]
    response: tuple[float, ...]
    policy: Extrapolation = Extrapolation.ERROR
    stimulus_unit: str = ""
    response_unit: str = ""

    def __post_init__(self) -> None:
        s = tuple(float(x) for x in self.stimulus)
        r = tuple(float(y) for y in self.response)
        object.__setattr__(self, "stimulus", s)
        object.__setattr__(self, "response", r)
        if len(s) != len(r):
            raise NonMonotonicError("stimulus and response lengths differ")
        if len(s) < 2:
            raise NonMonotonicError("calibration table needs at least 2 points")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise NonMonotonicError("stimuli must be strictly increasing")
        inc = all(b > a for a, b in zip(r, r[1:]))
        dec = all(b < a for a, b in zip(r, r[1:]))
        if not (inc or dec):
            raise NonMonotonicError("responses must be strictly monotone")
        object.__setattr__(self, "_increasing", inc)

    @property
    def increasing(self) -> bool:
        """True when response grows with stimulus."""
        return self._increasing  # type: ignore[attr-defined]

    @property
    def domain(self) -> tuple[float, float]:
        return self.stimulus[0], self.stimulus[-1]

    @property
    def range(self) -> tuple[float, float]:
        lo, hi = self.response[0], self.response[-1]
        return (lo, hi) if lo < hi else (hi, lo)

    def eval(self, stimulus: float) -> float:
        """Interpolate the response at `stimulus` (exact at knots)."""
        return _interp(self.stimulus, self.response, float(stimulus),
                       self.policy, OutOfDomainError, "stimulus")

    def invert(self, response: float) -> float:
        """Stimulus that produces `response`; exact inverse of :meth:`eval`."""
        if self.increasing:
            xs, ys = self.response, self.stimulus
        else:
            xs, ys = self.response[::-1], self.stimulus[::-1]
        return _interp(xs, ys, float(response),
                       self.policy, OutOfRangeError, "response")

    def __call__(self, stimulus: float) -> float:
        return self.eval(stimulus)

    def with_policy(self, policy: Extrapolation) -> "CalibrationTable":
        return CalibrationTable(self.stimulus, self.response, policy,
                                self.stimulus_unit, self.response_unit)


def linear_table(x0: float, x1: float, y0: float, y1: float, knots: int = 2,
                 policy: Extrapolation = Extrapolation.ERROR,
                 stimulus_unit: str = "", response_unit: str = "") -> CalibrationTable:
    """Synthesize a straight-line table from two anchor points."""
    if knots < 2:
        raise NonMonotonicError("need at least 2 knots")
    xs = [x0 + (x1 - x0) * k / (knots - 1) for k in range(knots)]
    ys = [y0 + (y1 - y0) * k / (knots - 1) for k in range(knots)]
    return CalibrationTable(tuple(xs), tuple(ys), policy, stimulus_unit, response_unit)


def read_table_csv(path: str | Path,
                   policy: Extrapolation = Extrapolation.ERROR) -> CalibrationTable:
    """Load a calibration table from CSV.

    Expected header: ``stimulus,response,unit_stimulus,unit_response``;
    rows sorted ascending by stimulus; units uniform within the file.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"{path}: expected header {','.join(CSV_HEADER)!r}")
        xs: list[float] = []
        ys: list[float] = []
        units: tuple[str, str] | None = None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: {e}") from None
            u = (row[2].strip(), row[3].strip())
            if units is None:
                units = u
            elif u != units:
                raise ParseError(f"{path}:{lineno}: unit tags change mid-file")
    if units is None:
        raise ParseError(f"{path}: no data rows")
    try:
        return CalibrationTable(tuple(xs), tuple(ys), policy, units[0], units[1])
    except NonMonotonicError as e:
        raise ParseError(f"{path}: {e}") from None


def write_table_csv(table: CalibrationTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for x, y in zip(table.stimulus, table.response):
            writer.writerow([repr(x), repr(y), table.stimulus_unit, table.response_unit])
