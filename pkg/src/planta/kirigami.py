"""Wrap-around strain sensor: gauge model, bending geometry, and the
inverse pipeline from relative resistance to stem diameter.

The gauge map is piecewise linear with two regimes (factor 1.5 at low
strain, 0.6 incremental beyond the knee) and is exactly invertible.  A
sensor of thickness t wrapped at bending radius r_b sees a surface strain
t / (2 r_b); with a fixed arc length S the wrap angle route
r = 360 S / (2 pi theta) describes the same circle, so diameter recovery
goes through the bending-strain route.

Also houses the field-data hygiene tools: rolling robust baseline
correction with short-pulse rejection, and a qualitative simulator for
off-axis disturbances (the cut-pattern sensor responds slower and weaker
than a plain film).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import median

import numpy as np

from .calibration import CalibrationTable, Extrapolation
from .errors import (
    InsufficientDataError,
    NonPositiveError,
    OutOfRangeError,
    StrainRangeError,
)
from .series import TimeSeries
from .units import REL_RESISTANCE, STRAIN


@dataclass(frozen=True)
class GaugeModel:
    """Two-regime gauge factor: (dR/R0)/strain.

    The knee position is not a measured quantity; 0.5 keeps the low-strain
    regime wide while the map stays continuous because the high-strain
    factor applies incrementally above the knee.
    """

    gf_low: float = 1.5
    gf_high: float = 0.6
    knee_strain: float = 0.5
    max_strain: float = 2.5
    r_baseline: float = 10_000.0   # ohm, unstrained

    def __post_init__(self) -> None:
        if not self.gf_low > self.gf_high > 0:
            raise NonPositiveError("need gf_low > gf_high > 0")
        if not 0 < self.knee_strain < self.max_strain:
            raise NonPositiveError("need 0 < knee_strain < max_strain")
        if self.r_baseline <= 0:
            raise NonPositiveError("r_baseline must be > 0")

    @property
    def max_rel_resistance(self) -> float:
        return strain_to_rel_resistance(self, self.max_strain)


@dataclass(frozen=True)
class StemGeometry:
    """Wrap geometry of the stem sensor.

    `sensor_thickness` is substrate plus functional layer (nominally
    205 um, fabrication spread under a micrometre).  Angle is in degrees;
    when both the angle and a radius are supplied they must describe the
    same circle.
    """

    arc_length: float = 0.021           # m
    sensor_thickness: float = 205e-6    # m
    curvature_angle: float | None = None
    curvature_radius: float | None = None
    bending_radius: float | None = None

    def __post_init__(self) -> None:
        if self.arc_length <= 0 or self.sensor_thickness <= 0:
            raise NonPositiveError("lengths must be > 0")
        if self.curvature_angle is not None and self.curvature_radius is not None:
            expect = curvature_radius(self.arc_length, self.curvature_angle)
            if not math.isclose(expect, self.curvature_radius, rel_tol=1e-9):
                raise NonPositiveError(
                    f"angle {self.curvature_angle} deg and radius "
                    f"{self.curvature_radius} m describe different circles")


class DisturbanceShape(enum.Enum):
    STEP = "step"
    PULSE = "pulse"


@dataclass(frozen=True)
class DisturbanceEvent:
    """External mechanical disturbance injected on the strain channel."""

    onset: float            # s
    duration: float         # s
    magnitude: float        # dR/R0 at full effect
    shape: DisturbanceShape = DisturbanceShape.PULSE

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise NonPositiveError("duration must be > 0")
        if not math.isfinite(self.magnitude):
            raise NonPositiveError("magnitude must be finite")


@dataclass(frozen=True)
class DetectedDisturbance:
    """Short excursion identified and removed by baseline correction."""

    onset: float
    duration: float
    peak_deviation: float


def strain_to_rel_resistance(g: GaugeModel, strain: float) -> float:
    """Piecewise-linear gauge response, continuous at the knee."""
    if not 0.0 <= strain <= g.max_strain:
        raise StrainRangeError(f"strain {strain!r} outside [0, {g.max_strain}]")
    if strain <= g.knee_strain:
        return g.gf_low * strain
    return g.gf_low * g.knee_strain + g.gf_high * (strain - g.knee_strain)


def rel_resistance_to_strain(g: GaugeModel, y: float) -> float:
    """Exact inverse of :func:`strain_to_rel_resistance`."""
    y_knee = g.gf_low * g.knee_strain
    y_max = g.max_rel_resistance
    if not 0.0 <= y <= y_max:
        raise OutOfRangeError(f"relative resistance {y!r} outside [0, {y_max:.6g}]")
    if y <= y_knee:
        return y / g.gf_low
    return g.knee_strain + (y - y_knee) / g.gf_high


def bending_strain(thickness: float, r_b: float) -> float:
    """Surface strain of a film of the given thickness bent at radius r_b."""
    if thickness <= 0:
        raise NonPositiveError("thickness must be > 0")
    if r_b <= 0:
        raise NonPositiveError("bending radius must be > 0")
    return thickness / (2.0 * r_b)


def curvature_radius(arc_length: float, angle_deg: float) -> float:
    """Radius of the circle a wrap of `arc_length` covers over `angle_deg`."""
    if arc_length <= 0 or angle_deg <= 0:
        raise NonPositiveError("arc length and angle must be > 0")
    return 360.0 * arc_length / (2.0 * math.pi * angle_deg)


def curvature_angle(arc_length: float, radius: float) -> float:
    """Inverse of :func:`curvature_radius`."""
    if arc_length <= 0 or radius <= 0:
        raise NonPositiveError("arc length and radius must be > 0")
    return 360.0 * arc_length / (2.0 * math.pi * radius)


def default_bending_table(g: GaugeModel | None = None,
                          min_strain: float = 0.01,
                          max_strain: float = 0.5) -> CalibrationTable:
    """Relative resistance vs bending strain, defaulting to the low-strain
    gauge line.

    Stands in for a measured bending sweep; replace with digitized data
    for a characterized sensor.  The lower bound keeps the inverse map away
    from the flat (infinite diameter) limit.
    """
    g = g or GaugeModel()
    if not 0 < min_strain < max_strain <= g.knee_strain:
        raise NonPositiveError("need 0 < min_strain < max_strain <= knee_strain")
    return CalibrationTable(
        (min_strain, max_strain),
        (g.gf_low * min_strain, g.gf_low * max_strain),
        policy=Extrapolation.ERROR,
        stimulus_unit=STRAIN,
        response_unit=REL_RESISTANCE,
    )


def reading_from_diameter(geo: StemGeometry, diameter: float,
                          bend_curve: CalibrationTable | None = None) -> float:
    """Forward model: stem diameter -> bending strain -> dR/R0."""
    if diameter <= 0:
        raise NonPositiveError("diameter must be > 0")
    curve = bend_curve or default_bending_table()
    return curve.eval(bending_strain(geo.sensor_thickness, diameter / 2.0))


def diameter_from_reading(g: GaugeModel, geo: StemGeometry, y: float,
                          bend_curve: CalibrationTable | None = None) -> float:
    """Stem diameter from a relative resistance reading.

    Inverts the bending calibration to a strain, then unwraps the bending
    relation: d = 2 r_b = thickness / strain.  Strictly decreasing in y.
    """
    curve = bend_curve or default_bending_table(g)
    strain = curve.invert(y)
    if strain <= 0:
        raise OutOfRangeError(f"reading {y!r} maps to non-positive strain")
    return geo.sensor_thickness / strain


def _robust_fit(ts: list[float], vs: list[float]) -> tuple[float, float, float]:
    """Median level at the median time plus an OLS slope; returns
    (t_mid, level, slope)."""
    n = len(ts)
    tbar = sum(ts) / n
    vbar = sum(vs) / n
    num = 0.0
    den = 0.0
    for t, v in zip(ts, vs):
        num += (t - tbar) * (v - vbar)
        den += (t - tbar) * (t - tbar)
    slope = num / den if den > 0 else 0.0
    return median(ts), median(vs), slope


def baseline_correct(series: TimeSeries, window: int = 60, k_mad: float = 5.0,
                     max_pulse_duration: float = 120.0,
                     min_threshold: float = 1e-9,
                     ) -> tuple[TimeSeries, list[DetectedDisturbance]]:
    """Remove short excursions from a strain series; keep persistent shifts.

    A rolling robust baseline (median level plus local slope over the last
    `window` accepted samples) predicts each incoming sample.  Residuals
    beyond k_mad times the window's median absolute residual open a
    quarantine: if the signal returns within `max_pulse_duration` the
    quarantined span is flagged as a disturbance and bridged by linear
    interpolation, otherwise the excursion is accepted retroactively as a
    real level change and the baseline re-anchors.  The first `window`
    samples are a warm-up and pass through unchecked.  Deterministic, and
    idempotent on its own output.
    """
    n = len(series)
    if n < window:
        raise InsufficientDataError(f"need >= {window} samples, have {n}")
    t = series.times
    x = series.values
    out = np.array(x, dtype=float)
    events: list[DetectedDisturbance] = []

    acc_t: list[float] = list(t[:window])
    acc_v: list[float] = list(x[:window])
    pending: list[int] = []
    last_good = window - 1

    def flush_pending_as_real() -> None:
        nonlocal last_good
        for j in pending:
            out[j] = x[j]
            acc_t.append(float(t[j]))
            acc_v.append(float(x[j]))
        last_good = pending[-1]
        pending.clear()

    for i in range(window, n):
        wt = acc_t[-window:]
        wv = acc_v[-window:]
        t_mid, level, slope = _robust_fit(wt, wv)
        predicted = level + slope * (t[i] - t_mid)
        resid = [abs(v - (level + slope * (tt - t_mid))) for tt, v in zip(wt, wv)]
        threshold = max(k_mad * median(resid), min_threshold)
        dev = x[i] - predicted

        if abs(dev) > threshold:
            pending.append(i)
            if t[i] - t[pending[0]] > max_pulse_duration:
                # persistent: a true shift, not a disturbance
                flush_pending_as_real()
        elif pending:
            # excursion ended within the pulse budget: bridge and record it
            onset = float(t[pending[0]])
            t0, y0 = float(t[last_good]), float(out[last_good])
            t1, y1 = float(t[i]), float(x[i])
            peak = 0.0
            for j in pending:
                fill = y0 + (y1 - y0) * (t[j] - t0) / (t1 - t0)
                peak = max(peak, abs(float(x[j]) - fill))
                out[j] = fill
                acc_t.append(float(t[j]))
                acc_v.append(float(fill))
            events.append(DetectedDisturbance(onset, float(t[i]) - onset, peak))
            pending.clear()
            acc_t.append(float(t[i]))
            acc_v.append(float(x[i]))
            last_good = i
        else:
            acc_t.append(float(t[i]))
            acc_v.append(float(x[i]))
            last_good = i

    if pending:
        # series ended mid-excursion
        if t[n - 1] - t[pending[0]] > max_pulse_duration:
            flush_pending_as_real()
        else:
            onset = float(t[pending[0]])
            t_mid, level, slope = _robust_fit(acc_t[-window:], acc_v[-window:])
            peak = 0.0
            for j in pending:
                fill = level + slope * (t[j] - t_mid)
                peak = max(peak, abs(float(x[j]) - fill))
                out[j] = fill
            events.append(DetectedDisturbance(onset, float(t[n - 1]) - onset, peak))

    corrected = TimeSeries(t, out, series.channel, series.unit or REL_RESISTANCE)
    return corrected, events


def simulate_disturbance(kirigami: bool, ev: DisturbanceEvent,
                         sample_interval: float = 0.001,
                         tail: float | None = None,
                         attenuation: float = 0.5,
                         rise_multiplier: float = 2.0,
                         response_time: float = 0.007,
                         ) -> TimeSeries:
    """Resistance trace of a plain or cut-pattern sensor hit by a disturbance.

    Both respond with a first-order lag toward the disturbance level; the
    cut-pattern geometry spreads the load, so its response is slower
    (rise_multiplier times the plain response time) and smaller
    (attenuation times the peak).  Orderings, not magnitudes, are the
    contract here.
    """
    tau = response_time * (rise_multiplier if kirigami else 1.0)
    gain = attenuation if kirigami else 1.0
    total = ev.onset + ev.duration + (tail if tail is not None else 10.0 * tau)
    times = np.arange(0.0, total, sample_interval)
    out = np.empty_like(times)
    y = 0.0
    decay = math.exp(-sample_interval / tau)
    for i, t in enumerate(times):
        if t < ev.onset:
            target = 0.0
        elif ev.shape is DisturbanceShape.STEP or t < ev.onset + ev.duration:
            target = gain * ev.magnitude
        else:
            target = 0.0
        y = target + (y - target) * decay
        out[i] = y
    return TimeSeries(times, out, "kirigami" if kirigami else "plain", REL_RESISTANCE)


def write_disturbances_csv(events: list[DetectedDisturbance], path: str | Path) -> None:
    """Event log CSV: header ``onset,duration,type``."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["onset", "duration", "type"])
        for ev in events:
            writer.writerow([repr(float(ev.onset)), repr(float(ev.duration)),
                             "DISTURBANCE"])
