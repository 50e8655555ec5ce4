"""Deterministic simulator of the intermittent readout power chain.

Harvested power flows through a fixed-efficiency boost stage into a
supercapacitor bank; when the bank reaches the wake voltage an analog
switch connects it to the controller, which spends one reading latency
drawing the active current before the switch opens again.  A reading that
drags the bank below the brownout floor is aborted.

Within each fixed step the dynamics are piecewise linear (charging is
linear in stored energy, constant-current discharge is linear in voltage),
so mode transitions are located exactly and the energy ledger closes to
float precision: eta * energy_harvested == delta E_cap + energy_delivered.
Results for a constant harvest profile are therefore independent of the
step size.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InfeasibleError, NonPositiveError, ParseError
from .series import TimeSeries


class Mode(enum.Enum):
    CHARGING = "CHARGING"
    ACTIVE = "ACTIVE"


@dataclass(frozen=True)
class PowerChainConfig:
    """Power chain parameters.

    The brownout floor and the active current are not measured quantities
    of the reference hardware: 1.8 V is a typical low-power controller
    floor and 1 mA a representative active draw.  Both are prominent knobs;
    the bundled defaults are chosen so that one reading fits the usable
    capacitor energy.
    """

    capacitance: float = 880e-6          # F, 660 uF + 220 uF in parallel
    wake_voltage: float = 3.3            # V, switch closes here
    brownout_voltage: float = 1.8        # V, reading aborts below this
    converter_efficiency: float = 0.8
    sleep_current: float = 5e-6          # A, drawn only while lingering on the switch
    active_current: float = 1e-3         # A, drawn during a reading
    reading_latency: float = 0.935       # s per reading
    timestep: float = 1.0                # s
    linger_time: float = 0.0             # s of sleep draw after a reading completes
    initial_voltage: float = 0.0         # V on the bank at t=0 (priming)

    def __post_init__(self) -> None:
        if self.capacitance <= 0:
            raise NonPositiveError("capacitance must be > 0")
        if not 0.0 < self.brownout_voltage < self.wake_voltage:
            raise NonPositiveError("need 0 < brownout_voltage < wake_voltage")
        if self.timestep <= 0:
            raise NonPositiveError("timestep must be > 0")
        if not 0.0 < self.converter_efficiency <= 1.0:
            raise NonPositiveError("converter_efficiency must be in (0, 1]")
        if self.reading_latency <= 0:
            raise NonPositiveError("reading_latency must be > 0")
        if self.active_current < 0 or self.sleep_current < 0:
            raise NonPositiveError("currents must be >= 0")
        if not 0.0 <= self.initial_voltage <= self.wake_voltage:
            raise NonPositiveError("initial_voltage must be within [0, wake_voltage]")


@dataclass(frozen=True)
class PowerChainState:
    """Simulator state between steps.

    `active_elapsed`, `linger_left`, `reading_start` and `reading_energy`
    carry an in-flight reading across step boundaries.  Energies are a
    ledger: `energy_harvested` is source-side energy actually drawn by the
    converter, `energy_delivered` is energy taken off the bank.
    """

    time: float = 0.0
    cap_voltage: float = 0.0
    mode: Mode = Mode.CHARGING
    readings_taken: int = 0
    energy_harvested: float = 0.0
    energy_delivered: float = 0.0
    active_elapsed: float = 0.0
    linger_left: float = 0.0
    reading_start: float = 0.0
    reading_energy: float = 0.0


@dataclass
class ReadingEvent:
    """One controller wake-up; `measurements` is filled when composed with
    the sensor models."""

    start_time: float
    completed: bool
    energy_used: float
    measurements: dict = field(default_factory=dict)


def initial_state(cfg: PowerChainConfig) -> PowerChainState:
    return PowerChainState(cap_voltage=cfg.initial_voltage)


def cap_energy(cfg: PowerChainConfig, voltage: float) -> float:
    return 0.5 * cfg.capacitance * voltage * voltage


def _advance(cfg: PowerChainConfig, st: list, power: float, dt: float,
             events: list[ReadingEvent]) -> None:
    """Advance the mutable state list by exactly dt seconds of wall time.

    st layout: [time, v, mode, readings, harvested, delivered,
                active_elapsed, linger_left, reading_start, reading_energy]
    """
    c = cfg.capacitance
    e_max = 0.5 * c * cfg.wake_voltage * cfg.wake_voltage
    eta = cfg.converter_efficiency
    remaining = dt
    while remaining > 0.0:
        if st[2] is Mode.CHARGING:
            e = 0.5 * c * st[1] * st[1]
            if e >= e_max:
                st[2] = Mode.ACTIVE
                st[6] = 0.0
                st[7] = cfg.linger_time
                st[8] = st[0]
                st[9] = 0.0
                continue
            p_in = eta * power
            if p_in <= 0.0:
                st[0] += remaining
                remaining = 0.0
                continue
            t_fill = (e_max - e) / p_in
            if t_fill <= remaining:
                st[4] += power * t_fill
                st[1] = cfg.wake_voltage
                st[0] += t_fill
                remaining -= t_fill
                st[2] = Mode.ACTIVE
                st[6] = 0.0
                st[7] = cfg.linger_time
                st[8] = st[0]
                st[9] = 0.0
            else:
                st[4] += power * remaining
                st[1] = math.sqrt(2.0 * (e + p_in * remaining) / c)
                st[0] += remaining
                remaining = 0.0
        else:  # ACTIVE: reading phase first, then optional linger
            reading_phase = st[6] < cfg.reading_latency
            current = cfg.active_current if reading_phase else cfg.sleep_current
            v = st[1]
            if current > 0.0:
                t_bo = max(0.0, (v - cfg.brownout_voltage) * c / current)
            else:
                t_bo = math.inf
            t_phase = (cfg.reading_latency - st[6]) if reading_phase else st[7]

            def drain(seg: float) -> float:
                used = current * (v * seg - current * seg * seg / (2.0 * c))
                st[1] = v - current * seg / c
                st[0] += seg
                st[5] += used
                return used

            if t_phase <= remaining and t_phase <= t_bo:
                used = drain(t_phase)
                remaining -= t_phase
                if reading_phase:
                    st[6] = cfg.reading_latency
                    st[9] += used
                    st[3] += 1
                    events.append(ReadingEvent(st[8], True, st[9]))
                    if st[7] <= 0.0:
                        st[2] = Mode.CHARGING
                else:
                    st[7] = 0.0
                    st[2] = Mode.CHARGING
            elif t_bo < remaining:
                used = drain(t_bo)
                st[1] = cfg.brownout_voltage
                remaining -= t_bo
                if reading_phase:
                    st[9] += used
                    events.append(ReadingEvent(st[8], False, st[9]))
                st[2] = Mode.CHARGING
            else:
                used = drain(remaining)
                if reading_phase:
                    st[6] += remaining
                    st[9] += used
                else:
                    st[7] -= remaining
                remaining = 0.0


def _unpack(state: PowerChainState) -> list:
    return [state.time, state.cap_voltage, state.mode, state.readings_taken,
            state.energy_harvested, state.energy_delivered, state.active_elapsed,
            state.linger_left, state.reading_start, state.reading_energy]


def _pack(st: list) -> PowerChainState:
    return PowerChainState(time=st[0], cap_voltage=st[1], mode=st[2],
                           readings_taken=st[3], energy_harvested=st[4],
                           energy_delivered=st[5], active_elapsed=st[6],
                           linger_left=st[7], reading_start=st[8],
                           reading_energy=st[9])


def step(cfg: PowerChainConfig, state: PowerChainState,
         harvest_power: float) -> tuple[PowerChainState, list[ReadingEvent]]:
    """Advance one fixed timestep at the given harvest power; returns the
    new state and any reading events that closed during the step."""
    if harvest_power < 0:
        raise NonPositiveError("harvest power must be >= 0")
    st = _unpack(state)
    events: list[ReadingEvent] = []
    _advance(cfg, st, harvest_power, cfg.timestep, events)
    return _pack(st), events


def simulate(cfg: PowerChainConfig, harvest_profile: TimeSeries | float,
             duration: float) -> tuple[list[ReadingEvent], PowerChainState]:
    """Replay `step` over the duration against a harvest profile.

    A TimeSeries profile is sampled hold-last at each step start; a bare
    float is a constant profile.  The final partial step is truncated so
    the run covers exactly `duration` seconds.
    """
    if duration < 0:
        raise NonPositiveError("duration must be >= 0")
    st = _unpack(initial_state(cfg))
    events: list[ReadingEvent] = []
    constant = None if isinstance(harvest_profile, TimeSeries) else float(harvest_profile)
    if constant is not None and constant < 0:
        raise NonPositiveError("harvest power must be >= 0")
    dt = cfg.timestep
    t = 0.0
    while t < duration:
        seg = min(dt, duration - t)
        if constant is not None:
            p = constant
        else:
            p = max(0.0, harvest_profile.value_at_hold(st[0]))
        _advance(cfg, st, p, seg, events)
        t += seg
    return events, _pack(st)


def ledger_residual(cfg: PowerChainConfig, state: PowerChainState) -> float:
    """Energy conservation defect for a run started from initial_state(cfg).

    Zero (to float precision) when the books balance:
    eta * harvested == (E_cap now - E_cap initial) + delivered.
    """
    de = cap_energy(cfg, state.cap_voltage) - cap_energy(cfg, cfg.initial_voltage)
    return cfg.converter_efficiency * state.energy_harvested - de - state.energy_delivered


def min_power_for_readings(cfg: PowerChainConfig, n: int, horizon: float,
                           tolerance: float = 1e-12) -> float:
    """Smallest constant harvest power yielding >= n completed readings.

    Bisected to `tolerance` watts.  The search simulates with a single
    macro step: the in-step segmentation is exact, so for constant power
    the step size does not change the outcome.
    """
    if n < 0:
        raise NonPositiveError("n must be >= 0")
    if n == 0:
        return 0.0
    if horizon <= 0 or n * cfg.reading_latency > horizon:
        raise InfeasibleError(
            f"{n} readings need {n * cfg.reading_latency:.3f} s of latency alone, "
            f"horizon is {horizon:.3f} s")
    fast = replace(cfg, timestep=horizon)

    def count(p: float) -> int:
        return simulate(fast, p, horizon)[1].readings_taken

    hi = 1e-9
    while count(hi) < n:
        hi *= 10.0
        if hi > 1e12:
            raise InfeasibleError(f"no power up to 1e12 W yields {n} readings")
    lo = 0.0
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if count(mid) >= n:
            hi = mid
        else:
            lo = mid
    return hi


def read_profile_csv(path: str | Path) -> TimeSeries:
    """Harvest profile CSV: header ``t_seconds,power_watts``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["t_seconds", "power_watts"]:
            raise ParseError(f"{path}: expected header 't_seconds,power_watts'")
        t: list[float] = []
        p: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t.append(float(row[0]))
                p.append(float(row[1]))
            except (ValueError, IndexError) as e:
                raise ParseError(f"{path}:{lineno}: {e}") from None
    try:
        return TimeSeries(np.array(t), np.array(p), "harvest_power", "W")
    except ValueError as e:
        raise ParseError(f"{path}: {e}") from None


def write_events_csv(events: list[ReadingEvent], path: str | Path) -> None:
    """Event log CSV: header ``start_time,completed,energy_used_joules``."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start_time", "completed", "energy_used_joules"])
        for ev in events:
            writer.writerow([repr(float(ev.start_time)),
                             "true" if ev.completed else "false",
                             repr(float(ev.energy_used))])
