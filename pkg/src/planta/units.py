"""Unit conventions and small conversion helpers.

Internal computation uses SI-ish base units throughout: degrees Celsius,
percent relative humidity in [0, 100], kPa, volts, amperes, ohms, farads,
watts, joules, metres, dimensionless strain fractions, and degrees for
angles.  Millimetres appear only at I/O boundaries and are tagged there.
"""

from .errors import UnitError

SECONDS_PER_DAY = 86400.0

# canonical unit tags used by TimeSeries and the CSV writers
CELSIUS = "degC"
PERCENT_RH = "pct_rh"
KPA = "kPa"
VOLT = "V"
AMPERE = "A"
OHM = "ohm"
WATT = "W"
JOULE = "J"
METRE = "m"
MILLIMETRE = "mm"
REL_RESISTANCE = "dR_over_R0"
STRAIN = "strain"
DEGREE = "deg"


def check_rh(rh: float) -> float:
    """Validate a relative humidity value; values outside [0, 100] are rejected,
    never clipped silently."""
    if not 0.0 <= rh <= 100.0:
        raise UnitError(f"relative humidity {rh!r} outside [0, 100] %RH")
    return float(rh)


def mm_to_m(mm: float) -> float:
    return mm * 1e-3


def m_to_mm(m: float) -> float:
    return m * 1e3


def w_per_m2_to_uw_per_cm2(d: float) -> float:
    """1 W/m2 = 100 uW/cm2."""
    return d * 100.0
