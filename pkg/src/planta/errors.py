"""Exception hierarchy for the planta toolkit.

Every error raised by planta derives from :class:`PlantaError`, so callers
can catch one base class at API boundaries (the CLI maps subclasses to
exit codes).
"""


class PlantaError(Exception):
    """Base class for all planta errors."""


class UnitError(PlantaError):
    """A quantity violates its unit domain (e.g. relative humidity outside [0, 100])."""


class NonMonotonicError(PlantaError):
    """Calibration points are not strictly monotone."""


class OutOfDomainError(PlantaError):
    """Forward table lookup outside the calibrated stimulus domain (policy=error)."""


class OutOfRangeError(PlantaError):
    """Inverse lookup outside the calibrated response range (policy=error)."""


class InsufficientDataError(PlantaError):
    """Not enough samples to compute the requested statistic."""


class ZeroMeanError(PlantaError):
    """Coefficient of variation is undefined for zero-mean data."""


class EmptyGridError(PlantaError):
    """A search grid was empty."""


class NonPositiveError(PlantaError):
    """A quantity that must be strictly positive was not."""


class SensorRangeError(PlantaError):
    """Stimulus outside the sensor's characterized operating range."""


class StrainRangeError(PlantaError):
    """Strain outside the gauge's characterized range."""


class InfeasibleError(PlantaError):
    """No parameter value can satisfy the request (e.g. latency exceeds the horizon)."""


class NoEqualizationError(PlantaError):
    """Two channels never settle within the requested tolerance."""


class ZeroCurrentError(PlantaError):
    """Impedance from a voltage/current ratio with zero current."""


class SanityRangeError(PlantaError):
    """Input outside the physically plausible window accepted by the model."""


class ParseError(PlantaError):
    """Malformed input file; message carries row/column context where known."""


class InvariantViolationError(PlantaError):
    """Parsed data violates a structural invariant (ordering, bounds)."""
