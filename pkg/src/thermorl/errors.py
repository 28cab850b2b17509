"""Exception hierarchy shared across the package."""


class ThermorlError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ThermorlError):
    """A model, layout, or config value violates its contract."""


class StabilityError(ConfigurationError):
    """Requested integration step exceeds the explicit-Euler stability bound.

    Carries the offending zone and the largest admissible step so callers
    can repair their configuration.
    """

    def __init__(self, message: str, zone: str, max_dt_s: float):
        super().__init__(message)
        self.zone = zone
        self.max_dt_s = max_dt_s


class IngestionError(ThermorlError):
    """An asset file (weather CSV, layout, context) failed to parse or validate."""


class ValidationError(ThermorlError):
    """A runtime value (preference vector, reference point, bounds) is invalid."""


class LifecycleError(ThermorlError):
    """An operation was called in the wrong state (step after done, closed handle)."""
