"""Exception types raised across the package."""


class DualPredError(Exception):
    """Base class for every error raised by dualpred."""


class ValidationError(DualPredError, ValueError):
    """An argument or input value failed validation."""


class ProtocolError(DualPredError):
    """The sensor/base-station message sequence broke the channel contract."""


class InvariantViolation(DualPredError, AssertionError):
    """Sensor and base station disagree. Always an implementation bug."""
