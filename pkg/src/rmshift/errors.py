"""Exception hierarchy shared by all modules."""


class RmShiftError(Exception):
    """Base class for library errors."""


class DomainError(RmShiftError, ValueError):
    """An argument lies outside the domain of the operation."""


class StateError(RmShiftError, RuntimeError):
    """An object is not in a state that allows the requested operation."""


class AdmissibilityError(RmShiftError, ValueError):
    """Model parameters violate a hypothesis required by the estimator theory."""


class ConfigError(RmShiftError, ValueError):
    """An experiment configuration is missing keys or holds invalid values."""


class NumericError(RmShiftError, ArithmeticError):
    """A numerical routine failed; ``partial`` holds the best estimate reached."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ReplicationError(RmShiftError, RuntimeError):
    """A single Monte Carlo replication failed."""

    def __init__(self, rep_id, cause):
        super().__init__(f"replication {rep_id} failed: {cause}")
        self.rep_id = rep_id
        self.cause = cause
