"""Exception types shared across the package."""


class SummakitError(Exception):
    """Base class for all errors raised by summakit."""


class DomainError(SummakitError, ValueError):
    """A parameter or input lies outside the domain of an operation."""


class ConfigurationError(SummakitError, ValueError):
    """A run configuration is incomplete or inconsistent."""


class UnsupportedFamilyError(ConfigurationError):
    """A closed form was requested for a matrix family that has none."""


class PreconditionError(SummakitError):
    """An experiment precondition failed (e.g. neighbourhood agreement)."""
