"""Exception hierarchy shared across the package."""


class TrtrackError(Exception):
    """Base class for all package errors."""


class ParameterError(TrtrackError, ValueError):
    """An argument violates a documented precondition."""


class ConfigError(TrtrackError):
    """An experiment or CLI configuration is invalid. CLI exit code 2."""


class DataError(TrtrackError):
    """An input file or record stream is malformed. CLI exit code 3."""


class DegenerateInputError(DataError):
    """Numerically unusable input, e.g. a zero-energy channel response."""
