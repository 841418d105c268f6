"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, SizeCapError -> 3,
ConvergenceError -> 4.
"""


class QuditLabError(Exception):
    """Base class for all package errors."""


class ConfigError(QuditLabError):
    """Invalid or unknown experiment configuration."""


class SizeCapError(QuditLabError):
    """A requested computation exceeds the configured dense-size cap."""


class ConvergenceError(QuditLabError):
    """An iterative solver failed to reach its target residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
