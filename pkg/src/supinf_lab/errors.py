"""Exception hierarchy shared by every module of the package."""


class SupInfLabError(Exception):
    """Base class for all package errors."""


class DimensionError(SupInfLabError, ValueError):
    """Raised for a space dimension outside the admissible range n >= 3."""


class DomainError(SupInfLabError, ValueError):
    """Raised when an evaluation point, region or window leaves its domain."""


class SolverError(SupInfLabError, RuntimeError):
    """Base class for failures of the shooting integrator."""


class DomainTooLargeError(SolverError):
    """Positivity was lost before the profile reached the minimum node count."""


class SolverInstabilityError(SolverError):
    """The integrator produced a non-finite value."""


class SearchError(SupInfLabError, RuntimeError):
    """The moving-plane search found no admissible starting plane."""

    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned


class ConfigError(SupInfLabError, ValueError):
    """Malformed or out-of-range experiment configuration."""

    def __init__(self, message, line=None, key=None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if key is not None:
            prefix.append(f"key '{key}'")
        full = f"{', '.join(prefix)}: {message}" if prefix else message
        super().__init__(full)
        self.line = line
        self.key = key
