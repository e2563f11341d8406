"""Exception hierarchy shared across the library."""


class OffshellError(Exception):
    """Base class for all library errors."""


class DomainError(OffshellError):
    """A quantity left the domain where the dynamics are defined (e.g. eps <= 0)."""


class DomainStepError(OffshellError):
    """An internal integrator stage left the valid domain; the step must be retried smaller."""


class ConfigError(OffshellError):
    """Invalid run configuration or model parameters."""


class ConvergenceError(OffshellError):
    """An iterative numerical procedure failed to converge within its budget."""


class PoleError(OffshellError):
    """Evaluation requested exactly at a pole of an analytically continued pairing."""


class FitError(OffshellError):
    """Not enough data (or degenerate data) for an extrapolation fit."""
