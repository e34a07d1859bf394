"""Exception hierarchy shared by all modules.

Each class maps onto one CLI exit-code family: configuration problems exit
with 2, numerical failures with 3.
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ConfigurationError(WorkbenchError, ValueError):
    """Invalid model or run configuration."""


class DomainError(WorkbenchError, ValueError):
    """Operation called outside its domain (wrong degree, window, support)."""


class SingularityError(WorkbenchError, ValueError):
    """Negative spectral power applied to data with a harmonic component."""


class TruncationError(WorkbenchError, ValueError):
    """Vector not representable in the truncated Fock span."""


class IntegrationError(WorkbenchError, RuntimeError):
    """Time stepper became unstable."""


class InternalError(WorkbenchError, RuntimeError):
    """Unexpected numerical failure (e.g. eigensolver non-convergence)."""
