"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input parameters fall outside the region where a construction is defined."""


class ConvergenceError(RuntimeError):
    """A series, product or iteration failed to settle within its budget."""


class BranchError(RuntimeError):
    """Eigenvalue continuation could not follow a single analytic branch."""
