"""Exception types shared across the package."""


class NhzmError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpecError(NhzmError, ValueError):
    """A lattice specification violates a structural invariant."""


class EigensolverError(NhzmError, RuntimeError):
    """Dense eigendecomposition failed; carries the offending matrix."""

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class DomainError(NhzmError, ValueError):
    """An operation was called outside its domain of validity."""


class FitError(NhzmError, RuntimeError):
    """Not enough (or unusable) data for a requested fit."""


class DegeneratePerturbationError(NhzmError, RuntimeError):
    """Perturbation theory hit a (near-)degenerate unperturbed spectrum."""


class ModeMatchingError(NhzmError, RuntimeError):
    """Could not match modes across decompositions (overlap too small)."""


class PropagationOverflowError(NhzmError, OverflowError):
    """Time evolution overflowed; re-run with per-period renormalization."""


class EpSetupError(NhzmError, ValueError):
    """Inconsistent exceptional-point data (eigenvalue/Jordan chain)."""
