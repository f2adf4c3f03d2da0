"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolationError(ValueError):
    """An input failed a documented precondition (shape, bounds, ordering)."""


class SingularCovarianceError(RuntimeError):
    """A covariance solve failed even after the jitter ladder was exhausted.

    Carries enough context to diagnose the failure without re-running.
    """

    def __init__(self, message: str, *, smallest_pivot: float | None = None,
                 smallest_eigenvalue: float | None = None) -> None:
        detail = message
        if smallest_pivot is not None:
            detail += f" (smallest Cholesky pivot: {smallest_pivot:.6e})"
        if smallest_eigenvalue is not None:
            detail += f" (smallest eigenvalue: {smallest_eigenvalue:.6e})"
        super().__init__(detail)
        self.smallest_pivot = smallest_pivot
        self.smallest_eigenvalue = smallest_eigenvalue
