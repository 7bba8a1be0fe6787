"""
Exceptions raised by the model layer.
"""

from typing import Optional


class InsufficientDataError(ValueError):
    """Raised when a sample is too short for the requested design."""

    def __init__(self, n_observations: int, required: int, message: Optional[str] = None):
        self.n_observations = n_observations
        self.required = required
        super().__init__(
            message
            or f"Need more than {required} observations, got {n_observations}."
        )


class RestrictionError(ValueError):
    """Raised when a restriction scheme is malformed or does not fit the data."""


class SingularStructuralMatrixError(ArithmeticError):
    """Raised when an operation requires a nonsingular A0 and receives a singular one."""


class UnstableSystemError(ValueError):
    """Raised when the reduced form has a companion spectral radius of at least one."""

    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"Reduced form is not stable: companion spectral radius {spectral_radius:.6g} >= 1."
        )


class ReducibleChainError(ArithmeticError):
    """Raised when a transition matrix has no unique ergodic distribution."""

    def __init__(self, rank: int, n_states: int):
        self.rank = rank
        self.n_states = n_states
        super().__init__(
            f"Transition matrix is reducible: rank(I - P) = {rank} < {n_states - 1}."
        )
