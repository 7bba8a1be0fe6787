"""
Result types of the identification diagnostics.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

NO_HETEROSKEDASTICITY = "no heteroskedasticity: a single volatility state"


@dataclass(frozen=True)
class RelativeVarianceProfile:
    """
    Variances of every shock relative to its state-1 variance.

    Attributes:
        omega_vectors (np.ndarray): N x (M - 1) matrix; row i is omega_i.
        tol (float): Relative threshold below which two entries count as equal.
    """

    omega_vectors: np.ndarray
    tol: float = 1e-6

    def __post_init__(self):
        """Validate parameters after initialization."""
        omega = np.array(self.omega_vectors, dtype=float, ndmin=2)
        if omega.size and np.any(~(omega > 0)):
            raise ValueError("Relative variances must be positive.")
        if not self.tol > 0:
            raise ValueError("tol must be positive.")
        omega.setflags(write=False)
        object.__setattr__(self, "omega_vectors", omega)

    @classmethod
    def from_lambda_matrix(cls, lambda_matrix: np.ndarray, tol: float = 1e-6) -> "RelativeVarianceProfile":
        lam = np.array(lambda_matrix, dtype=float, ndmin=2)
        if np.any(~(lam > 0)):
            raise ValueError("Structural variances must be positive.")
        return cls(omega_vectors=(lam[1:] / lam[0]).T, tol=tol)

    @property
    def n_variables(self) -> int:
        return self.omega_vectors.shape[0]

    def differs(self, i: int, k: int) -> bool:
        """True when omega_i and omega_k differ by more than tol in some coordinate."""
        a, b = self.omega_vectors[i], self.omega_vectors[k]
        gap = np.abs(a - b)
        return bool(np.any(gap > self.tol * np.maximum(np.abs(a), np.abs(b))))


@dataclass(frozen=True)
class IdentificationReport:
    """
    Outcome of the sufficient condition for uniqueness of A0.

    The condition is sufficient only, so a row that fails it is reported as
    "not established" rather than as unidentified.

    Attributes:
        row_unique (Tuple[bool, ...]): One flag per equation.
        globally_unique (bool): True exactly when no two omega vectors collide.
        colliding_pairs (List[Tuple[int, int]]): Zero-based (i, j), i < j, with omega_i = omega_j.
        reason (Optional[str]): Set when the check could not be applied.
    """

    row_unique: Tuple[bool, ...]
    globally_unique: bool
    colliding_pairs: List[Tuple[int, int]] = field(default_factory=list)
    reason: Optional[str] = None

    @property
    def verdict(self) -> str:
        return "unique" if self.globally_unique else "not established"

    def row_verdicts(self) -> List[str]:
        return ["unique" if flag else "not established" for flag in self.row_unique]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "row_unique": [bool(flag) for flag in self.row_unique],
            "colliding_pairs": [[int(i) + 1, int(j) + 1] for i, j in self.colliding_pairs],
            "reason": self.reason,
        }

    def __str__(self) -> str:
        lines = [f"A0 identification: {self.verdict}"]
        if self.reason:
            lines.append(f"  reason: {self.reason}")
        for n, verdict in enumerate(self.row_verdicts(), start=1):
            lines.append(f"  equation {n}: {verdict}")
        for i, j in self.colliding_pairs:
            lines.append(f"  equal relative variances: equations {i + 1} and {j + 1}")
        return "\n".join(lines)
