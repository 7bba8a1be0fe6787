"""
Numerical form of the uniqueness condition for the rows of A0 under
Markov-switching structural variances.

Row k of a unit-diagonal A0 is unique when its relative-variance vector
omega_k differs from every other omega_i. If all vectors are pairwise
distinct, A0 is unique.
"""

from typing import Sequence

import numpy as np

from src.svarmsh.identification.report import (
    NO_HETEROSKEDASTICITY,
    IdentificationReport,
    RelativeVarianceProfile,
)
from src.svarmsh.model import SingularStructuralMatrixError


def check_identification(lambda_matrix: np.ndarray, tol: float = 1e-6) -> IdentificationReport:
    """
    Applies the relative-variance condition to an M x N matrix of structural variances.

    A single-state matrix yields a report with every row flagged as not
    established and a reason attached.
    """
    lam = np.array(lambda_matrix, dtype=float, ndmin=2)
    n = lam.shape[1]
    if lam.shape[0] < 2:
        if np.any(~(lam > 0)):
            raise ValueError("Structural variances must be positive.")
        return IdentificationReport(
            row_unique=(False,) * n, globally_unique=False, reason=NO_HETEROSKEDASTICITY
        )

    profile = RelativeVarianceProfile.from_lambda_matrix(lam, tol)
    colliding = [
        (i, j) for i in range(n) for j in range(i + 1, n) if not profile.differs(i, j)
    ]
    in_collision = {index for pair in colliding for index in pair}
    return IdentificationReport(
        row_unique=tuple(k not in in_collision for k in range(n)),
        globally_unique=not colliding,
        colliding_pairs=colliding,
    )


def _check_symmetric(sigma: np.ndarray, index: int) -> None:
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"Covariance {index + 1} is not square.")
    scale = max(np.max(np.abs(sigma)), 1e-300)
    if np.max(np.abs(sigma - sigma.T)) > 1e-10 * scale:
        raise ValueError(f"Covariance {index + 1} is not symmetric.")


def decomposition_error(
    A0: np.ndarray, lambda_matrix: np.ndarray, sigmas: Sequence[np.ndarray]
) -> float:
    """
    Largest error of Sigma_m = A0^{-1} Lambda_m A0^{-T} over m, each relative
    to the largest absolute entry of Sigma_m.

    Raises:
        SingularStructuralMatrixError: If A0 is singular.
        ValueError: If a covariance is not symmetric or the counts disagree.
    """
    A0 = np.asarray(A0, dtype=float)
    lam = np.array(lambda_matrix, dtype=float, ndmin=2)
    if len(sigmas) != lam.shape[0]:
        raise ValueError(f"Got {len(sigmas)} covariances for {lam.shape[0]} states.")
    try:
        inverse = np.linalg.inv(A0)
    except np.linalg.LinAlgError as e:
        raise SingularStructuralMatrixError("A0 is singular.") from e
    if not np.all(np.isfinite(inverse)):
        raise SingularStructuralMatrixError("A0 is singular.")

    worst = 0.0
    for m, sigma in enumerate(sigmas):
        sigma = np.asarray(sigma, dtype=float)
        _check_symmetric(sigma, m)
        implied = (inverse * lam[m]) @ inverse.T
        worst = max(worst, float(np.max(np.abs(implied - sigma)) / np.max(np.abs(sigma))))
    return worst


def verify_decomposition(
    A0: np.ndarray,
    lambda_matrix: np.ndarray,
    sigmas: Sequence[np.ndarray],
    tol: float = 1e-6,
) -> bool:
    """True when (A0, Lambda) reproduces every Sigma_m within relative error tol."""
    return decomposition_error(A0, lambda_matrix, sigmas) < tol
