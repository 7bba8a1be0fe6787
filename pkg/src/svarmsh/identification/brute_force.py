"""
Multi-start numerical search for every unit-diagonal A0 consistent with a set
of state covariances.

With Sigma_1 = C C', any decomposition Sigma_m = A0^{-1} Lambda_m A0^{-T} has
A0 proportional, row by row, to Q' C^{-1} for an orthogonal Q that makes
Q' C^{-1} Sigma_m C^{-T} Q diagonal for every m. The search parametrizes Q by
Givens angles and drives those off-diagonal elements to zero. Sign flips of Q
only flip rows of A0, which the unit-diagonal normalization removes.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import least_squares, linear_sum_assignment

from src.svarmsh.identification.conditions import verify_decomposition

logger = logging.getLogger("svarmsh.identification")

_UNASSIGNABLE_COST = 1e6


def givens_rotation(angles: np.ndarray, n: int) -> np.ndarray:
    """Orthogonal n x n matrix from n(n-1)/2 plane rotations."""
    Q = np.eye(n)
    index = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            c, s = np.cos(angles[index]), np.sin(angles[index])
            G = np.eye(n)
            G[i, i] = c
            G[j, j] = c
            G[i, j] = -s
            G[j, i] = s
            Q = Q @ G
            index += 1
    return Q


def _off_diagonal_residuals(angles: np.ndarray, whitened: List[np.ndarray], n: int) -> np.ndarray:
    Q = givens_rotation(angles, n)
    upper = np.triu_indices(n, k=1)
    return np.concatenate([(Q.T @ S @ Q)[upper] for S in whitened])


def normalize_rows(G: np.ndarray) -> Optional[np.ndarray]:
    """
    Assigns each row of G to an equation and scales it to a unit diagonal.

    Rows go to the columns where they carry the largest share of their norm,
    solved jointly as an assignment problem. Returns None if some row would
    need a zero pivot.
    """
    n = G.shape[0]
    shares = np.abs(G) / np.linalg.norm(G, axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        cost = np.where(shares > 1e-12, -np.log(shares), _UNASSIGNABLE_COST)
    rows, columns = linear_sum_assignment(cost)
    if np.any(cost[rows, columns] >= _UNASSIGNABLE_COST):
        return None
    A0 = np.empty((n, n))
    for k, i in zip(rows, columns):
        A0[i] = G[k] / G[k, i]
    return A0


def brute_force_alternatives(
    sigmas: Sequence[np.ndarray],
    n_starts: int = 64,
    tol: float = 1e-6,
    rng: Optional[np.random.Generator] = None,
) -> List[np.ndarray]:
    """
    All distinct unit-diagonal A0 found to reproduce the covariances.

    Args:
        sigmas: M positive definite N x N covariances; the first one is factored.
        n_starts: Independent random starts, each on its own spawned stream.
        tol: Acceptance threshold of verify_decomposition. Solutions closer
             than 100 * tol in Frobenius norm are merged.
        rng: Source of the start points.

    Returns:
        Solutions in the order they were first found.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be positive.")
    sigmas = [np.asarray(sigma, dtype=float) for sigma in sigmas]
    if not sigmas:
        raise ValueError("At least one covariance matrix is required.")
    n = sigmas[0].shape[0]
    if n == 1:
        return [np.ones((1, 1))]
    rng = rng or np.random.default_rng()

    C = cholesky(sigmas[0], lower=True)
    C_inverse = solve_triangular(C, np.eye(n), lower=True)
    whitened = [C_inverse @ sigma @ C_inverse.T for sigma in sigmas[1:]]
    n_angles = n * (n - 1) // 2

    solutions: List[np.ndarray] = []
    for start, stream in enumerate(rng.spawn(n_starts)):
        x0 = stream.uniform(-np.pi, np.pi, size=n_angles)
        if whitened:
            fit = least_squares(
                _off_diagonal_residuals,
                x0,
                args=(whitened, n),
                method="lm",
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            angles = fit.x
        else:
            angles = x0

        A0 = normalize_rows(givens_rotation(angles, n).T @ C_inverse)
        if A0 is None:
            logger.debug("Start %d: rotated rows cannot be normalized.", start)
            continue
        lambda_matrix = np.array([np.diag(A0 @ sigma @ A0.T) for sigma in sigmas])
        if not verify_decomposition(A0, lambda_matrix, sigmas, tol):
            logger.debug("Start %d did not reach an exact decomposition.", start)
            continue
        if any(np.linalg.norm(A0 - known) < 100 * tol for known in solutions):
            continue
        solutions.append(A0)

    logger.debug("%d distinct solutions from %d starts.", len(solutions), n_starts)
    return solutions


def invariant_rows(solutions: Sequence[np.ndarray], tol: float = 1e-6) -> List[bool]:
    """Per equation, whether that row of A0 agrees across all solutions within tol."""
    if not solutions:
        return []
    reference = solutions[0]
    return [
        all(np.max(np.abs(other[k] - reference[k])) < tol for other in solutions[1:])
        for k in range(reference.shape[0])
    ]
