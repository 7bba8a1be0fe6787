"""
Likelihood evaluation for the SVAR with Markov-switching structural variances.

Two algebraically identical forms are provided. The row form works with the
structural residuals U = A0 Y - A X. The alpha form rewrites the system as a
regression in the free elements of A0,
    ytilde_t = xtilde_t alpha + u_t,
with ytilde_t = A0(q) y_t - A x_t and xtilde_t = -(y_t' kron I_N) Q, which the
Metropolis step for alpha relies on.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.svarmsh.model.design import DesignMatrices
from src.svarmsh.model.errors import ReducibleChainError, SingularStructuralMatrixError
from src.svarmsh.model.evaluation import DensityEvaluation, EvaluationStatus
from src.svarmsh.model.parameters import ModelParameters, StateSequence
from src.svarmsh.model.restrictions import RestrictionScheme
from src.svarmsh.model.time_series_data import TimeSeriesData

LOG_2PI = float(np.log(2.0 * np.pi))


def structural_residuals(
    params: ModelParameters,
    data: TimeSeriesData,
    design: DesignMatrices,
    row: Optional[int] = None,
) -> np.ndarray:
    """
    U = A0 Y - A X, or a single row of it.

    Returns:
        N x T matrix, or a length-T vector when row is given.
    """
    if row is None:
        return params.A0 @ data.Y - params.A @ design.X
    return params.A0[row] @ data.Y - params.A[row] @ design.X


def _gaussian_regime_log_likelihood(
    residuals: np.ndarray, variances: np.ndarray, log_abs_det: float
) -> float:
    """residuals and variances are N x T; variances already follow the state path."""
    n, t_count = residuals.shape
    return float(
        -0.5 * n * t_count * LOG_2PI
        + t_count * log_abs_det
        - 0.5 * np.sum(np.log(variances))
        - 0.5 * np.sum(residuals**2 / variances)
    )


def evaluate_log_likelihood(
    params: ModelParameters,
    states: StateSequence,
    data: TimeSeriesData,
    design: DesignMatrices,
) -> DensityEvaluation:
    """Log-likelihood conditional on the state path, in the structural-row form."""
    log_abs_det = params.log_abs_det_A0()
    if not np.isfinite(log_abs_det):
        return DensityEvaluation.failed(EvaluationStatus.SINGULAR_A0)
    variances = params.lambda_matrix[states.s].T
    residuals = structural_residuals(params, data, design)
    return DensityEvaluation(_gaussian_regime_log_likelihood(residuals, variances, log_abs_det))


def log_likelihood(
    params: ModelParameters,
    states: StateSequence,
    data: TimeSeriesData,
    design: DesignMatrices,
) -> float:
    """Log-likelihood given the states; -inf for a singular A0."""
    return evaluate_log_likelihood(params, states, data, design).value


@dataclass(frozen=True)
class AlphaRegression:
    """
    Data-only ingredients of the alpha form, computed once per data set.

    Attributes:
        Z (np.ndarray): T x N x r array; Z[t] = (y_t' kron I_N) Q, so xtilde_t = -Z[t].
        fixed_part (np.ndarray): T x N array whose row t is A0(q) y_t.
    """

    Z: np.ndarray
    fixed_part: np.ndarray


def build_alpha_regression(data: TimeSeriesData, scheme: RestrictionScheme) -> AlphaRegression:
    n = scheme.n_variables
    if n != data.n_variables:
        raise ValueError(f"Scheme is for N = {n}, data has N = {data.n_variables}.")
    # vec index j * N + i holds A0[i, j]
    q_blocks = scheme.Q.reshape(n, n, scheme.n_free)
    Z = np.einsum("jt,jic->tic", data.Y, q_blocks)
    A0_fixed = scheme.q.reshape((n, n), order="F")
    return AlphaRegression(Z=Z, fixed_part=(A0_fixed @ data.Y).T)


def _alpha_form_pieces(
    alpha: np.ndarray,
    params: ModelParameters,
    states: StateSequence,
    design: DesignMatrices,
    regression: AlphaRegression,
) -> Tuple[np.ndarray, np.ndarray]:
    """Residuals ytilde_t - xtilde_t alpha (T x N) and the matching variances."""
    y_tilde = regression.fixed_part - (params.A @ design.X).T
    residuals = y_tilde + regression.Z @ alpha
    variances = params.lambda_matrix[states.s]
    return residuals, variances


def log_likelihood_alpha_form(
    alpha: np.ndarray,
    params: ModelParameters,
    states: StateSequence,
    data: TimeSeriesData,
    design: DesignMatrices,
    scheme: RestrictionScheme,
    regression: Optional[AlphaRegression] = None,
) -> float:
    """
    Log-likelihood as a function of alpha, every other block taken from params.

    Returns -inf when A0(alpha) is singular.
    """
    regression = regression or build_alpha_regression(data, scheme)
    alpha = np.asarray(alpha, dtype=float)
    sign, log_abs_det = np.linalg.slogdet(scheme.reconstruct(alpha))
    if sign == 0 or not np.isfinite(log_abs_det):
        return -np.inf
    residuals, variances = _alpha_form_pieces(alpha, params, states, design, regression)
    return _gaussian_regime_log_likelihood(residuals.T, variances.T, float(log_abs_det))


def log_likelihood_alpha_gradient(
    alpha: np.ndarray,
    params: ModelParameters,
    states: StateSequence,
    data: TimeSeriesData,
    design: DesignMatrices,
    scheme: RestrictionScheme,
    regression: Optional[AlphaRegression] = None,
) -> np.ndarray:
    """
    Gradient of log_likelihood_alpha_form with respect to alpha.

    T Q' vec(A0^{-T}) + sum_t xtilde_t' D_t^{-1} (ytilde_t - xtilde_t alpha).
    """
    regression = regression or build_alpha_regression(data, scheme)
    alpha = np.asarray(alpha, dtype=float)
    A0 = scheme.reconstruct(alpha)
    try:
        inverse_t = np.linalg.inv(A0).T
    except np.linalg.LinAlgError as e:
        raise SingularStructuralMatrixError("Gradient undefined at a singular A0.") from e
    residuals, variances = _alpha_form_pieces(alpha, params, states, design, regression)
    determinant_term = data.n_observations * scheme.Q.T @ inverse_t.reshape(-1, order="F")
    quadratic_term = -np.einsum("tic,ti->c", regression.Z, residuals / variances)
    return determinant_term + quadratic_term


def state_log_densities(
    params: ModelParameters, data: TimeSeriesData, design: DesignMatrices
) -> np.ndarray:
    """
    log p(y_t | s_t = m, theta) for every t and m.

    Returns:
        T x M matrix.

    Raises:
        SingularStructuralMatrixError: If A0 is singular.
    """
    log_abs_det = params.log_abs_det_A0()
    if not np.isfinite(log_abs_det):
        raise SingularStructuralMatrixError("A0 is singular.")
    residuals_sq = structural_residuals(params, data, design).T ** 2
    lam = params.lambda_matrix
    n = params.n_variables
    return (
        log_abs_det
        - 0.5 * n * LOG_2PI
        - 0.5 * np.sum(np.log(lam), axis=1)[None, :]
        - 0.5 * residuals_sq @ (1.0 / lam).T
    )


def ergodic_distribution(P: np.ndarray) -> np.ndarray:
    """
    Stationary distribution pi with pi' P = pi'.

    Raises:
        ReducibleChainError: If rank(I - P) < M - 1, so pi is not unique.
    """
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    if m == 1:
        return np.ones(1)
    system = np.eye(m) - P
    rank = np.linalg.matrix_rank(system)
    if rank < m - 1:
        raise ReducibleChainError(rank, m)
    lhs = np.vstack([system.T, np.ones((1, m))])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def forward_filter(
    log_densities: np.ndarray, P: np.ndarray, initial: np.ndarray
) -> Tuple[np.ndarray, float]:
    """
    Hamilton filter in scaled form.

    Args:
        log_densities: T x M per-state observation log-densities.
        P: Transition matrix.
        initial: Distribution of the state before the first observation.

    Returns:
        (filtered, log_likelihood): T x M filtered probabilities
        Pr[s_t | y_1..t] and log p(y_1..T) with the states summed out.
    """
    t_count, m = log_densities.shape
    filtered = np.empty((t_count, m))
    predicted = np.asarray(initial, dtype=float) @ P
    total = 0.0
    for t in range(t_count):
        shift = np.max(log_densities[t])
        joint = predicted * np.exp(log_densities[t] - shift)
        normalizer = joint.sum()
        total += np.log(normalizer) + shift
        filtered[t] = joint / normalizer
        predicted = filtered[t] @ P
    return filtered, float(total)


def filtered_log_likelihood(
    params: ModelParameters, data: TimeSeriesData, design: DesignMatrices
) -> DensityEvaluation:
    """Log-likelihood with the state path summed out, the chain started at its ergodic distribution."""
    try:
        log_densities = state_log_densities(params, data, design)
    except SingularStructuralMatrixError:
        return DensityEvaluation.failed(EvaluationStatus.SINGULAR_A0)
    if params.n_states == 1:
        return DensityEvaluation(float(log_densities.sum()))
    _, value = forward_filter(log_densities, params.P, ergodic_distribution(params.P))
    return DensityEvaluation(value)

