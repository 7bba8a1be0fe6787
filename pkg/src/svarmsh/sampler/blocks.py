"""
Conditional blocks of the Metropolis-within-Gibbs sampler.

Each function draws one parameter block given the current values of all the
others and advances only the generator it is handed. Row arguments are
zero-based equation indices; state arguments are zero-based labels, state 0
being the reference state.
"""

from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from src.svarmsh.distributions import (
    DirichletParams,
    IG2Params,
    dirichlet_sample,
    ig2_sample,
    mvt_sample,
)
from src.svarmsh.model import (
    AlphaRegression,
    ModelParameters,
    PriorHyperparameters,
    ReducibleChainError,
    StateSequence,
    TimeSeriesData,
    DesignMatrices,
    ergodic_distribution,
    forward_filter,
    log_likelihood_alpha_form,
    state_log_densities,
)
from src.svarmsh.sampler.chain_state import SamplerContext
from src.svarmsh.sampler.errors import PrecisionMatrixError
from src.svarmsh.sampler.sampler_config import SamplerConfig


# --- Variances ---


def sample_lambda1(
    row: int,
    params: ModelParameters,
    states: StateSequence,
    residuals: np.ndarray,
    hyper: PriorHyperparameters,
    rng: np.random.Generator,
) -> float:
    """
    Draws lambda1_n from IG2(a_lambda + T, b_lambda + sum_t u_nt^2 / omega_{s_t, n}).

    Args:
        residuals: N x T structural residuals at the current A0 and A.
    """
    omega_path = params.omega_full[states.s, row]
    scale = hyper.b_lambda + float(np.sum(residuals[row] ** 2 / omega_path))
    return float(ig2_sample(IG2Params(hyper.a_lambda + len(states), scale), rng))


def omega_posterior(
    row: int,
    state: int,
    params: ModelParameters,
    states: StateSequence,
    residuals: np.ndarray,
    hyper: PriorHyperparameters,
) -> IG2Params:
    """Full conditional of omega_{state, row}; only periods spent in `state` enter."""
    if not 1 <= state < params.n_states:
        raise ValueError(f"Relative variances exist for states 1..{params.n_states - 1}, got {state}.")
    in_state = states.s == state
    a = hyper.a_omega + float(np.count_nonzero(in_state))
    b = hyper.b_omega + float(np.sum(residuals[row, in_state] ** 2)) / params.lambda1[row]
    return IG2Params(a, b)


def sample_omega(
    row: int,
    state: int,
    params: ModelParameters,
    states: StateSequence,
    residuals: np.ndarray,
    hyper: PriorHyperparameters,
    rng: np.random.Generator,
) -> Tuple[float, float, float]:
    """
    Draws omega_{state, row} from its IG2 full conditional.

    Returns:
        (draw, a, b) with (a, b) the parameters of the conditional.
    """
    posterior = omega_posterior(row, state, params, states, residuals, hyper)
    return float(ig2_sample(posterior, rng)), posterior.a, posterior.b


def rao_blackwell_records(
    params: ModelParameters,
    states: StateSequence,
    residuals: np.ndarray,
    hyper: PriorHyperparameters,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    IG2 parameters of every omega full conditional at the given values.

    Records are taken at the end of a sweep from the draw as it is stored,
    after relabelling, so that they are conditionals in the stored labels
    given the stored lambda1, A and alpha. The pairs returned by sample_omega
    during the sweep are conditional on the A and alpha of the previous sweep
    and, once states are relabelled, on another reference state; they are
    not kept.

    Returns:
        (a, b), each (M - 1) x N: a = a_omega + T_m and
        b = b_omega + lambda1_n^{-1} sum_{s_t = m} u_nt^2.
    """
    m_count, n = params.n_states, params.n_variables
    counts = states.counts
    a = np.repeat(hyper.a_omega + counts[1:, None].astype(float), n, axis=1)
    b = np.empty((m_count - 1, n))
    for m in range(1, m_count):
        in_state = states.s == m
        b[m - 1] = hyper.b_omega + np.sum(residuals[:, in_state] ** 2, axis=1) / params.lambda1
    return a, b


# --- Autoregressive rows ---


def sample_A_row(
    row: int,
    params: ModelParameters,
    states: StateSequence,
    context: SamplerContext,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Draws the K coefficients [mu_n, beta_n] of equation `row` from their Gaussian
    full conditional.

    The precision is sum_t x_t x_t' / lambda_{s_t, n} + Htilde^{-1} and the
    mean solves precision * mean = sum_t x_t A0_n y_t / lambda_{s_t, n}
    + Htilde^{-1} (A0_n Ptilde)'.

    Raises:
        PrecisionMatrixError: If the precision has no Cholesky factor.
    """
    X = context.design.X
    p_tilde, h_tilde = context.hyper.coefficient_prior(
        params.n_lags, params.gamma_mu, params.gamma_beta
    )
    weights = 1.0 / params.lambda_matrix[states.s, row]
    target = params.A0[row] @ context.data.Y
    precision = (X * weights) @ X.T + np.diag(1.0 / h_tilde)
    rhs = X @ (weights * target) + (params.A0[row] @ p_tilde) / h_tilde
    try:
        factor = cholesky(precision, lower=True)
    except LinAlgError as e:
        raise PrecisionMatrixError(
            row, float(np.linalg.cond(precision)), float(np.min(np.diag(precision)))
        ) from e
    mean = cho_solve((factor, True), rhs)
    return mean + solve_triangular(factor.T, rng.standard_normal(mean.size), lower=False)


# --- Structural matrix ---


def alpha_proposal_scale(
    params: ModelParameters,
    states: StateSequence,
    regression: AlphaRegression,
    scale_mult: float = 1.0,
) -> np.ndarray:
    """c (sum_t xtilde_t' diag(lambda_{s_t})^{-1} xtilde_t)^{-1}, the t-proposal scale."""
    inverse_variances = 1.0 / params.lambda_matrix[states.s]
    precision = np.einsum("tic,ti,tid->cd", regression.Z, inverse_variances, regression.Z)
    scale = np.linalg.inv(precision)
    return scale_mult * 0.5 * (scale + scale.T)


def _alpha_log_target(
    alpha: np.ndarray,
    params: ModelParameters,
    states: StateSequence,
    context: SamplerContext,
) -> float:
    """Log-likelihood plus the alpha-dependent prior terms, up to a constant."""
    log_lik = log_likelihood_alpha_form(
        alpha, params, states, context.data, context.design, context.scheme, context.regression
    )
    if not np.isfinite(log_lik):
        return -np.inf
    p = params.n_lags
    A0 = context.scheme.reconstruct(alpha)
    gap = params.beta - A0 @ context.hyper.prior_mean_matrix(p)
    h_bar = context.hyper.lag_variances(p)
    return float(
        log_lik
        - 0.5 * alpha @ alpha / params.gamma_alpha
        - 0.5 * np.sum(gap**2 / (params.gamma_beta * h_bar))
    )


def log_acceptance_ratio(
    proposed: np.ndarray,
    current: np.ndarray,
    params: ModelParameters,
    states: StateSequence,
    context: SamplerContext,
) -> float:
    """
    log delta for moving alpha from `current` to `proposed`.

    The proposal is symmetric, so delta is the ratio of likelihood times
    prior. The prior of beta is centred on A0_n Pbar and therefore moves with
    alpha as well. A singular proposed A0 gives -inf.
    """
    return _alpha_log_target(proposed, params, states, context) - _alpha_log_target(
        current, params, states, context
    )


def sample_alpha_mh(
    params: ModelParameters,
    states: StateSequence,
    context: SamplerContext,
    config: SamplerConfig,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, bool]:
    """
    One Metropolis step for alpha with a multivariate-t random-walk proposal.

    Returns:
        (alpha, accepted). With no free elements the step is a no-op that counts as accepted.
    """
    current = params.alpha
    if current.size == 0:
        return current.copy(), True
    scale = alpha_proposal_scale(params, states, context.regression, config.mh_scale_mult)
    proposed = mvt_sample(current, scale, config.mh_dof, rng)
    log_ratio = log_acceptance_ratio(proposed, current, params, states, context)
    if np.log(rng.random()) < log_ratio:
        return proposed, True
    return current.copy(), False


# --- Shrinkage ---


def sample_shrinkage(
    params: ModelParameters, hyper: PriorHyperparameters, rng: np.random.Generator
) -> Tuple[float, float, float]:
    """
    Draws (gamma_alpha, gamma_mu, gamma_beta) from their independent IG2 conditionals.
    """
    n, p = params.n_variables, params.n_lags
    gap = params.beta - params.A0 @ hyper.prior_mean_matrix(p)
    quadratic = float(np.sum(gap**2 / hyper.lag_variances(p)))
    gamma_alpha = ig2_sample(IG2Params(hyper.a + params.alpha.size, hyper.b + params.alpha @ params.alpha), rng)
    gamma_mu = ig2_sample(IG2Params(hyper.a + n, hyper.b + params.mu @ params.mu), rng)
    gamma_beta = ig2_sample(IG2Params(hyper.a + p * n * n, hyper.b + quadratic), rng)
    return float(gamma_alpha), float(gamma_mu), float(gamma_beta)


# --- Hidden states ---


def _draw_label(probabilities: np.ndarray, uniform: float) -> int:
    cumulative = np.cumsum(probabilities)
    label = int(np.searchsorted(cumulative, uniform * cumulative[-1], side="right"))
    return min(label, probabilities.size - 1)


def backward_sample(
    filtered: np.ndarray, P: np.ndarray, rng: np.random.Generator
) -> StateSequence:
    """Draws s_T from the last filtered distribution, then s_t given s_{t+1}."""
    t_count, m = filtered.shape
    uniforms = rng.random(t_count)
    s = np.empty(t_count, dtype=np.int64)
    s[-1] = _draw_label(filtered[-1], uniforms[-1])
    for t in range(t_count - 2, -1, -1):
        s[t] = _draw_label(filtered[t] * P[:, s[t + 1]], uniforms[t])
    return StateSequence(s, m)


def sample_states_ffbs(
    params: ModelParameters,
    data: TimeSeriesData,
    design: DesignMatrices,
    rng: np.random.Generator,
) -> StateSequence:
    """
    Forward-filtering backward-sampling of the whole state path.

    The filter starts from the ergodic distribution of P.

    Raises:
        ReducibleChainError: If P has no unique ergodic distribution.
    """
    t_count = data.n_observations
    if params.n_states == 1:
        return StateSequence.constant(t_count, 1)
    log_densities = state_log_densities(params, data, design)
    filtered, _ = forward_filter(log_densities, params.P, ergodic_distribution(params.P))
    return backward_sample(filtered, params.P, rng)


def smoothed_state_probabilities(
    params: ModelParameters, data: TimeSeriesData, design: DesignMatrices
) -> np.ndarray:
    """Pr[s_t = m | Y, theta] for every t, by the backward smoothing recursion."""
    if params.n_states == 1:
        return np.ones((data.n_observations, 1))
    log_densities = state_log_densities(params, data, design)
    filtered, _ = forward_filter(log_densities, params.P, ergodic_distribution(params.P))
    smoothed = np.empty_like(filtered)
    smoothed[-1] = filtered[-1]
    for t in range(filtered.shape[0] - 2, -1, -1):
        predicted = filtered[t] @ params.P
        smoothed[t] = filtered[t] * (params.P @ (smoothed[t + 1] / predicted))
        smoothed[t] /= smoothed[t].sum()
    return smoothed


def sample_transition_matrix(
    states: StateSequence,
    current_P: np.ndarray,
    hyper: PriorHyperparameters,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, bool]:
    """
    Metropolis-Hastings step for P.

    Rows are proposed from Dirichlet(e_m + N_m(S)); the proposal is accepted
    with probability min(1, pi_{s_1}(proposed) / pi_{s_1}(current)), pi being
    the ergodic distribution that starts the chain.

    Returns:
        (P, accepted)
    """
    m = current_P.shape[0]
    if m == 1:
        return current_P.copy(), True
    concentration = hyper.e + states.transition_counts
    proposed = np.vstack(
        [dirichlet_sample(DirichletParams(concentration[i]), rng) for i in range(m)]
    )
    uniform = rng.random()
    if len(states) == 0:
        return proposed, True
    first = states.s[0]
    try:
        log_ratio = np.log(ergodic_distribution(proposed)[first]) - np.log(
            ergodic_distribution(current_P)[first]
        )
    except ReducibleChainError:
        return current_P.copy(), False
    if np.log(uniform) < log_ratio:
        return proposed, True
    return current_P.copy(), False


# --- Label switching ---


def relabel_states(
    params: ModelParameters, states: StateSequence
) -> Tuple[ModelParameters, StateSequence, np.ndarray]:
    """
    Orders states by ascending geometric mean of their structural variances.

    Returns:
        (params, states, order): relabelled copies and the permutation, new
        label k being old label order[k].
    """
    lam = params.lambda_matrix
    order = np.argsort(np.mean(np.log(lam), axis=1), kind="stable")
    relabelled = params.copy()
    if np.array_equal(order, np.arange(order.size)):
        return relabelled, states, order
    lam = lam[order]
    relabelled.lambda1 = lam[0].copy()
    relabelled.omega = lam[1:] / lam[0]
    relabelled.P = params.P[np.ix_(order, order)]
    return relabelled, states.permuted(order), order
