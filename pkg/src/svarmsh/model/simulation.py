"""
Synthetic data generation from a known parameter point.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.svarmsh.model.errors import SingularStructuralMatrixError, UnstableSystemError
from src.svarmsh.model.likelihood import ergodic_distribution
from src.svarmsh.model.parameters import ModelParameters, StateSequence
from src.svarmsh.model.time_series_data import TimeSeriesData

DEFAULT_BURN = 200


@dataclass(frozen=True)
class SimulatedPath:
    """
    A simulated sample together with the latent quantities that produced it.

    Attributes:
        data (TimeSeriesData): Observations with p pre-sample columns.
        states (StateSequence): State of every estimation-sample period.
        shocks (np.ndarray): N x T structural shocks u_t.
    """

    data: TimeSeriesData
    states: StateSequence
    shocks: np.ndarray


def companion_matrix(params: ModelParameters) -> np.ndarray:
    """Np x Np companion matrix of the reduced-form lag polynomial A0^{-1} A_i."""
    n, p = params.n_variables, params.n_lags
    reduced = np.linalg.solve(params.A0, params.beta)
    companion = np.zeros((n * p, n * p))
    companion[:n, :] = reduced
    if p > 1:
        companion[n:, :-n] = np.eye(n * (p - 1))
    return companion


def spectral_radius(params: ModelParameters) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(companion_matrix(params)))))


def simulate_path(
    true_params: ModelParameters,
    T: int,
    seed: Optional[int] = None,
    burn: int = DEFAULT_BURN,
    initial_state: Optional[int] = None,
    variable_names: Optional[Sequence[str]] = None,
) -> SimulatedPath:
    """
    Simulates the model forward from zero initial values.

    The state chain starts from its ergodic distribution unless initial_state
    forces s_0. The first `burn` observations are discarded, the next p
    become initial conditions and the following T form the sample.

    Raises:
        SingularStructuralMatrixError: If A0 is singular.
        UnstableSystemError: If the companion spectral radius is at least one.
    """
    if T < 1 or burn < 0:
        raise ValueError("T must be positive and burn non-negative.")
    if not np.isfinite(true_params.log_abs_det_A0()):
        raise SingularStructuralMatrixError("Cannot simulate with a singular A0.")
    radius = spectral_radius(true_params)
    if radius >= 1.0:
        raise UnstableSystemError(radius)

    rng = np.random.default_rng(seed)
    n, p, m = true_params.n_variables, true_params.n_lags, true_params.n_states
    total = burn + p + T

    if initial_state is None:
        current = rng.choice(m, p=ergodic_distribution(true_params.P))
    else:
        if not 0 <= initial_state < m:
            raise ValueError(f"initial_state must lie in 0..{m - 1}.")
        current = int(initial_state)
    cumulative = np.cumsum(true_params.P, axis=1)
    uniforms = rng.random(total)
    states = np.empty(total, dtype=np.int64)
    for t in range(total):
        current = min(int(np.searchsorted(cumulative[current], uniforms[t], side="right")), m - 1)
        states[t] = current

    shocks = rng.standard_normal((n, total)) * np.sqrt(true_params.lambda_matrix[states].T)

    A0_inverse = np.linalg.inv(true_params.A0)
    y = np.zeros((n, total + p))
    for t in range(total):
        lagged = np.concatenate([y[:, p + t - lag] for lag in range(1, p + 1)])
        rhs = true_params.mu + true_params.beta @ lagged + shocks[:, t]
        y[:, p + t] = A0_inverse @ rhs

    observed = y[:, p + burn :]
    data = TimeSeriesData(
        Y=observed[:, p:],
        initial_conditions=observed[:, :p],
        variable_names=tuple(variable_names or ()),
    )
    return SimulatedPath(
        data=data,
        states=StateSequence(states[burn + p :], m),
        shocks=shocks[:, burn + p :],
    )


def simulate_data(
    true_params: ModelParameters,
    T: int,
    seed: Optional[int] = None,
    burn: int = DEFAULT_BURN,
    initial_state: Optional[int] = None,
    variable_names: Optional[Sequence[str]] = None,
) -> Tuple[TimeSeriesData, StateSequence]:
    """Simulated observations and their state path; see simulate_path."""
    path = simulate_path(true_params, T, seed, burn, initial_state, variable_names)
    return path.data, path.states
