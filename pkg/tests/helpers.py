"""
Parameter points and draw stores shared by the test modules.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.svarmsh.model import (
    ModelParameters,
    PriorHyperparameters,
    RestrictionScheme,
    TimeSeriesData,
    simulate_data,
)
from src.svarmsh.sampler import (
    DrawLayout,
    DrawStore,
    PosteriorDraw,
    SamplerConfig,
    SamplerContext,
    describe_run,
)


def bivariate_truth(
    omega: Sequence[float] = (4.0, 9.0),
    lambda1: Sequence[float] = (1.0, 2.0),
    stay: float = 0.95,
    n_states: int = 2,
    scheme: Optional[RestrictionScheme] = None,
) -> Tuple[ModelParameters, RestrictionScheme]:
    """N = 2, p = 1 system with A0 off-diagonals 0.5 (row 1) and -0.3 (row 2)."""
    scheme = scheme or RestrictionScheme.unrestricted(2)
    A0 = np.array([[1.0, 0.5], [-0.3, 1.0]])
    A = np.array([[0.1, 0.5, 0.1], [-0.1, 0.0, 0.3]])
    if n_states == 1:
        omega_matrix = np.zeros((0, 2))
        P = np.ones((1, 1))
    else:
        omega_matrix = np.array(omega, dtype=float).reshape(n_states - 1, 2)
        P = np.full((n_states, n_states), (1.0 - stay) / (n_states - 1))
        np.fill_diagonal(P, stay)
    params = ModelParameters.from_alpha(
        scheme.extract(A0), scheme, A, np.array(lambda1, dtype=float), omega_matrix, P
    )
    return params, scheme


def trivariate_truth(
    omega: Sequence[float] = (2.0, 5.0, 12.0), stay: float = 0.9
) -> Tuple[ModelParameters, RestrictionScheme]:
    """N = 3, p = 2, M = 2 system under the unrestricted scheme."""
    scheme = RestrictionScheme.unrestricted(3)
    A0 = np.array([[1.0, 0.2, -0.1], [0.4, 1.0, 0.0], [-0.3, 0.25, 1.0]])
    A = np.zeros((3, 7))
    A[:, 0] = [0.2, -0.1, 0.05]
    A[:, 1:4] = 0.3 * np.eye(3) + 0.05
    A[:, 4:7] = -0.1 * np.eye(3)
    P = np.array([[stay, 1.0 - stay], [1.0 - stay, stay]])
    params = ModelParameters.from_alpha(
        scheme.extract(A0),
        scheme,
        A,
        np.array([1.0, 0.5, 2.0]),
        np.array([omega], dtype=float),
        P,
    )
    return params, scheme


def random_parameters(
    rng: np.random.Generator, scheme: RestrictionScheme, n_states: int, p: int
) -> ModelParameters:
    """A random valid parameter point with a well-conditioned A0."""
    n = scheme.n_variables
    alpha = rng.uniform(-0.4, 0.4, size=scheme.n_free)
    A = rng.normal(0.0, 0.2, size=(n, 1 + n * p))
    lambda1 = rng.uniform(0.5, 2.0, size=n)
    omega = rng.uniform(0.3, 5.0, size=(n_states - 1, n))
    P = rng.dirichlet(np.full(n_states, 2.0), size=n_states) if n_states > 1 else np.ones((1, 1))
    return ModelParameters.from_alpha(
        alpha,
        scheme,
        A,
        lambda1,
        omega,
        P,
        gamma_alpha=rng.uniform(0.5, 2.0),
        gamma_mu=rng.uniform(0.5, 2.0),
        gamma_beta=rng.uniform(0.5, 2.0),
    )


def store_from_draws(
    draws: Sequence[PosteriorDraw],
    data: TimeSeriesData,
    scheme: RestrictionScheme,
    hyper: PriorHyperparameters,
    lags: int = 1,
) -> DrawStore:
    """A single-chain store holding the given draws, described as a run on `data`."""
    context = SamplerContext.build(data, scheme, hyper, lags)
    layout = DrawLayout(data.n_variables, lags, scheme.n_free, hyper.n_states)
    rows = np.vstack([layout.to_row(draw) for draw in draws])
    smoothed = np.full((data.n_observations, hyper.n_states), 1.0 / hyper.n_states)
    metadata = describe_run(context, SamplerConfig(n_chains=1, progress_bar=False))
    metadata["chains"] = [{"id": 0}]
    return DrawStore(layout, [rows], [smoothed], metadata)


def records_store(
    rb_a: np.ndarray, rb_b: np.ndarray, hyper: Optional[PriorHyperparameters] = None
) -> DrawStore:
    """A store whose draws differ only in their omega conditionals, rb_* being S x (M - 1) x N."""
    n_draws, n_free_states, n = rb_a.shape
    m = n_free_states + 1
    hyper = hyper or PriorHyperparameters.default(n, m)
    scheme = RestrictionScheme.unrestricted(n)
    params = ModelParameters.from_alpha(
        np.zeros(scheme.n_free),
        scheme,
        np.zeros((n, 1 + n)),
        np.ones(n),
        np.ones((m - 1, n)),
        np.full((m, m), 1.0 / m),
    )
    data, _ = simulate_data(params, T=30, seed=0)
    draws = [
        PosteriorDraw(
            params=params,
            state_counts=np.full(m, 10),
            rb_a=rb_a[k],
            rb_b=rb_b[k],
            log_likelihood=0.0,
            accepted=True,
            sweep=k,
        )
        for k in range(n_draws)
    ]
    return store_from_draws(draws, data, scheme, hyper)
