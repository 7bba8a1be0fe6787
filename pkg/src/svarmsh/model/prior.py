"""
Prior hyperparameters and the log prior density.

The prior factorizes as
    mu_n ~ N(0, gamma_mu),  beta_n ~ N(A0_n Pbar, gamma_beta Hbar),
    alpha ~ N(0, gamma_alpha I_r),
    lambda1_n ~ IG2(a_lambda, b_lambda),  omega_mn ~ IG2(a_omega, b_omega),
    gamma_* ~ IG2(a, b),  rows of P ~ Dirichlet(e_m),
where Pbar = [diag(D) 0] and Hbar is diagonal with l^{-decay} on the lag-l block.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from src.svarmsh.distributions import DirichletParams, dirichlet_log_pdf, ig2_log_density
from src.svarmsh.model.evaluation import DensityEvaluation, EvaluationStatus
from src.svarmsh.model.parameters import ModelParameters

LOG_2PI = float(np.log(2.0 * np.pi))

PRIOR_COMPONENTS = (
    "mu",
    "beta",
    "alpha",
    "lambda1",
    "omega",
    "P",
    "gamma_alpha",
    "gamma_mu",
    "gamma_beta",
)


@dataclass(frozen=True)
class PriorHyperparameters:
    """
    Constants of the prior.

    Attributes:
        a_lambda, b_lambda (float): IG2 shape and scale of lambda1. Default 1, 1.
        a_omega, b_omega (float): IG2 shape and scale of omega. Default 1, 3,
                                  which puts the prior mode at one.
        a, b (float): IG2 shape and scale of the three shrinkage scalars.
        e (np.ndarray): M x M Dirichlet concentrations, row m for row m of P.
        D_diag (np.ndarray): N flags, 1 for a persistent variable whose
                             first own lag is shrunk towards one.
        lag_decay (float): Exponent of the lag-decaying prior variances l^{-decay}.
    """

    e: np.ndarray
    D_diag: np.ndarray
    a_lambda: float = 1.0
    b_lambda: float = 1.0
    a_omega: float = 1.0
    b_omega: float = 3.0
    a: float = 1.0
    b: float = 1.0
    lag_decay: float = 2.0

    def __post_init__(self):
        """Validate parameters after initialization."""
        e = np.array(self.e, dtype=float, ndmin=2)
        D = np.asarray(self.D_diag, dtype=float).ravel()
        if e.shape[0] != e.shape[1] or np.any(~(e > 0)):
            raise ValueError("Dirichlet matrix e must be square with positive entries.")
        if np.any((D != 0) & (D != 1)):
            raise ValueError("D_diag entries must be 0 or 1.")
        for name in ("a_lambda", "b_lambda", "a_omega", "b_omega", "a", "b", "lag_decay"):
            if not getattr(self, name) > 0:
                raise ValueError(f"Hyperparameter {name} must be positive.")
        e.setflags(write=False)
        D.setflags(write=False)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "D_diag", D)

    @classmethod
    def default(
        cls,
        n_variables: int,
        n_states: int,
        persistent: Optional[Sequence[int]] = None,
        e_diagonal: float = 10.0,
        e_off_diagonal: float = 1.0,
        **overrides: float,
    ) -> "PriorHyperparameters":
        """
        Default hyperparameters for N variables and M states.

        Args:
            persistent: Zero-based indices of persistent variables (D = 1).
            e_diagonal: Dirichlet concentration on staying in a state.
            e_off_diagonal: Dirichlet concentration on switching.
            **overrides: Any scalar field, e.g. a_omega=2.
        """
        e = np.full((n_states, n_states), float(e_off_diagonal))
        np.fill_diagonal(e, float(e_diagonal))
        D = np.zeros(n_variables)
        for index in persistent or ():
            D[index] = 1.0
        return cls(e=e, D_diag=D, **overrides)

    @property
    def n_variables(self) -> int:
        return self.D_diag.size

    @property
    def n_states(self) -> int:
        return self.e.shape[0]

    def prior_mean_matrix(self, p: int) -> np.ndarray:
        """Pbar = [diag(D) 0], N x pN."""
        n = self.n_variables
        mean = np.zeros((n, n * p))
        mean[:, :n] = np.diag(self.D_diag)
        return mean

    def lag_variances(self, p: int) -> np.ndarray:
        """Diagonal of Hbar: l^{-decay} repeated N times for lag l = 1..p."""
        lags = np.repeat(np.arange(1, p + 1, dtype=float), self.n_variables)
        return lags ** (-self.lag_decay)

    def coefficient_prior(
        self, p: int, gamma_mu: float, gamma_beta: float
    ) -> tuple:
        """
        Prior of a full row A_n given A0: mean A0_n Ptilde and diagonal variances Htilde.

        Returns:
            (Ptilde, htilde): the N x K matrix [0 Pbar] and the K diagonal
            entries (gamma_mu, gamma_beta * diag(Hbar)).
        """
        n = self.n_variables
        p_tilde = np.hstack([np.zeros((n, 1)), self.prior_mean_matrix(p)])
        h_tilde = np.concatenate([[gamma_mu], gamma_beta * self.lag_variances(p)])
        return p_tilde, h_tilde


def _normal_log_density(x: np.ndarray, mean: np.ndarray, variance: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    variance = np.broadcast_to(np.asarray(variance, dtype=float), x.shape)
    return float(-0.5 * np.sum(LOG_2PI + np.log(variance) + (x - mean) ** 2 / variance))


def log_prior_components(
    params: ModelParameters, hyper: PriorHyperparameters
) -> Dict[str, float]:
    """
    Log-density of each prior factor at the given parameters.

    Assumes the positivity and simplex constraints hold; see evaluate_log_prior.
    """
    p = params.n_lags
    beta_mean = params.A0 @ hyper.prior_mean_matrix(p)
    h_bar = hyper.lag_variances(p)

    components = {
        "mu": _normal_log_density(params.mu, 0.0, params.gamma_mu),
        "beta": _normal_log_density(params.beta, beta_mean, params.gamma_beta * h_bar),
        "alpha": _normal_log_density(params.alpha, 0.0, params.gamma_alpha),
        "lambda1": float(np.sum(ig2_log_density(params.lambda1, hyper.a_lambda, hyper.b_lambda))),
        "omega": float(np.sum(ig2_log_density(params.omega, hyper.a_omega, hyper.b_omega)))
        if params.omega.size
        else 0.0,
        "P": 0.0,
        "gamma_alpha": float(ig2_log_density(params.gamma_alpha, hyper.a, hyper.b)),
        "gamma_mu": float(ig2_log_density(params.gamma_mu, hyper.a, hyper.b)),
        "gamma_beta": float(ig2_log_density(params.gamma_beta, hyper.a, hyper.b)),
    }
    if params.n_states > 1:
        components["P"] = float(
            sum(
                dirichlet_log_pdf(params.P[m], DirichletParams(hyper.e[m]))
                for m in range(params.n_states)
            )
        )
    return components


def evaluate_log_prior(
    params: ModelParameters, hyper: PriorHyperparameters
) -> DensityEvaluation:
    """Log prior with a structured flag when a constraint is violated."""
    if params.constraint_violations():
        return DensityEvaluation.failed(EvaluationStatus.CONSTRAINT_VIOLATION)
    return DensityEvaluation(sum(log_prior_components(params, hyper).values()))


def log_prior(params: ModelParameters, hyper: PriorHyperparameters) -> float:
    """Log prior density; -inf outside the parameter space."""
    return evaluate_log_prior(params, hyper).value
