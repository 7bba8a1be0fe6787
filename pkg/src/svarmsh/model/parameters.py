"""
This module defines the parameter vector of the model and the latent state path.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.svarmsh.model.restrictions import RestrictionScheme


@dataclass(slots=True)
class ModelParameters:
    """
    Holds one value of every model parameter.

    The structural matrix is derived from alpha through the restriction
    scheme; set_alpha keeps the two in sync.

    Attributes:
        alpha (np.ndarray): r free elements of A0.
        A0 (np.ndarray): N x N structural matrix with unit diagonal.
        A (np.ndarray): N x K matrix [mu, A_1, ..., A_p].
        lambda1 (np.ndarray): N state-1 structural variances.
        omega (np.ndarray): (M - 1) x N variances relative to state 1.
        P (np.ndarray): M x M transition matrix, rows on the simplex.
        gamma_alpha (float): Prior variance scale of alpha.
        gamma_mu (float): Prior variance scale of the constants.
        gamma_beta (float): Prior variance scale of the autoregressive coefficients.
    """

    alpha: np.ndarray
    A0: np.ndarray
    A: np.ndarray
    lambda1: np.ndarray
    omega: np.ndarray
    P: np.ndarray
    gamma_alpha: float = 1.0
    gamma_mu: float = 1.0
    gamma_beta: float = 1.0

    @classmethod
    def from_alpha(
        cls,
        alpha: np.ndarray,
        scheme: RestrictionScheme,
        A: np.ndarray,
        lambda1: np.ndarray,
        omega: Optional[np.ndarray] = None,
        P: Optional[np.ndarray] = None,
        gamma_alpha: float = 1.0,
        gamma_mu: float = 1.0,
        gamma_beta: float = 1.0,
    ) -> "ModelParameters":
        """Builds parameters with A0 reconstructed from alpha; defaults give one state."""
        alpha = np.asarray(alpha, dtype=float).ravel().copy()
        lambda1 = np.asarray(lambda1, dtype=float).ravel().copy()
        n = lambda1.size
        if omega is None:
            omega = np.zeros((0, n))
        if P is None:
            P = np.ones((1, 1))
        return cls(
            alpha=alpha,
            A0=scheme.reconstruct(alpha),
            A=np.array(A, dtype=float, ndmin=2),
            lambda1=lambda1,
            omega=np.array(omega, dtype=float, ndmin=2).reshape(-1, n),
            P=np.array(P, dtype=float, ndmin=2),
            gamma_alpha=float(gamma_alpha),
            gamma_mu=float(gamma_mu),
            gamma_beta=float(gamma_beta),
        )

    @property
    def n_variables(self) -> int:
        return self.lambda1.size

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def n_lags(self) -> int:
        return (self.A.shape[1] - 1) // self.n_variables

    @property
    def mu(self) -> np.ndarray:
        return self.A[:, 0]

    @property
    def beta(self) -> np.ndarray:
        """N x pN autoregressive block [A_1, ..., A_p]."""
        return self.A[:, 1:]

    @property
    def omega_full(self) -> np.ndarray:
        """M x N relative variances with the state-1 row of ones."""
        return np.vstack([np.ones((1, self.n_variables)), self.omega])

    @property
    def lambda_matrix(self) -> np.ndarray:
        """M x N structural variances, lambda_m = lambda1 * omega_m."""
        return self.omega_full * self.lambda1

    def set_alpha(self, alpha: np.ndarray, scheme: RestrictionScheme) -> None:
        self.alpha = np.asarray(alpha, dtype=float).ravel().copy()
        self.A0 = scheme.reconstruct(self.alpha)

    def log_abs_det_A0(self) -> float:
        """log|det A0|, or -inf when A0 is numerically singular."""
        sign, logdet = np.linalg.slogdet(self.A0)
        if sign == 0 or not np.isfinite(logdet):
            return -np.inf
        return float(logdet)

    def copy(self) -> "ModelParameters":
        return ModelParameters(
            alpha=self.alpha.copy(),
            A0=self.A0.copy(),
            A=self.A.copy(),
            lambda1=self.lambda1.copy(),
            omega=self.omega.copy(),
            P=self.P.copy(),
            gamma_alpha=self.gamma_alpha,
            gamma_mu=self.gamma_mu,
            gamma_beta=self.gamma_beta,
        )

    def constraint_violations(self) -> list:
        """Names of the positivity and simplex invariants that fail."""
        problems = []
        if np.any(~(self.lambda1 > 0)):
            problems.append("lambda1")
        if self.omega.size and np.any(~(self.omega > 0)):
            problems.append("omega")
        if np.any(self.P < 0) or not np.allclose(self.P.sum(axis=1), 1.0, atol=1e-9):
            problems.append("P")
        for name in ("gamma_alpha", "gamma_mu", "gamma_beta"):
            if not getattr(self, name) > 0:
                problems.append(name)
        if not np.allclose(np.diag(self.A0), 1.0):
            problems.append("A0 diagonal")
        return problems


@dataclass(frozen=True)
class StateSequence:
    """
    A realization of the hidden Markov chain.

    Labels are zero-based internally: state 0 is the reference state whose
    relative variances are fixed at one.

    Attributes:
        s (np.ndarray): Length-T integer vector with values in 0..M-1.
        n_states (int): M.
    """

    s: np.ndarray
    n_states: int
    _counts: np.ndarray = field(init=False, repr=False, compare=False)
    _transitions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        """Validate labels and cache the counts."""
        s = np.asarray(self.s, dtype=np.int64).ravel()
        if s.size and (s.min() < 0 or s.max() >= self.n_states):
            raise ValueError(f"State labels must lie in 0..{self.n_states - 1}.")
        s.setflags(write=False)
        counts = np.bincount(s, minlength=self.n_states)
        transitions = np.zeros((self.n_states, self.n_states), dtype=np.int64)
        if s.size > 1:
            np.add.at(transitions, (s[:-1], s[1:]), 1)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "_counts", counts)
        object.__setattr__(self, "_transitions", transitions)

    @classmethod
    def constant(cls, length: int, n_states: int, state: int = 0) -> "StateSequence":
        return cls(np.full(length, state, dtype=np.int64), n_states)

    @property
    def counts(self) -> np.ndarray:
        """T_m, the number of periods spent in each state."""
        return self._counts.copy()

    @property
    def transition_counts(self) -> np.ndarray:
        """N_ij, the number of transitions from state i to state j."""
        return self._transitions.copy()

    def __len__(self) -> int:
        return self.s.size

    def permuted(self, order: np.ndarray) -> "StateSequence":
        """Relabels so that new label k is old label order[k]."""
        inverse = np.empty_like(np.asarray(order))
        inverse[np.asarray(order)] = np.arange(len(order))
        return StateSequence(inverse[self.s], self.n_states)
