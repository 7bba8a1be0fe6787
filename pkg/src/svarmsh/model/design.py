"""
Construction of the lagged regressor matrix.
"""

from dataclasses import dataclass

import numpy as np

from src.svarmsh.model.errors import InsufficientDataError
from src.svarmsh.model.time_series_data import TimeSeriesData


@dataclass(frozen=True)
class DesignMatrices:
    """
    Right-hand-side variables of every equation.

    Attributes:
        X (np.ndarray): K x T matrix; column t stacks (1, y_{t-1}', ..., y_{t-p}').
        p (int): Lag order.
    """

    X: np.ndarray
    p: int

    @property
    def n_regressors(self) -> int:
        return self.X.shape[0]

    @property
    def n_observations(self) -> int:
        return self.X.shape[1]


def minimum_observations(n_variables: int, p: int) -> int:
    """Smallest T accepted for estimation: T must exceed N(p + 1)."""
    return n_variables * (p + 1) + 1


def check_sample_size(data: TimeSeriesData, p: int) -> None:
    """
    Raises:
        InsufficientDataError: If T <= N(p + 1).
    """
    required = minimum_observations(data.n_variables, p)
    if data.n_observations < required:
        raise InsufficientDataError(
            data.n_observations,
            required - 1,
            f"T = {data.n_observations} observations do not exceed "
            f"N(p + 1) = {required - 1} for N = {data.n_variables}, p = {p}.",
        )


def build_design(data: TimeSeriesData, p: int) -> DesignMatrices:
    """
    Builds X with K = 1 + pN rows from the observations and their pre-sample.

    The last p pre-sample columns supply the lags of the first observations.

    Raises:
        ValueError: If p < 1.
        InsufficientDataError: If fewer than p pre-sample columns exist or
                               the estimation sample is empty.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"Lag order must be an integer >= 1, got {p}.")
    p = int(p)
    if data.n_presample < p:
        raise InsufficientDataError(
            data.n_presample,
            p - 1,
            f"{p} lags need {p} pre-sample columns, got {data.n_presample}.",
        )
    if data.n_observations < 1:
        raise InsufficientDataError(0, 0)

    n, t_count = data.n_variables, data.n_observations
    history = np.hstack([data.initial_conditions[:, data.n_presample - p :], data.Y])

    X = np.empty((1 + p * n, t_count))
    X[0] = 1.0
    for lag in range(1, p + 1):
        X[1 + (lag - 1) * n : 1 + lag * n] = history[:, p - lag : p - lag + t_count]
    X.setflags(write=False)
    return DesignMatrices(X=X, p=p)
