"""
This module defines the container for the observed series.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class TimeSeriesData:
    """
    Holds observed series with the pre-sample values that feed the first lags.

    Observations are stored with variables in rows and time in columns.

    Attributes:
        Y (np.ndarray): N x T matrix of estimation-sample observations.
        initial_conditions (np.ndarray): N x p matrix of pre-sample values,
                                         oldest first.
        variable_names (Tuple[str, ...]): One label per variable.
    """

    Y: np.ndarray
    initial_conditions: np.ndarray
    variable_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        """Validate shapes and contents after initialization."""
        Y = np.array(self.Y, dtype=float, ndmin=2)
        initial = np.array(self.initial_conditions, dtype=float, ndmin=2)
        if Y.ndim != 2:
            raise ValueError("Y must be an N x T matrix.")
        if initial.size == 0:
            initial = np.zeros((Y.shape[0], 0))
        if initial.ndim != 2 or initial.shape[0] != Y.shape[0]:
            raise ValueError("initial_conditions must have one row per variable.")
        if not (np.all(np.isfinite(Y)) and np.all(np.isfinite(initial))):
            raise ValueError("Observations must be finite; missing values are not supported.")

        names = tuple(self.variable_names) or tuple(f"y{i + 1}" for i in range(Y.shape[0]))
        if len(names) != Y.shape[0]:
            raise ValueError(
                f"Expected {Y.shape[0]} variable names, got {len(names)}."
            )

        Y.setflags(write=False)
        initial.setflags(write=False)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "initial_conditions", initial)
        object.__setattr__(self, "variable_names", names)

    @classmethod
    def from_observations(
        cls, values: np.ndarray, lags: int, variable_names: Optional[Sequence[str]] = None
    ) -> "TimeSeriesData":
        """
        Splits a full N x (p + T) record into pre-sample and estimation sample.

        The first `lags` columns become the initial conditions.
        """
        values = np.asarray(values, dtype=float)
        if lags < 0 or lags >= values.shape[1]:
            raise ValueError(f"Cannot take {lags} pre-sample columns from {values.shape[1]}.")
        return cls(
            Y=values[:, lags:],
            initial_conditions=values[:, :lags],
            variable_names=tuple(variable_names or ()),
        )

    @property
    def n_variables(self) -> int:
        return self.Y.shape[0]

    @property
    def n_observations(self) -> int:
        return self.Y.shape[1]

    @property
    def n_presample(self) -> int:
        return self.initial_conditions.shape[1]

    def full_sample(self) -> np.ndarray:
        """Pre-sample and estimation sample joined along time."""
        return np.hstack([self.initial_conditions, self.Y])

    def reordered(self, order: Sequence[int]) -> "TimeSeriesData":
        """
        Returns a copy with the variables (and so the equations) permuted.

        Args:
            order: New position -> old index, a permutation of range(N).
        """
        order = list(order)
        if sorted(order) != list(range(self.n_variables)):
            raise ValueError(f"{order} is not a permutation of {self.n_variables} variables.")
        return TimeSeriesData(
            Y=self.Y[order],
            initial_conditions=self.initial_conditions[order],
            variable_names=tuple(self.variable_names[i] for i in order),
        )

    def digest(self) -> str:
        """SHA-256 of the little-endian bytes of the full sample."""
        payload = np.ascontiguousarray(self.full_sample(), dtype="<f8").tobytes()
        return hashlib.sha256(payload).hexdigest()

    def __repr__(self) -> str:
        return (
            f"<TimeSeriesData N={self.n_variables} T={self.n_observations} "
            f"presample={self.n_presample} vars={', '.join(self.variable_names)}>"
        )
