"""
Structured results for densities that can be evaluated at invalid points.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class EvaluationStatus(Enum):
    OK = "ok"
    SINGULAR_A0 = "singular_a0"
    CONSTRAINT_VIOLATION = "constraint_violation"


@dataclass(frozen=True)
class DensityEvaluation:
    """
    A log-density value together with the reason it may be minus infinity.

    Attributes:
        value (float): The log-density, -inf whenever status is not OK.
        status (EvaluationStatus): Why the evaluation failed, if it did.
    """

    value: float
    status: EvaluationStatus = EvaluationStatus.OK

    @property
    def ok(self) -> bool:
        return self.status is EvaluationStatus.OK

    @classmethod
    def failed(cls, status: EvaluationStatus) -> "DensityEvaluation":
        return cls(value=-np.inf, status=status)
