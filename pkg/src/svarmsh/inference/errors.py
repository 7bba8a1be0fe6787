"""
Exceptions raised by the post-sampling statistics.
"""


class MissingRecordsError(ValueError):
    """Raised when a draw store lacks the records an estimator averages over."""

    def __init__(self, what: str, message: str):
        self.what = what
        super().__init__(f"Draw store has no {what}: {message}")


class EmptyAcceptanceRegionError(RuntimeError):
    """Raised when no importance draw reaches the likelihood threshold of the MDD estimator."""

    def __init__(self, n_importance: int, threshold: float):
        self.n_importance = n_importance
        self.threshold = threshold
        super().__init__(
            f"None of {n_importance} importance draws has log-likelihood >= {threshold:.6g}; "
            "increase the number of importance draws."
        )
