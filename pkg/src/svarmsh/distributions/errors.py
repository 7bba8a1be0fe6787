"""
Exceptions raised by the distribution kernel.
"""


class DistributionDomainError(ValueError):
    """Raised when a density is evaluated outside its support or with invalid parameters."""

    def __init__(self, name: str, value: float, message: str):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value!r}: {message}")


class MomentExistenceError(ValueError):
    """
    Raised when a requested non-central moment does not exist.

    Attributes:
        order (int): The requested moment order k.
        shape (float): The shape parameter a1 that failed the check.
        required (float): The strict lower bound a1 had to exceed.
    """

    def __init__(self, order: int, shape: float, required: float):
        self.order = order
        self.shape = shape
        self.required = required
        super().__init__(
            f"Moment of order {order} requires a1 > {required:g}, got a1 = {shape:g}."
        )
