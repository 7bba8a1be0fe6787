"""
Exceptions raised by the posterior sampler.
"""

from typing import Optional


class SamplerBlockError(RuntimeError):
    """Raised when a conditional block fails; aborts the chain."""

    def __init__(self, sweep: int, block: str, chain_id: int, message: Optional[str] = None):
        self.sweep = sweep
        self.block = block
        self.chain_id = chain_id
        detail = f": {message}" if message else ""
        super().__init__(f"Chain {chain_id} failed in block '{block}' at sweep {sweep}{detail}")


class PrecisionMatrixError(ArithmeticError):
    """Raised when the posterior precision of a coefficient row is not positive definite."""

    def __init__(self, row: int, condition_number: float, min_diagonal: float):
        self.row = row
        self.condition_number = condition_number
        self.min_diagonal = min_diagonal
        super().__init__(
            f"Precision of row {row + 1} is not positive definite "
            f"(condition number {condition_number:.3g}, smallest diagonal {min_diagonal:.3g})."
        )
