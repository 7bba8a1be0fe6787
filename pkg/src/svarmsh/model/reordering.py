"""
Post-hoc reordering of the structural equations.

Under the unrestricted scheme the order of the equations is arbitrary: any
row permutation of A0, renormalized to a unit diagonal, describes the same
reduced form. These helpers move a chosen equation to a chosen position.
"""

from typing import Sequence

import numpy as np

from src.svarmsh.model.errors import RestrictionError
from src.svarmsh.model.parameters import ModelParameters
from src.svarmsh.model.restrictions import RestrictionScheme


def reorder_equations(
    params: ModelParameters, order: Sequence[int], scheme: RestrictionScheme
) -> ModelParameters:
    """
    New equation i is old equation order[i], divided by its coefficient on variable i.

    Variances scale by the square of that coefficient; relative variances
    only follow the permutation.

    Raises:
        RestrictionError: If a pivot is zero or the result leaves the scheme.
    """
    order = np.asarray(order, dtype=np.int64)
    n = params.n_variables
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError(f"order must be a permutation of 0..{n - 1}.")
    pivots = params.A0[order, np.arange(n)]
    if np.any(np.abs(pivots) < 1e-12):
        raise RestrictionError("Reordering would put a zero on the diagonal of A0.")

    A0 = params.A0[order] / pivots[:, None]
    alpha = scheme.extract(A0)
    if not np.allclose(scheme.reconstruct(alpha), A0, atol=1e-10):
        raise RestrictionError(f"Reordered A0 violates the {scheme.label} restrictions.")

    result = params.copy()
    result.set_alpha(alpha, scheme)
    result.A = params.A[order] / pivots[:, None]
    result.lambda1 = params.lambda1[order] / pivots**2
    result.omega = params.omega[:, order]
    return result


def order_by_relative_variance(params: ModelParameters, target: int, state: int = 1) -> np.ndarray:
    """
    Permutation that swaps the equation with the largest relative variance in
    `state` (zero-based, at least 1) into position `target`.
    """
    if not 1 <= state < params.n_states:
        raise ValueError(f"state must lie in 1..{params.n_states - 1}.")
    order = np.arange(params.n_variables)
    largest = int(np.argmax(params.omega[state - 1]))
    order[[largest, target]] = order[[target, largest]]
    return order
