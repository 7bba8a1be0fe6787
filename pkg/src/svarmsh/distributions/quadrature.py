"""
Adaptive quadrature over the positive half-line, used to check normalization
and moments of the densities in this package.
"""

import warnings
from typing import Callable

import numpy as np
from scipy import integrate


def integrate_density(
    log_density: Callable[[float], float],
    moment: int = 0,
    upper: float = 1.0,
    tail_tol: float = 1e-12,
    max_doublings: int = 200,
) -> float:
    """
    Integrates x^moment * exp(log_density(x)) over (0, infinity).

    The integral over (0, upper) is computed first; segments [U, 2U] are then
    appended, doubling U, until two consecutive segments each contribute
    less than tail_tol relative to the running total.

    Args:
        log_density: Scalar log-density, valid for x > 0.
        moment: Power of x multiplying the density.
        upper: End of the first integration interval; set it near the bulk
               of the mass for widely scaled densities.
        tail_tol: Relative tolerance on the neglected tail.
        max_doublings: Hard cap on the number of appended segments.

    Returns:
        The value of the integral.
    """

    def integrand(x: float) -> float:
        if x <= 0:
            return 0.0
        return float(x**moment * np.exp(log_density(x)))

    options = {"limit": 500, "epsabs": 1e-15, "epsrel": 1e-12}
    total, _ = integrate.quad(integrand, 0.0, upper, **options)
    lower = upper
    small_segments = 0
    for _ in range(max_doublings):
        segment, _ = integrate.quad(integrand, lower, 2.0 * lower, **options)
        total += segment
        lower *= 2.0
        if abs(segment) <= tail_tol * max(abs(total), 1e-300):
            small_segments += 1
            if small_segments == 2:
                return total
        else:
            small_segments = 0

    warnings.warn(
        f"Quadrature tail did not settle after {max_doublings} doublings "
        f"(upper limit {lower:g})."
    )
    return total
