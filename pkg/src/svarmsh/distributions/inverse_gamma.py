"""
This module implements the inverse gamma 2 (IG2) and inverse gamma 1 (IG1)
distributions in the (shape, scale) parametrization used throughout the
sampler: a variance v ~ IG2(a, b) has density proportional to
v^{-(a+2)/2} exp(-b / (2v)), and its square root follows IG1(a, b).
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from src.svarmsh.distributions.errors import DistributionDomainError, MomentExistenceError

ArrayLike = Union[float, np.ndarray]

LOG_2 = float(np.log(2.0))


@dataclass(frozen=True)
class IG2Params:
    """
    Parameters of an inverse gamma 2 distribution.

    Attributes:
        a (float): Shape (degrees of freedom), strictly positive.
        b (float): Scale, strictly positive, in units of the modelled variance.
    """

    a: float
    b: float

    def __post_init__(self):
        """Validate parameters after initialization."""
        if not np.isfinite(self.a) or self.a <= 0:
            raise ValueError(f"IG2 shape must be positive, got {self.a}.")
        if not np.isfinite(self.b) or self.b <= 0:
            raise ValueError(f"IG2 scale must be positive, got {self.b}.")


@dataclass(frozen=True)
class IG1Params:
    """
    Parameters of an inverse gamma 1 distribution.

    Attributes:
        a (float): Shape, strictly positive.
        b (float): Scale, strictly positive, in units of the squared variable.
    """

    a: float
    b: float

    def __post_init__(self):
        """Validate parameters after initialization."""
        if not np.isfinite(self.a) or self.a <= 0:
            raise ValueError(f"IG1 shape must be positive, got {self.a}.")
        if not np.isfinite(self.b) or self.b <= 0:
            raise ValueError(f"IG1 scale must be positive, got {self.b}.")


def _check_support(name: str, x: ArrayLike) -> np.ndarray:
    values = np.asarray(x, dtype=float)
    if np.any(~(values > 0)):
        bad = values[~(values > 0)].ravel()[0] if values.ndim else float(values)
        raise DistributionDomainError(name, float(bad), "must be strictly positive.")
    return values


def ig2_log_density(x: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """
    Vectorized IG2 log-density over broadcastable arrays of points and parameters.

    No parameter validation is performed; callers holding already-validated
    posterior hyperparameters use this to evaluate many ordinates at once.
    """
    x = _check_support("x", x)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half_a = 0.5 * a
    return (
        -gammaln(half_a)
        + half_a * np.log(0.5 * b)
        - (half_a + 1.0) * np.log(x)
        - 0.5 * b / x
    )


def ig2_log_pdf(x: ArrayLike, p: IG2Params) -> ArrayLike:
    """Log-density of IG2(a, b) at x > 0."""
    return ig2_log_density(x, p.a, p.b)


def ig2_pdf(x: ArrayLike, p: IG2Params) -> ArrayLike:
    """Density of IG2(a, b) at x > 0."""
    return np.exp(ig2_log_pdf(x, p))


def ig2_mean(p: IG2Params) -> float:
    """Mean b / (a - 2); exists only for a > 2."""
    if p.a <= 2:
        raise MomentExistenceError(order=1, shape=p.a, required=2.0)
    return p.b / (p.a - 2.0)


def ig2_mode(p: IG2Params) -> float:
    """Mode b / (a + 2)."""
    return p.b / (p.a + 2.0)


def ig2_sample(
    p: IG2Params, rng: np.random.Generator, size: Optional[Union[int, tuple]] = None
) -> ArrayLike:
    """
    Draws from IG2(a, b) as b divided by a chi-square variate with a degrees of freedom.

    Args:
        p: Distribution parameters.
        rng: The seeded random stream that is advanced by the draw.
        size: Optional output shape; a scalar is returned when omitted.
    """
    return p.b / rng.chisquare(p.a, size=size)


def ig1_log_density(x: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Vectorized IG1 log-density; see ig2_log_density."""
    x = _check_support("x", x)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half_a = 0.5 * a
    return (
        LOG_2
        - gammaln(half_a)
        + half_a * np.log(0.5 * b)
        - (a + 1.0) * np.log(x)
        - 0.5 * b / np.square(x)
    )


def ig1_log_pdf(x: ArrayLike, p: IG1Params) -> ArrayLike:
    """Log-density of IG1(a, b) at x > 0."""
    return ig1_log_density(x, p.a, p.b)


def ig1_sample(
    p: IG1Params, rng: np.random.Generator, size: Optional[Union[int, tuple]] = None
) -> ArrayLike:
    """Draws from IG1(a, b) as the square root of an IG2(a, b) draw."""
    return np.sqrt(p.b / rng.chisquare(p.a, size=size))
