"""
Ratio distributions of independent inverse gamma variates.

If x ~ IG2(a1, b1) and y ~ IG2(a2, b2) are independent, z = x / y follows
the inverse gamma 2 ratio IG2R(a1, a2, b1, b2). With a1 = b1 and a2 = b2
this is the F(a2, a1) distribution. The IG1 analogue IG1R is the law of the
ratio of two IG1 variates, equivalently the square root of an IG2R variate.
Both densities are evaluated in log space through the log-beta function so
that posterior shapes in the hundreds neither overflow nor underflow.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import betaln

from src.svarmsh.distributions.errors import MomentExistenceError
from src.svarmsh.distributions.inverse_gamma import LOG_2, _check_support

ArrayLike = Union[float, np.ndarray]


def _validate_four(kind: str, a1: float, a2: float, b1: float, b2: float) -> None:
    for name, value in (("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)):
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"{kind} parameter {name} must be positive, got {value}.")


@dataclass(frozen=True)
class IG2RParams:
    """
    Parameters of the inverse gamma 2 ratio distribution.

    Attributes:
        a1 (float): Shape of the numerator variate.
        a2 (float): Shape of the denominator variate.
        b1 (float): Scale of the numerator variate.
        b2 (float): Scale of the denominator variate.
    """

    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        """Validate parameters after initialization."""
        _validate_four("IG2R", self.a1, self.a2, self.b1, self.b2)


@dataclass(frozen=True)
class IG1RParams:
    """Parameters of the inverse gamma 1 ratio distribution (same roles as IG2RParams)."""

    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        """Validate parameters after initialization."""
        _validate_four("IG1R", self.a1, self.a2, self.b1, self.b2)


def _check_order(k: int) -> int:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"Moment order must be a positive integer, got {k!r}.")
    return int(k)


# --- IG2R ---


def ig2r_log_density(
    z: ArrayLike, a1: ArrayLike, a2: ArrayLike, b1: ArrayLike, b2: ArrayLike
) -> ArrayLike:
    """
    Vectorized IG2R log-density over broadcastable points and parameters.

    The term log(b1 + b2 z) is formed with logaddexp so that scales spanning
    many orders of magnitude stay finite.
    """
    z = _check_support("z", z)
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    log_b1 = np.log(np.asarray(b1, dtype=float))
    log_b2 = np.log(np.asarray(b2, dtype=float))
    log_z = np.log(z)
    return (
        -betaln(0.5 * a1, 0.5 * a2)
        + 0.5 * a1 * log_b1
        + 0.5 * a2 * log_b2
        + 0.5 * (a2 - 2.0) * log_z
        - 0.5 * (a1 + a2) * np.logaddexp(log_b1, log_b2 + log_z)
    )


def ig2r_log_pdf(z: ArrayLike, p: IG2RParams) -> ArrayLike:
    """Log-density of IG2R(a1, a2, b1, b2) at z > 0."""
    return ig2r_log_density(z, p.a1, p.a2, p.b1, p.b2)


def ig2r_pdf(z: ArrayLike, p: IG2RParams) -> ArrayLike:
    """Density of IG2R(a1, a2, b1, b2) at z > 0."""
    return np.exp(ig2r_log_pdf(z, p))


def ig2r_moment(k: int, p: IG2RParams) -> float:
    """
    k-th non-central moment of IG2R.

    Raises:
        MomentExistenceError: If a1 <= 2k.
    """
    k = _check_order(k)
    if p.a1 <= 2 * k:
        raise MomentExistenceError(order=k, shape=p.a1, required=2.0 * k)
    log_moment = (
        k * (np.log(p.b1) - np.log(p.b2))
        + betaln(0.5 * (p.a1 - 2 * k), 0.5 * (p.a2 + 2 * k))
        - betaln(0.5 * p.a1, 0.5 * p.a2)
    )
    return float(np.exp(log_moment))


def ig2r_mean(p: IG2RParams) -> float:
    """Mean (b1/b2) a2 / (a1 - 2), for a1 > 2."""
    if p.a1 <= 2:
        raise MomentExistenceError(order=1, shape=p.a1, required=2.0)
    return (p.b1 / p.b2) * p.a2 / (p.a1 - 2.0)


def ig2r_variance(p: IG2RParams) -> float:
    """Closed-form variance, for a1 > 4."""
    if p.a1 <= 4:
        raise MomentExistenceError(order=2, shape=p.a1, required=4.0)
    ratio = p.b1 / p.b2
    return (
        2.0
        * ratio**2
        * p.a2
        * (p.a1 + p.a2 - 2.0)
        / ((p.a1 - 2.0) ** 2 * (p.a1 - 4.0))
    )


def ig2r_sample(
    p: IG2RParams, rng: np.random.Generator, size: Optional[Union[int, tuple]] = None
) -> ArrayLike:
    """Draws z = x / y from independent x ~ IG2(a1, b1), y ~ IG2(a2, b2)."""
    numerator = p.b1 / rng.chisquare(p.a1, size=size)
    denominator = p.b2 / rng.chisquare(p.a2, size=size)
    return numerator / denominator


# --- IG1R ---


def ig1r_log_density(
    z: ArrayLike, a1: ArrayLike, a2: ArrayLike, b1: ArrayLike, b2: ArrayLike
) -> ArrayLike:
    """Vectorized IG1R log-density; see ig2r_log_density."""
    z = _check_support("z", z)
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    log_b1 = np.log(np.asarray(b1, dtype=float))
    log_b2 = np.log(np.asarray(b2, dtype=float))
    log_z = np.log(z)
    return (
        LOG_2
        - betaln(0.5 * a1, 0.5 * a2)
        + 0.5 * a1 * log_b1
        + 0.5 * a2 * log_b2
        + (a2 - 1.0) * log_z
        - 0.5 * (a1 + a2) * np.logaddexp(log_b1, log_b2 + 2.0 * log_z)
    )


def ig1r_log_pdf(z: ArrayLike, p: IG1RParams) -> ArrayLike:
    """Log-density of IG1R(a1, a2, b1, b2) at z > 0."""
    return ig1r_log_density(z, p.a1, p.a2, p.b1, p.b2)


def ig1r_pdf(z: ArrayLike, p: IG1RParams) -> ArrayLike:
    """Density of IG1R(a1, a2, b1, b2) at z > 0."""
    return np.exp(ig1r_log_pdf(z, p))


def ig1r_moment(k: int, p: IG1RParams) -> float:
    """
    k-th non-central moment of IG1R.

    The enforced existence condition is a1 > 2k, although the square
    transform to IG2R only needs a1 > k.

    Raises:
        MomentExistenceError: If a1 <= 2k.
    """
    k = _check_order(k)
    if p.a1 <= 2 * k:
        raise MomentExistenceError(order=k, shape=p.a1, required=2.0 * k)
    log_moment = (
        0.5 * k * (np.log(p.b1) - np.log(p.b2))
        + betaln(0.5 * (p.a1 - k), 0.5 * (p.a2 + k))
        - betaln(0.5 * p.a1, 0.5 * p.a2)
    )
    return float(np.exp(log_moment))


def ig1r_mean(p: IG1RParams) -> float:
    """First moment of IG1R."""
    return ig1r_moment(1, p)


def ig1r_variance(p: IG1RParams) -> float:
    """Variance as the second moment (an IG2R mean) minus the squared first moment."""
    second = ig1r_moment(2, p)
    first = ig1r_moment(1, p)
    return second - first**2


def ig1r_sample(
    p: IG1RParams, rng: np.random.Generator, size: Optional[Union[int, tuple]] = None
) -> ArrayLike:
    """Draws z = x / y from independent x ~ IG1(a1, b1), y ~ IG1(a2, b2)."""
    numerator = np.sqrt(p.b1 / rng.chisquare(p.a1, size=size))
    denominator = np.sqrt(p.b2 / rng.chisquare(p.a2, size=size))
    return numerator / denominator
