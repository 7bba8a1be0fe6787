"""
Dirichlet, multivariate normal and multivariate t helpers used by the sampler
and the marginal data density estimator.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import gammaln, xlogy

from src.svarmsh.distributions.errors import DistributionDomainError

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class DirichletParams:
    """
    Concentration parameters of an M-dimensional Dirichlet distribution.

    Attributes:
        e (np.ndarray): Vector of M >= 2 strictly positive concentrations.
    """

    e: np.ndarray

    def __post_init__(self):
        """Validate parameters after initialization."""
        e = np.asarray(self.e, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ValueError("Dirichlet concentration must be a vector of length >= 2.")
        if np.any(~(e > 0)) or not np.all(np.isfinite(e)):
            raise ValueError("Dirichlet concentrations must be finite and positive.")
        object.__setattr__(self, "e", e)


def dirichlet_sample(p: DirichletParams, rng: np.random.Generator) -> np.ndarray:
    """Draws one probability vector; components are renormalized to sum to 1."""
    draw = rng.dirichlet(p.e)
    return draw / draw.sum()


def dirichlet_log_pdf(x: np.ndarray, p: DirichletParams) -> float:
    """Log-density of a probability vector under Dirichlet(e)."""
    x = np.asarray(x, dtype=float)
    if x.shape != p.e.shape:
        raise ValueError(f"Expected a vector of length {p.e.size}, got shape {x.shape}.")
    if np.any(x < 0) or abs(x.sum() - 1.0) > 1e-9:
        raise DistributionDomainError("x", float(x.sum()), "must lie on the probability simplex.")
    return float(gammaln(p.e.sum()) - gammaln(p.e).sum() + np.sum(xlogy(p.e - 1.0, x)))


def cholesky_lower(matrix: np.ndarray) -> np.ndarray:
    """
    Lower Cholesky factor of a symmetric positive-definite matrix.

    Raises:
        numpy.linalg.LinAlgError: If the matrix is not positive definite.
    """
    return linalg.cholesky(np.asarray(matrix, dtype=float), lower=True)


def mvn_sample(
    mean: np.ndarray, cov: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Draws from N(mean, cov) through the Cholesky factor of cov."""
    factor = cholesky_lower(cov)
    return np.asarray(mean, dtype=float) + factor @ rng.standard_normal(factor.shape[0])


def mvn_log_pdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> float:
    """Log-density of N(mean, cov) evaluated through a Cholesky solve."""
    factor = cholesky_lower(cov)
    centred = np.asarray(x, dtype=float) - np.asarray(mean, dtype=float)
    whitened = linalg.solve_triangular(factor, centred, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(factor)))
    dim = factor.shape[0]
    return float(-0.5 * (dim * LOG_2PI + log_det + whitened @ whitened))


def mvt_sample(
    center: np.ndarray, scale: np.ndarray, dof: float, rng: np.random.Generator
) -> np.ndarray:
    """
    Draws from a multivariate t distribution.

    The draw is center + L z / sqrt(w / dof) with L the lower Cholesky factor
    of scale, z standard normal and w chi-square with dof degrees of freedom.

    Raises:
        numpy.linalg.LinAlgError: If scale is not positive definite.
    """
    if dof <= 0:
        raise ValueError(f"Degrees of freedom must be positive, got {dof}.")
    factor = cholesky_lower(scale)
    z = rng.standard_normal(factor.shape[0])
    w = rng.chisquare(dof)
    return np.asarray(center, dtype=float) + (factor @ z) / np.sqrt(w / dof)


def mvt_log_pdf(x: np.ndarray, center: np.ndarray, scale: np.ndarray, dof: float) -> float:
    """Log-density of the multivariate t with the given center, scale and dof."""
    factor = cholesky_lower(scale)
    dim = factor.shape[0]
    centred = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
    whitened = linalg.solve_triangular(factor, centred, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(factor)))
    return float(
        gammaln(0.5 * (dof + dim))
        - gammaln(0.5 * dof)
        - 0.5 * dim * (np.log(dof) + np.log(np.pi))
        - 0.5 * log_det
        - 0.5 * (dof + dim) * np.log1p(whitened @ whitened / dof)
    )
