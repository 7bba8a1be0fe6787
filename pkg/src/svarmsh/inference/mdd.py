"""
Marginal data density by the corrected arithmetic mean estimator.

The integral of likelihood times prior is restricted to the region O where
the state-marginal log-likelihood is at least the smallest value it takes at
the posterior draws. Importance draws come from a normal distribution fitted
to the posterior draws in an unconstrained parametrization:

    alpha, A             unchanged
    lambda1, omega,      logarithms
    gamma_*
    rows of P            additive log-ratios against the last column

so the only remaining truncation is a nonsingular A0, which a draw outside
the region fails anyway. The posterior probability of O is taken to be one.
"""

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, solve_triangular
from scipy.special import logsumexp, softmax

from src.svarmsh.distributions import cholesky_lower
from src.svarmsh.inference.errors import EmptyAcceptanceRegionError, MissingRecordsError
from src.svarmsh.inference.nse import MDD_BATCHES, reported_log_nse
from src.svarmsh.model import (
    DesignMatrices,
    ModelParameters,
    PriorHyperparameters,
    ReducibleChainError,
    RestrictionScheme,
    TimeSeriesData,
    build_design,
    filtered_log_likelihood,
    log_prior_components,
)
from src.svarmsh.sampler import DrawLayout, DrawStore

DEFAULT_IMPORTANCE_DRAWS = 20000
THREADS_ENV = "SVARMSH_THREADS"
JITTER = 1e-8
_CHUNK = 500

logger = logging.getLogger("svarmsh.inference")

# block -> how it is mapped to the real line
BLOCK_TRANSFORMS = {
    "alpha": "identity",
    "A": "identity",
    "lambda1": "log",
    "omega": "log",
    "P": "log_ratio",
    "gamma_alpha": "log",
    "gamma_mu": "log",
    "gamma_beta": "log",
}

# block -> prior factors it carries
BLOCK_PRIOR_COMPONENTS = {
    "alpha": ("alpha",),
    "A": ("mu", "beta"),
    "lambda1": ("lambda1",),
    "omega": ("omega",),
    "P": ("P",),
    "gamma_alpha": ("gamma_alpha",),
    "gamma_mu": ("gamma_mu",),
    "gamma_beta": ("gamma_beta",),
}


@dataclass(frozen=True)
class MddResult:
    """
    Estimated log marginal data density.

    Attributes:
        log_mdd (float): The estimate.
        nse (float): Batch-means numerical standard error.
        c_o (float): Likelihood threshold, the smallest posterior-draw log-likelihood.
        n_importance (int): Importance draws used.
        acceptance_fraction (float): Share of importance draws inside the region.
        dimension (int): Dimension of the integrated parameter vector.
        clamped (Tuple[str, ...]): Blocks held at a single value.
    """

    log_mdd: float
    nse: float
    c_o: float
    n_importance: int
    acceptance_fraction: float
    dimension: int
    clamped: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "log_mdd": self.log_mdd,
            "nse": self.nse,
            "c_o": self.c_o,
            "n_importance": self.n_importance,
            "acceptance_fraction": self.acceptance_fraction,
            "dimension": self.dimension,
            "clamped": list(self.clamped),
        }


@dataclass(frozen=True, eq=False)
class ParameterTransform:
    """
    Map between draw rows and the unconstrained vector the importance density lives on.

    Attributes:
        layout (DrawLayout): Column layout of the draw rows.
        scheme (RestrictionScheme): Restrictions turning alpha into A0.
        clamped (Dict[str, np.ndarray]): Blocks held fixed, with their values.
    """

    layout: DrawLayout
    scheme: RestrictionScheme
    clamped: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_rows(
        cls,
        layout: DrawLayout,
        scheme: RestrictionScheme,
        rows: np.ndarray,
        clamped: Optional[Sequence[str]] = None,
    ) -> "ParameterTransform":
        """
        Clamps the named blocks at their value in the first row.

        With `clamped` omitted, every block that is empty or constant across
        all rows is clamped.
        """
        if clamped is None:
            names = []
            for name in BLOCK_TRANSFORMS:
                values = layout.block(rows, name).reshape(rows.shape[0], -1)
                if values.shape[1] == 0 or np.all(values == values[0]):
                    names.append(name)
        else:
            unknown = set(clamped) - set(BLOCK_TRANSFORMS)
            if unknown:
                raise ValueError(f"Unknown parameter blocks {sorted(unknown)}.")
            names = list(clamped)
        fixed = {name: layout.block(rows[:1], name)[0].copy() for name in names}
        return cls(layout=layout, scheme=scheme, clamped=fixed)

    @property
    def free_blocks(self) -> List[str]:
        return [name for name in BLOCK_TRANSFORMS if name not in self.clamped]

    def _width(self, name: str) -> int:
        _, width, _ = self.layout.columns[name]
        if BLOCK_TRANSFORMS[name] == "log_ratio":
            m = self.layout.n_states
            return m * (m - 1)
        return width

    @property
    def dimension(self) -> int:
        return sum(self._width(name) for name in self.free_blocks)

    def forward(self, rows: np.ndarray) -> np.ndarray:
        """S x width draw rows to S x dimension unconstrained vectors."""
        rows = np.atleast_2d(rows)
        pieces = [np.zeros((rows.shape[0], 0))]
        for name in self.free_blocks:
            values = self.layout.block(rows, name).reshape(rows.shape[0], -1)
            kind = BLOCK_TRANSFORMS[name]
            if kind == "log":
                values = np.log(values)
            elif kind == "log_ratio":
                P = self.layout.block(rows, name)
                values = (np.log(P[:, :, :-1]) - np.log(P[:, :, -1:])).reshape(rows.shape[0], -1)
            pieces.append(values)
        return np.hstack(pieces)

    def _split(self, vector: np.ndarray) -> Dict[str, np.ndarray]:
        parts, offset = {}, 0
        for name in self.free_blocks:
            width = self._width(name)
            parts[name] = vector[offset : offset + width]
            offset += width
        return parts

    def natural_blocks(self, vector: np.ndarray) -> Dict[str, np.ndarray]:
        """Every block on its natural scale and shape."""
        shapes = {name: shape for name, shape in self.layout.shapes}
        values = {name: np.asarray(value) for name, value in self.clamped.items()}
        m = self.layout.n_states
        for name, piece in self._split(np.asarray(vector, dtype=float)).items():
            kind = BLOCK_TRANSFORMS[name]
            if kind == "log":
                piece = np.exp(piece)
            elif kind == "log_ratio":
                ratios = np.hstack([piece.reshape(m, m - 1), np.zeros((m, 1))])
                piece = softmax(ratios, axis=1)
            values[name] = piece.reshape(shapes[name])
        return values

    def inverse(self, vector: np.ndarray) -> ModelParameters:
        values = self.natural_blocks(vector)
        return ModelParameters.from_alpha(
            values["alpha"],
            self.scheme,
            values["A"],
            values["lambda1"],
            values["omega"],
            values["P"],
            gamma_alpha=float(values["gamma_alpha"]),
            gamma_mu=float(values["gamma_mu"]),
            gamma_beta=float(values["gamma_beta"]),
        )

    def log_jacobian(self, vector: np.ndarray) -> float:
        """log |d theta / d vector| of the inverse map."""
        total = 0.0
        m = self.layout.n_states
        for name, piece in self._split(np.asarray(vector, dtype=float)).items():
            kind = BLOCK_TRANSFORMS[name]
            if kind == "log":
                total += float(np.sum(piece))
            elif kind == "log_ratio":
                ratios = np.hstack([piece.reshape(m, m - 1), np.zeros((m, 1))])
                total += float(np.sum(ratios - logsumexp(ratios, axis=1, keepdims=True)))
        return total

    def log_prior(self, params: ModelParameters, hyper: PriorHyperparameters) -> float:
        """Log prior of the free blocks; clamped blocks carry a point mass."""
        components = log_prior_components(params, hyper)
        return float(
            sum(components[c] for name in self.free_blocks for c in BLOCK_PRIOR_COMPONENTS[name])
        )


def _state_marginal_log_likelihood(
    params: ModelParameters, data: TimeSeriesData, design: DesignMatrices
) -> float:
    try:
        return filtered_log_likelihood(params, data, design).value
    except ReducibleChainError:
        return -np.inf


def _fit_importance_density(vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior mean and lower Cholesky factor of the covariance, jittered if needed."""
    mean = vectors.mean(axis=0)
    cov = np.atleast_2d(np.cov(vectors, rowvar=False))
    try:
        return mean, cholesky_lower(cov)
    except LinAlgError:
        pass
    jitter = JITTER * max(np.trace(cov) / cov.shape[0], np.finfo(float).tiny)
    for attempt in range(6):
        try:
            factor = cholesky_lower(cov + jitter * 10.0**attempt * np.eye(cov.shape[0]))
        except LinAlgError:
            continue
        warnings.warn(
            f"Posterior covariance of the importance density regularized by {jitter * 10.0**attempt:.3g}.",
            UserWarning,
        )
        return mean, factor
    raise LinAlgError("Posterior covariance of the importance density is not positive definite.")


def _normal_log_density(vectors: np.ndarray, mean: np.ndarray, factor: np.ndarray) -> np.ndarray:
    whitened = solve_triangular(factor, (vectors - mean).T, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(factor)))
    dim = factor.shape[0]
    return -0.5 * (dim * np.log(2.0 * np.pi) + log_det + np.sum(whitened**2, axis=0))


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _evaluate_chunk(
    vectors: np.ndarray,
    transform: ParameterTransform,
    hyper: PriorHyperparameters,
    data: TimeSeriesData,
    design: DesignMatrices,
) -> Tuple[np.ndarray, np.ndarray]:
    """Log-likelihoods and log prior plus log Jacobian of a block of importance draws."""
    log_lik = np.empty(vectors.shape[0])
    log_rest = np.empty(vectors.shape[0])
    for k, vector in enumerate(vectors):
        params = transform.inverse(vector)
        log_lik[k] = _state_marginal_log_likelihood(params, data, design)
        log_rest[k] = transform.log_prior(params, hyper) + transform.log_jacobian(vector)
    return log_lik, log_rest


def estimate_mdd(
    store: DrawStore,
    data: TimeSeriesData,
    scheme: Optional[RestrictionScheme] = None,
    hyper: Optional[PriorHyperparameters] = None,
    n_importance: int = DEFAULT_IMPORTANCE_DRAWS,
    rng: Optional[Union[int, np.random.Generator]] = None,
    n_batches: int = MDD_BATCHES,
    clamped: Optional[Sequence[str]] = None,
) -> MddResult:
    """
    Log marginal data density of the model the draws were produced from.

    Args:
        store: Posterior draws.
        data: The sample the draws were produced from.
        scheme: Restriction scheme; defaults to the one stored with the draws.
        hyper: Prior constants; defaults to the ones stored with the draws.
        n_importance: Number of importance draws J.
        rng: Generator or seed of the importance draws.
        n_batches: Batches for the numerical standard error.
        clamped: Blocks held at their drawn value; by default every block
                 that does not vary across the draws.

    Raises:
        ValueError: If `data` is not the sample the draws were produced from.
        MissingRecordsError: If the store holds no draws.
        EmptyAcceptanceRegionError: If no importance draw falls inside the region.
    """
    store.check_data(data)
    if store.n_draws == 0:
        raise MissingRecordsError("posterior draws", "nothing to fit the importance density to.")
    if n_importance < 1:
        raise ValueError("n_importance must be at least 1.")
    scheme = scheme or store.scheme
    hyper = hyper or store.hyper
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    design = build_design(data, store.lags)
    rows = store.rows()
    transform = ParameterTransform.from_rows(store.layout, scheme, rows, clamped)
    clamped_names = tuple(transform.clamped)

    posterior_log_lik = np.array(
        [
            _state_marginal_log_likelihood(store.layout.from_row(row, scheme).params, data, design)
            for row in rows
        ]
    )
    c_o = float(np.min(posterior_log_lik))
    logger.info(
        "MDD: %d posterior draws, threshold %.6f, %d free dimensions, %s clamped.",
        rows.shape[0],
        c_o,
        transform.dimension,
        ", ".join(clamped_names) or "nothing",
    )

    if transform.dimension == 0:
        # the posterior is a point mass
        return MddResult(
            log_mdd=float(posterior_log_lik[0]),
            nse=0.0,
            c_o=c_o,
            n_importance=n_importance,
            acceptance_fraction=1.0,
            dimension=0,
            clamped=clamped_names,
        )

    mean, factor = _fit_importance_density(transform.forward(rows))
    vectors = mean + rng.standard_normal((n_importance, mean.size)) @ factor.T
    log_s = _normal_log_density(vectors, mean, factor)

    chunks = [vectors[k : k + _CHUNK] for k in range(0, n_importance, _CHUNK)]
    workers = min(_worker_count(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(
                executor.map(lambda chunk: _evaluate_chunk(chunk, transform, hyper, data, design), chunks)
            )
    else:
        results = [_evaluate_chunk(chunk, transform, hyper, data, design) for chunk in chunks]
    log_lik = np.concatenate([r[0] for r in results])
    log_rest = np.concatenate([r[1] for r in results])

    inside = log_lik >= c_o
    if not np.any(inside):
        raise EmptyAcceptanceRegionError(n_importance, c_o)
    log_terms = np.where(inside, log_lik + log_rest - log_s, -np.inf)
    log_mdd = float(logsumexp(log_terms[inside]) - np.log(n_importance))
    result = MddResult(
        log_mdd=log_mdd,
        nse=reported_log_nse(log_terms, n_batches),
        c_o=c_o,
        n_importance=n_importance,
        acceptance_fraction=float(np.mean(inside)),
        dimension=transform.dimension,
        clamped=clamped_names,
    )
    logger.info(
        "MDD: log density %.6f (nse %.6f), %.3f of importance draws inside the region.",
        result.log_mdd,
        result.nse,
        result.acceptance_fraction,
    )
    return result


def posterior_model_probabilities(
    log_mdds: Union[Sequence[float], Mapping[str, float]],
) -> Union[np.ndarray, Dict[str, float]]:
    """Posterior probabilities of competing models under equal prior odds."""
    if isinstance(log_mdds, Mapping):
        names = list(log_mdds)
        probs = softmax(np.array([log_mdds[n] for n in names], dtype=float))
        return {name: float(p) for name, p in zip(names, probs)}
    return softmax(np.asarray(log_mdds, dtype=float))
