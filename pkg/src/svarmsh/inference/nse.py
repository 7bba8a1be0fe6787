"""
Numerical standard errors by the method of non-overlapping batch means, and
the between/within-chain convergence diagnostic.

Series from several chains are stacked chain after chain; batches are formed
inside each chain and pooled, so no batch straddles two chains.
"""

import warnings

import numpy as np
from scipy.special import logsumexp

SDDR_BATCHES = 2000
MDD_BATCHES = 1000


def _chain_segments(series: np.ndarray, n_chains: int) -> np.ndarray:
    if n_chains < 1:
        raise ValueError(f"n_chains must be at least 1, got {n_chains}.")
    if series.size % n_chains:
        raise ValueError(
            f"Series of length {series.size} does not split into {n_chains} equal chains."
        )
    return series.reshape(n_chains, -1)


def batch_means(series: np.ndarray, n_batches: int, n_chains: int = 1) -> np.ndarray:
    """
    Means of `n_batches` contiguous batches, formed within each chain.

    The batches are shared out as evenly as the chains allow. Inside a chain
    the batches have equal size and leading draws that do not fill a whole
    batch are dropped.

    Args:
        series: Draws of all chains, stacked chain after chain.
        n_batches: Total number of batches.
        n_chains: Number of equal-length chains in `series`.

    Raises:
        ValueError: If a chain has fewer than two draws per batch.
    """
    series = np.asarray(series, dtype=float).ravel()
    if n_batches < 2:
        raise ValueError(f"Batch means need at least 2 batches, got {n_batches}.")
    segments = _chain_segments(series, n_chains)
    length = segments.shape[1]
    shares = [n_batches // n_chains + (c < n_batches % n_chains) for c in range(n_chains)]
    if length < 2 * shares[0]:
        raise ValueError(
            f"Chains of length {length} are too short for {shares[0]} batches each "
            f"(needs at least {2 * shares[0]})."
        )
    means = []
    for segment, share in zip(segments, shares):
        if share == 0:
            continue
        size = length // share
        kept = segment[length - size * share :]
        means.append(kept.reshape(share, size).mean(axis=1))
    return np.concatenate(means)


def nse_batch_means(series: np.ndarray, n_batches: int, n_chains: int = 1) -> float:
    """Standard deviation of the batch means divided by sqrt(n_batches)."""
    means = batch_means(series, n_batches, n_chains)
    return float(np.std(means, ddof=1) / np.sqrt(n_batches))


def log_mean_exp(log_terms: np.ndarray) -> float:
    """log of the average of exp(log_terms), without overflow."""
    log_terms = np.asarray(log_terms, dtype=float).ravel()
    return float(logsumexp(log_terms) - np.log(log_terms.size))


def nse_log_batch_means(log_terms: np.ndarray, n_batches: int, n_chains: int = 1) -> float:
    """
    NSE of log_mean_exp(log_terms).

    Batch averages are formed on exp(log_terms) and the spread is measured on
    their logarithms. When a batch average underflows to zero the delta-method
    form se(mean) / mean is used instead.
    """
    log_terms = np.asarray(log_terms, dtype=float).ravel()
    finite = log_terms[np.isfinite(log_terms)]
    if finite.size == 0:
        return float("nan")
    shifted = np.exp(log_terms - finite.max())
    means = batch_means(shifted, n_batches, n_chains)
    if np.all(means > 0):
        return float(np.std(np.log(means), ddof=1) / np.sqrt(n_batches))
    return float(np.std(means, ddof=1) / np.sqrt(n_batches) / np.mean(means))


def usable_batches(n_draws: int, requested: int, n_chains: int = 1) -> int:
    """
    Number of batches `n_draws` stacked draws support, warning when it is below `requested`.

    Every chain must hold at least two draws per batch. Returns 0 when not even
    two batches fit.
    """
    capacity = n_chains * ((n_draws // max(n_chains, 1)) // 2)
    if capacity >= requested:
        return requested
    if capacity < 2:
        warnings.warn(
            f"Only {n_draws} draws; numerical standard error is not available.",
            UserWarning,
        )
        return 0
    warnings.warn(
        f"Only {n_draws} draws for {requested} batch means; using {capacity} batches.",
        UserWarning,
    )
    return capacity


def reported_log_nse(log_terms: np.ndarray, requested: int, n_chains: int = 1) -> float:
    """nse_log_batch_means with the batch count reduced to what the chains support; NaN if none."""
    n_batches = usable_batches(np.asarray(log_terms).size, requested, n_chains)
    if n_batches == 0:
        return float("nan")
    return nse_log_batch_means(log_terms, n_batches, n_chains)


def potential_scale_reduction(chains: np.ndarray) -> np.ndarray:
    """
    Between/within-chain variance ratio for every column.

    Args:
        chains: C x S or C x S x d array, one row of draws per chain.

    Returns:
        The square root of the pooled over the within-chain variance, one per
        column; values near one indicate the chains agree.

    Raises:
        ValueError: With fewer than two chains or two draws per chain.
    """
    chains = np.asarray(chains, dtype=float)
    if chains.ndim == 2:
        chains = chains[:, :, None]
    n_chains, n_draws = chains.shape[:2]
    if n_chains < 2 or n_draws < 2:
        raise ValueError("The diagnostic needs at least two chains of two draws.")
    chains = chains.reshape(n_chains, n_draws, -1)
    within = np.mean(np.var(chains, axis=1, ddof=1), axis=0)
    between = n_draws * np.var(np.mean(chains, axis=1), axis=0, ddof=1)
    pooled = (n_draws - 1) / n_draws * within + between / n_draws
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sqrt(pooled / within)
    # constant columns agree trivially
    return np.where(within > 0, ratio, 1.0)
