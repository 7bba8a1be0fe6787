"""
Savage-Dickey density ratios for hypotheses on the relative variances.

Every ratio compares the posterior ordinate of a restriction on omega with
its prior ordinate. The posterior ordinate is the average over draws of the
closed-form omega conditionals recorded by the sampler, so no density
estimation is involved. A positive log ratio favours the restriction.

Hypotheses:
    identification (state m, equations i, j)   omega_{m,i} = omega_{m,j}
    joint identification (i, j)                omega_{m,i} = omega_{m,j} for every m >= 1
    homoskedasticity (i)                       omega_{m,i} = 1 for every m >= 1
    joint homoskedasticity (set J)             omega_{m,i} = 1 for every i in J and m >= 1
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.svarmsh.distributions import ig2_log_density, ig2r_log_density
from src.svarmsh.inference.errors import MissingRecordsError
from src.svarmsh.inference.nse import SDDR_BATCHES, log_mean_exp, reported_log_nse
from src.svarmsh.model import PriorHyperparameters
from src.svarmsh.sampler import DrawStore

KASS_RAFTERY_LEGEND = (
    "log SDDR scale (Kass and Raftery): |log| < 1 not worth more than a bare mention, "
    "1 to 3 positive, 3 to 5 strong, above 5 very strong; "
    "positive values favour the restriction, negative values the unrestricted model."
)

IDENTIFICATION = "identification"
JOINT_IDENTIFICATION = "joint_identification"
HOMOSKEDASTICITY = "homoskedasticity"
JOINT_HOMOSKEDASTICITY = "joint_homoskedasticity"


@dataclass(frozen=True)
class Hypothesis:
    """
    A restriction on the relative variances.

    Attributes:
        kind (str): One of the four hypothesis kinds.
        equations (Tuple[int, ...]): Zero-based equations involved.
        state (Optional[int]): Zero-based state for a single-state identification hypothesis.
    """

    kind: str
    equations: Tuple[int, ...]
    state: Optional[int] = None

    @property
    def label(self) -> str:
        """Human-readable form with one-based indices."""
        eqs = [e + 1 for e in self.equations]
        if self.kind == IDENTIFICATION:
            m = self.state + 1
            return f"omega[{m},{eqs[0]}] = omega[{m},{eqs[1]}]"
        if self.kind == JOINT_IDENTIFICATION:
            return f"U[{eqs[0]},{eqs[1]}]"
        if self.kind == HOMOSKEDASTICITY:
            return f"H[{eqs[0]}]"
        return "H[" + ",".join(str(e) for e in eqs) + "]"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "equations": [e + 1 for e in self.equations],
            "state": None if self.state is None else self.state + 1,
            "label": self.label,
        }


@dataclass(frozen=True)
class SddrResult:
    """
    Log Savage-Dickey density ratio of one hypothesis.

    Attributes:
        hypothesis (Hypothesis): The restriction assessed.
        log_numerator (float): Log of the averaged posterior ordinate.
        log_denominator (float): Log of the prior ordinate.
        nse (float): Batch-means numerical standard error of log_sddr.
        n_draws (int): Posterior draws averaged over.
    """

    hypothesis: Hypothesis
    log_numerator: float
    log_denominator: float
    nse: float
    n_draws: int

    @property
    def log_sddr(self) -> float:
        return self.log_numerator - self.log_denominator

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hypothesis": self.hypothesis.to_dict(),
            "log_numerator": self.log_numerator,
            "log_denominator": self.log_denominator,
            "log_sddr": self.log_sddr,
            "nse": self.nse,
            "n_draws": self.n_draws,
        }


def _records(store: DrawStore) -> Tuple[np.ndarray, np.ndarray]:
    """rb_a and rb_b of every draw, each S x (M - 1) x N."""
    if store.layout.n_states < 2:
        raise MissingRecordsError(
            "Rao-Blackwell records", "a single-state model has no relative variances."
        )
    if "rb_a" not in store.layout.columns or store.n_draws == 0:
        raise MissingRecordsError("Rao-Blackwell records", "the store holds no omega conditionals.")
    return store.block("rb_a"), store.block("rb_b")


def _check_equations(store: DrawStore, equations: Sequence[int]) -> Tuple[int, ...]:
    n = store.layout.n_variables
    equations = tuple(int(e) for e in equations)
    if not equations:
        raise ValueError("At least one equation is required.")
    if any(e < 0 or e >= n for e in equations):
        raise ValueError(f"Equations must lie in 0..{n - 1}, got {list(equations)}.")
    if len(set(equations)) != len(equations):
        raise ValueError(f"Equations must be distinct, got {list(equations)}.")
    return equations


def _result(
    hypothesis: Hypothesis,
    log_terms: np.ndarray,
    log_denominator: float,
    n_batches: int,
    n_chains: int,
) -> SddrResult:
    # log_terms holds the draws of every chain, one chain after another
    return SddrResult(
        hypothesis=hypothesis,
        log_numerator=log_mean_exp(log_terms),
        log_denominator=float(log_denominator),
        nse=reported_log_nse(log_terms, n_batches, n_chains),
        n_draws=int(log_terms.size),
    )


def _prior_equality_ordinate(hyper: PriorHyperparameters) -> float:
    return float(ig2r_log_density(1.0, hyper.a_omega, hyper.a_omega, hyper.b_omega, hyper.b_omega))


def _prior_unit_ordinate(hyper: PriorHyperparameters) -> float:
    return float(ig2_log_density(1.0, hyper.a_omega, hyper.b_omega))


def sddr_pair_identification(
    store: DrawStore,
    state: int,
    i: int,
    j: int,
    hyper: Optional[PriorHyperparameters] = None,
    n_batches: int = SDDR_BATCHES,
) -> SddrResult:
    """
    Log SDDR of omega_{state,i} = omega_{state,j}.

    Args:
        state: Zero-based state, 1..M-1.
        i, j: Zero-based distinct equations.
        hyper: Prior constants; defaults to the prior the draws were produced under.

    Raises:
        MissingRecordsError: If the store has no omega conditionals.
    """
    hyper = hyper or store.hyper
    rb_a, rb_b = _records(store)
    i, j = _check_equations(store, (i, j))
    if not 1 <= state < store.layout.n_states:
        raise ValueError(f"State must lie in 1..{store.layout.n_states - 1}, got {state}.")
    k = state - 1
    log_terms = ig2r_log_density(1.0, rb_a[:, k, i], rb_a[:, k, j], rb_b[:, k, i], rb_b[:, k, j])
    return _result(
        Hypothesis(IDENTIFICATION, (i, j), state),
        log_terms,
        _prior_equality_ordinate(hyper),
        n_batches,
        store.n_chains,
    )


def sddr_joint_identification(
    store: DrawStore,
    i: int,
    j: int,
    hyper: Optional[PriorHyperparameters] = None,
    n_batches: int = SDDR_BATCHES,
) -> SddrResult:
    """Log SDDR of omega_{m,i} = omega_{m,j} jointly for every non-reference state m."""
    hyper = hyper or store.hyper
    rb_a, rb_b = _records(store)
    i, j = _check_equations(store, (i, j))
    per_state = ig2r_log_density(1.0, rb_a[:, :, i], rb_a[:, :, j], rb_b[:, :, i], rb_b[:, :, j])
    n_free_states = rb_a.shape[1]
    return _result(
        Hypothesis(JOINT_IDENTIFICATION, (i, j)),
        per_state.sum(axis=1),
        n_free_states * _prior_equality_ordinate(hyper),
        n_batches,
        store.n_chains,
    )


def sddr_homoskedasticity(
    store: DrawStore,
    i: int,
    hyper: Optional[PriorHyperparameters] = None,
    n_batches: int = SDDR_BATCHES,
) -> SddrResult:
    """Log SDDR of omega_{m,i} = 1 for every non-reference state m."""
    result = sddr_joint_homoskedasticity(store, (i,), hyper, n_batches)
    return SddrResult(
        hypothesis=Hypothesis(HOMOSKEDASTICITY, result.hypothesis.equations),
        log_numerator=result.log_numerator,
        log_denominator=result.log_denominator,
        nse=result.nse,
        n_draws=result.n_draws,
    )


def sddr_joint_homoskedasticity(
    store: DrawStore,
    equations: Sequence[int],
    hyper: Optional[PriorHyperparameters] = None,
    n_batches: int = SDDR_BATCHES,
) -> SddrResult:
    """Log SDDR of omega_{m,i} = 1 for every i in `equations` and every non-reference state m."""
    hyper = hyper or store.hyper
    rb_a, rb_b = _records(store)
    equations = _check_equations(store, equations)
    index = list(equations)
    per_entry = ig2_log_density(1.0, rb_a[:, :, index], rb_b[:, :, index])
    n_entries = rb_a.shape[1] * len(index)
    return _result(
        Hypothesis(JOINT_HOMOSKEDASTICITY, equations),
        per_entry.reshape(per_entry.shape[0], -1).sum(axis=1),
        n_entries * _prior_unit_ordinate(hyper),
        n_batches,
        store.n_chains,
    )
