"""
This module defines the Gibbs chain, which strings the conditional blocks into
sweeps, and the runners that execute one or several chains.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from src.svarmsh.model import (
    ModelParameters,
    PriorHyperparameters,
    RestrictionScheme,
    StateSequence,
    TimeSeriesData,
    check_sample_size,
    log_likelihood,
    structural_residuals,
)
from src.svarmsh.sampler.blocks import (
    rao_blackwell_records,
    relabel_states,
    sample_A_row,
    sample_alpha_mh,
    sample_lambda1,
    sample_omega,
    sample_shrinkage,
    sample_states_ffbs,
    sample_transition_matrix,
)
from src.svarmsh.sampler.chain_state import ChainState, SamplerContext
from src.svarmsh.sampler.draw_store import DrawStore, describe_run
from src.svarmsh.sampler.draws import DrawLayout, PosteriorDraw
from src.svarmsh.sampler.errors import SamplerBlockError
from src.svarmsh.sampler.sampler_config import SamplerConfig

THREADS_ENV = "SVARMSH_THREADS"
INITIAL_STAY_PROBABILITY = 0.9
RIDGE = 1e-6


def initial_parameters(context: SamplerContext) -> ModelParameters:
    """
    Starting point of every chain.

    alpha = 0, A by ridge least squares given A0(alpha = 0), lambda1 from the
    residual mean squares, omega_m = m + 1 for zero-based state m, P with 0.9
    on the diagonal and unit shrinkage scales.
    """
    scheme, data, X = context.scheme, context.data, context.design.X
    n, m = data.n_variables, context.n_states
    alpha = np.zeros(scheme.n_free)
    A0 = scheme.reconstruct(alpha)
    target = A0 @ data.Y
    gram = X @ X.T
    gram += RIDGE * max(np.trace(gram) / gram.shape[0], 1.0) * np.eye(gram.shape[0])
    A = np.linalg.solve(gram, X @ target.T).T
    lambda1 = np.maximum(np.mean((target - A @ X) ** 2, axis=1), 1e-8)
    omega = np.repeat(np.arange(2.0, m + 1.0)[:, None], n, axis=1)
    if m == 1:
        P = np.ones((1, 1))
    else:
        P = np.full((m, m), (1.0 - INITIAL_STAY_PROBABILITY) / (m - 1))
        np.fill_diagonal(P, INITIAL_STAY_PROBABILITY)
    return ModelParameters.from_alpha(alpha, scheme, A, lambda1, omega, P)


class GibbsChain:
    """
    One Markov chain over (S, P, lambda1, omega, A, alpha, gamma).

    Blocks run in the order states, transition matrix, lambda1, omega, rows
    of A, alpha, shrinkage. A failing block aborts the chain with a
    SamplerBlockError naming the sweep and block.
    """

    def __init__(
        self,
        context: SamplerContext,
        config: SamplerConfig,
        rng: np.random.Generator,
        chain_id: int = 0,
        initial: Optional[ModelParameters] = None,
        logger: Optional[logging.Logger] = None,
    ):
        self.context = context
        self.config = config
        self.rng = rng
        self.chain_id = chain_id
        params = initial.copy() if initial is not None else initial_parameters(context)
        self.state = ChainState(
            params=params,
            states=StateSequence.constant(context.n_observations, context.n_states),
        )
        self.logger = logger or logging.getLogger("svarmsh.sampler")
        self.layout = DrawLayout(
            n_variables=context.data.n_variables,
            n_lags=context.lags,
            n_free=context.scheme.n_free,
            n_states=context.n_states,
        )

    def _block(self, sweep: int, name: str, step: Callable[[], None]) -> None:
        try:
            step()
        except SamplerBlockError:
            raise
        except Exception as e:  # pylint: disable=broad-except
            self.logger.error("Chain %d, sweep %d: block %s failed: %s", self.chain_id, sweep, name, e)
            raise SamplerBlockError(sweep, name, self.chain_id, str(e)) from e

    def sweep(self, index: int) -> None:
        """Runs every conditional block once."""
        ctx, rng, state = self.context, self.rng, self.state
        params = state.params

        def states_step():
            state.states = sample_states_ffbs(params, ctx.data, ctx.design, rng)

        def transition_step():
            params.P, state.transition_accepted = sample_transition_matrix(
                state.states, params.P, ctx.hyper, rng
            )

        def variance_step():
            residuals = structural_residuals(params, ctx.data, ctx.design)
            for n in range(params.n_variables):
                params.lambda1[n] = sample_lambda1(n, params, state.states, residuals, ctx.hyper, rng)
            # conditionals are recorded from the stored draw, see rao_blackwell_records
            for m in range(1, params.n_states):
                for n in range(params.n_variables):
                    params.omega[m - 1, n], _, _ = sample_omega(
                        n, m, params, state.states, residuals, ctx.hyper, rng
                    )

        def coefficient_step():
            for n in range(params.n_variables):
                params.A[n] = sample_A_row(n, params, state.states, ctx, rng)

        def alpha_step():
            alpha, state.alpha_accepted = sample_alpha_mh(params, state.states, ctx, self.config, rng)
            params.set_alpha(alpha, ctx.scheme)

        def shrinkage_step():
            params.gamma_alpha, params.gamma_mu, params.gamma_beta = sample_shrinkage(
                params, ctx.hyper, rng
            )

        self._block(index, "states", states_step)
        self._block(index, "transition_matrix", transition_step)
        self._block(index, "variances", variance_step)
        self._block(index, "coefficients", coefficient_step)
        self._block(index, "alpha", alpha_step)
        self._block(index, "shrinkage", shrinkage_step)

    def labelled_view(self) -> Tuple[ModelParameters, StateSequence]:
        """
        Copy of the current values as they are recorded.

        Relabelling only touches the copy; the chain itself keeps its labels.
        """
        params, states = self.state.params, self.state.states
        if self.config.state_relabeling and params.n_states > 1:
            params, states, _ = relabel_states(params, states)
            return params, states
        return params.copy(), states

    def record(self, index: int) -> Tuple[PosteriorDraw, StateSequence]:
        """Snapshot of the current sweep and the state path it was recorded with."""
        params, states = self.labelled_view()
        ctx = self.context
        residuals = structural_residuals(params, ctx.data, ctx.design)
        rb_a, rb_b = rao_blackwell_records(params, states, residuals, ctx.hyper)
        draw = PosteriorDraw(
            params=params,
            state_counts=states.counts,
            rb_a=rb_a,
            rb_b=rb_b,
            log_likelihood=log_likelihood(params, states, ctx.data, ctx.design),
            accepted=self.state.alpha_accepted,
            sweep=index,
        )
        return draw, states

    def run(self) -> "ChainOutput":
        """Burn-in, then n_draws retained sweeps every `thin` sweeps."""
        config = self.config
        rows = np.empty((config.n_draws, self.layout.width))
        occupancy = np.zeros((self.context.n_observations, self.context.n_states))
        retained = 0
        self.logger.info(
            "Chain %d: %d burn-in sweeps, %d draws, thin %d.",
            self.chain_id,
            config.n_burn,
            config.n_draws,
            config.thin,
        )
        progress = tqdm(
            range(config.total_sweeps),
            desc=f"chain {self.chain_id}",
            disable=not config.progress_bar,
            leave=False,
        )
        for index in progress:
            self.sweep(index)
            after_burn = index - config.n_burn
            if after_burn < 0 or (after_burn + 1) % config.thin:
                continue
            draw, states = self.record(index)
            rows[retained] = self.layout.to_row(draw)
            occupancy[np.arange(states.s.size), states.s] += 1.0
            retained += 1
            self.logger.debug(
                "Chain %d, sweep %d: log-likelihood %.6f, alpha accepted %s.",
                self.chain_id,
                index,
                draw.log_likelihood,
                draw.accepted,
            )
        acceptance = float(np.mean(self.layout.block(rows, "accepted")))
        self.logger.info("Chain %d finished; alpha acceptance rate %.3f.", self.chain_id, acceptance)
        return ChainOutput(rows=rows, smoothed=occupancy / config.n_draws)


@dataclass(frozen=True)
class ChainOutput:
    """
    Retained rows of one chain.

    Attributes:
        rows (np.ndarray): n_draws x width draw matrix.
        smoothed (np.ndarray): T x M share of retained sweeps spent in each state.
    """

    rows: np.ndarray
    smoothed: np.ndarray


def _setup_logger(
    chain_id: int, config: SamplerConfig, log_dir: Optional[Union[str, Path]]
) -> logging.Logger:
    """Configures a logger that writes the chain's progress to a file."""
    logger = logging.getLogger(f"svarmsh.sampler.chain{chain_id}")

    if not config.enable_logging or log_dir is None:
        if logger.hasHandlers():
            logger.handlers.clear()
        logger.addHandler(logging.NullHandler())
        logger.setLevel(logging.CRITICAL + 1)
        logger.propagate = False
        return logger

    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    logger.setLevel(config.log_level)
    logger.propagate = False

    if logger.hasHandlers():
        logger.handlers.clear()

    file_handler = logging.FileHandler(log_dir / f"chain_{chain_id}.log", encoding="utf-8")
    file_handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(file_handler)

    return logger


def _close_logger(logger: logging.Logger) -> None:
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


def _seed_record(seed_sequence: np.random.SeedSequence, chain_id: int) -> dict:
    return {
        "id": chain_id,
        "entropy": seed_sequence.entropy,
        "spawn_key": list(seed_sequence.spawn_key),
    }


def _prepare(
    data: TimeSeriesData,
    scheme: RestrictionScheme,
    hyper: PriorHyperparameters,
    lags: int,
) -> SamplerContext:
    check_sample_size(data, lags)
    if scheme.n_variables != data.n_variables:
        raise ValueError(f"Scheme is for N = {scheme.n_variables}, data has N = {data.n_variables}.")
    return SamplerContext.build(data, scheme, hyper, lags)


def _run_single(
    context: SamplerContext,
    config: SamplerConfig,
    seed_sequence: np.random.SeedSequence,
    chain_id: int,
    log_dir: Optional[Union[str, Path]],
    initial: Optional[ModelParameters] = None,
) -> ChainOutput:
    logger = _setup_logger(chain_id, config, log_dir)
    try:
        chain = GibbsChain(
            context,
            config,
            np.random.default_rng(seed_sequence),
            chain_id=chain_id,
            initial=initial,
            logger=logger,
        )
        return chain.run()
    finally:
        _close_logger(logger)


def run_chain(
    data: TimeSeriesData,
    scheme: RestrictionScheme,
    hyper: PriorHyperparameters,
    config: SamplerConfig,
    rng: Optional[Union[int, np.random.SeedSequence]] = None,
    lags: int = 1,
    chain_id: int = 0,
    log_dir: Optional[Union[str, Path]] = None,
    initial: Optional[ModelParameters] = None,
) -> DrawStore:
    """
    Runs a single chain and returns its draws.

    Args:
        rng: Seed or SeedSequence of the chain; defaults to config.seed.
        lags: VAR order p.
        log_dir: Directory receiving chain_<k>.log when logging is enabled.
        initial: Optional starting point instead of initial_parameters.

    Raises:
        InsufficientDataError: If T <= N(p + 1).
        SamplerBlockError: If a conditional block fails.
    """
    context = _prepare(data, scheme, hyper, lags)
    seed_sequence = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(
        config.seed if rng is None else rng
    )
    output = _run_single(context, config, seed_sequence, chain_id, log_dir, initial)
    metadata = describe_run(context, config)
    metadata["chains"] = [_seed_record(seed_sequence, chain_id)]
    layout = DrawLayout(data.n_variables, lags, scheme.n_free, hyper.n_states)
    return DrawStore(layout, [output.rows], [output.smoothed], metadata)


def _worker_count(n_chains: int) -> int:
    try:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    except ValueError:
        threads = 1
    return max(1, min(n_chains, threads))


def run_chains(
    data: TimeSeriesData,
    scheme: RestrictionScheme,
    hyper: PriorHyperparameters,
    config: SamplerConfig,
    lags: int = 1,
    log_dir: Optional[Union[str, Path]] = None,
    initial: Optional[Sequence[ModelParameters]] = None,
) -> DrawStore:
    """
    Runs config.n_chains independent chains on child streams of config.seed.

    Chains run in separate processes when SVARMSH_THREADS allows more than
    one worker; the draws do not depend on the number of workers.
    """
    context = _prepare(data, scheme, hyper, lags)
    children = np.random.SeedSequence(config.seed).spawn(config.n_chains)
    starts: List[Optional[ModelParameters]] = list(initial) if initial else [None] * config.n_chains
    if len(starts) != config.n_chains:
        raise ValueError("Provide one starting point per chain.")

    workers = _worker_count(config.n_chains)
    logging.getLogger("svarmsh.sampler").info(
        "Running %d chains with %d worker(s).", config.n_chains, workers
    )
    arguments = [
        (context, config, children[k], k, log_dir, starts[k]) for k in range(config.n_chains)
    ]
    if workers == 1:
        outputs = [_run_single(*args) for args in arguments]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outputs = list(executor.map(_run_single, *zip(*arguments)))

    metadata = describe_run(context, config)
    metadata["chains"] = [_seed_record(children[k], k) for k in range(config.n_chains)]
    layout = DrawLayout(data.n_variables, lags, scheme.n_free, hyper.n_states)
    return DrawStore(
        layout,
        [output.rows for output in outputs],
        [output.smoothed for output in outputs],
        metadata,
    )
