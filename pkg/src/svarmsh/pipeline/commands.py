"""
The pipeline commands. Each one loads its inputs, calls the library and hands
the results to a ResultsManager; no command computes anything the library
does not.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.svarmsh.identification import NO_HETEROSKEDASTICITY, check_identification
from src.svarmsh.inference import (
    DEFAULT_IMPORTANCE_DRAWS,
    KASS_RAFTERY_LEGEND,
    MDD_BATCHES,
    SDDR_BATCHES,
    SddrResult,
    estimate_mdd,
    nse_batch_means,
    posterior_model_probabilities,
    potential_scale_reduction,
    sddr_homoskedasticity,
    sddr_joint_homoskedasticity,
    sddr_joint_identification,
    sddr_pair_identification,
)
from src.svarmsh.model import (
    InsufficientDataError,
    ModelParameters,
    RestrictionError,
    StateSequence,
    TimeSeriesData,
    order_by_relative_variance,
    reorder_equations,
    simulate_data,
    spectral_radius,
)
from src.svarmsh.pipeline.csv_io import load_named_matrix, write_csv
from src.svarmsh.pipeline.errors import ConfigError
from src.svarmsh.pipeline.results_manager import ReportBundle, ResultsManager
from src.svarmsh.pipeline.run_config import RunConfig, parse_rows
from src.svarmsh.pipeline.truth import TruthConfig
from src.svarmsh.sampler import DrawStore, run_chains
from src.svarmsh.sampler.draw_store import METADATA_FILE

logger = logging.getLogger("svarmsh.pipeline")

DRAWS_DIR = "draws"
SUMMARY_BATCHES = 100
SINGLE_STATE_NOTE = (
    "Single volatility state: relative variances are not estimated and "
    "identification through heteroskedasticity is unavailable."
)


# --- Posterior summaries ---


def _parameter_labels(store: DrawStore) -> Dict[str, List[str]]:
    """Labels of every element of the parameter blocks, in flattened row-major order."""
    layout, names = store.layout, store.variable_names
    regressors = ["const"] + [f"{name}(-{lag})" for lag in range(1, layout.n_lags + 1) for name in names]
    labels = {
        "alpha": list(store.scheme.parameter_names),
        "A": [f"A[{eq},{reg}]" for eq in names for reg in regressors],
        "lambda1": [f"lambda1[{name}]" for name in names],
        "omega": [f"omega[{m},{name}]" for m in range(2, layout.n_states + 1) for name in names],
        "P": [f"P[{i},{j}]" for i in range(1, layout.n_states + 1) for j in range(1, layout.n_states + 1)],
        "gamma_alpha": ["gamma_alpha"],
        "gamma_mu": ["gamma_mu"],
        "gamma_beta": ["gamma_beta"],
    }
    if layout.n_states == 1:
        del labels["omega"], labels["P"]
    return labels


def _mean_nse(series: np.ndarray, n_chains: int) -> float:
    n_batches = min(SUMMARY_BATCHES, n_chains * (series.size // n_chains // 2))
    if n_batches < 2:
        return float("nan")
    return nse_batch_means(series, n_batches, n_chains)


def posterior_mean_lambda(store: DrawStore) -> np.ndarray:
    """M x N posterior mean of the structural variances lambda_m = lambda1 * omega_m."""
    lambda1 = store.block("lambda1")
    omega = store.block("omega")
    omega_full = np.concatenate([np.ones((lambda1.shape[0], 1, lambda1.shape[1])), omega], axis=1)
    return np.mean(omega_full * lambda1[:, None, :], axis=0)


def posterior_mean_parameters(store: DrawStore) -> ModelParameters:
    """Parameter point at the posterior means of the blocks."""
    mean = {name: store.posterior_mean(name) for name in ("alpha", "A", "lambda1", "omega", "P")}
    return ModelParameters.from_alpha(
        mean["alpha"],
        store.scheme,
        mean["A"],
        mean["lambda1"],
        mean["omega"],
        mean["P"],
        gamma_alpha=float(store.posterior_mean("gamma_alpha")),
        gamma_mu=float(store.posterior_mean("gamma_mu")),
        gamma_beta=float(store.posterior_mean("gamma_beta")),
    )


def summarize_posterior(store: DrawStore) -> ReportBundle:
    """
    Posterior means, standard deviations and NSEs of every parameter, the
    relative-variance table, smoothed state probabilities and, with several
    chains, the potential scale reduction of every parameter.
    """
    labels = _parameter_labels(store)
    rows = []
    flat = {}
    for name, block_labels in labels.items():
        values = store.block(name).reshape(store.n_chains * store.n_draws, -1)
        flat[name] = values
        for k, label in enumerate(block_labels):
            column = values[:, k]
            rows.append(
                {
                    "parameter": label,
                    "mean": float(np.mean(column)),
                    "sd": float(np.std(column, ddof=1)) if column.size > 1 else float("nan"),
                    "nse": _mean_nse(column, store.n_chains),
                }
            )
    bundle = ReportBundle(title="Posterior summary")
    bundle.tables["posterior"] = pd.DataFrame(rows).set_index("parameter")

    n_states = store.layout.n_states
    names = store.variable_names
    if n_states > 1:
        omega = store.block("omega")
        columns = {}
        for m in range(n_states - 1):
            columns[f"mean_state{m + 2}"] = omega[:, m, :].mean(axis=0)
            columns[f"sd_state{m + 2}"] = omega[:, m, :].std(axis=0, ddof=1)
        table = pd.DataFrame(columns, index=pd.Index(names, name="equation"))
        bundle.tables["relative_variances"] = table
        report = check_identification(posterior_mean_lambda(store))
        bundle.records["identification"] = report.to_dict()
    else:
        bundle.notes.append(SINGLE_STATE_NOTE)
        bundle.records["identification"] = {"verdict": NO_HETEROSKEDASTICITY}

    smoothed = store.smoothed_probabilities()
    bundle.tables["smoothed_probabilities"] = pd.DataFrame(
        smoothed,
        columns=[f"state_{m + 1}" for m in range(n_states)],
        index=pd.Index(np.arange(1, smoothed.shape[0] + 1), name="t"),
    )

    if store.n_chains > 1 and store.n_draws > 1:
        rhat_rows = []
        for name, block_labels in labels.items():
            chains = flat[name].reshape(store.n_chains, store.n_draws, -1)
            for label, value in zip(block_labels, potential_scale_reduction(chains)):
                rhat_rows.append({"parameter": label, "rhat": float(value)})
        bundle.tables["convergence"] = pd.DataFrame(rhat_rows).set_index("parameter")

    bundle.records["acceptance_rate"] = [store.acceptance_rate(k) for k in range(store.n_chains)]
    bundle.records["n_chains"] = store.n_chains
    bundle.records["n_draws"] = store.n_draws
    return bundle


def cmd_estimate(config: RunConfig) -> Tuple[DrawStore, ReportBundle]:
    """
    Runs the chains of a configuration, writes the draw store to
    <output>/draws and the posterior summary to <output>/estimate*.
    """
    data = config.load_data()
    scheme = config.build_scheme(data.n_variables)
    hyper = config.hyperparameters(data.n_variables)
    logger.info(
        "Estimating N=%d T=%d p=%d M=%d under scheme %s.",
        data.n_variables,
        data.n_observations,
        config.lags,
        config.n_states,
        scheme.label,
    )
    print(f"Estimating scheme '{scheme.label}' with {config.sampler.n_chains} chain(s)...")
    store = run_chains(data, scheme, hyper, config.sampler, lags=config.lags, log_dir=config.log_dir)
    store.save(config.output_dir / DRAWS_DIR)

    bundle = summarize_posterior(store)
    bundle.title = f"Posterior summary: {scheme.label}"
    ResultsManager(config.output_dir).save_bundle("estimate", bundle)
    return store, bundle


# --- Savage-Dickey ratios ---


def _pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _indices(text: str, n: int, spec: str) -> Tuple[int, ...]:
    rows = parse_rows(text, n)
    if rows is None:
        raise ConfigError(f"Hypothesis '{spec}' needs explicit equations.")
    return rows


def run_hypotheses(store: DrawStore, spec: str, n_batches: int = SDDR_BATCHES) -> List[SddrResult]:
    """
    Evaluates one hypothesis specification.

    Grammar (equations and states one-based):
        identification:all-pairs        every pair, jointly over the non-reference states
        identification:<i>,<j>          one pair, jointly over the non-reference states
        identification:state:<m>        every pair in state m >= 2
        homoskedasticity:each           each equation separately
        homoskedasticity:<i>            one equation
        homoskedasticity:joint:all      all equations at once
        homoskedasticity:joint:<i>,...  a set of equations at once

    Raises:
        ConfigError: For a specification outside the grammar.
    """
    n, m = store.layout.n_variables, store.layout.n_states
    tokens = [token.strip() for token in spec.strip().lower().split(":")]
    kind, rest = tokens[0], tokens[1:]

    if kind == "identification":
        if rest == ["all-pairs"]:
            return [sddr_joint_identification(store, i, j, n_batches=n_batches) for i, j in _pairs(n)]
        if len(rest) == 2 and rest[0] == "state":
            try:
                state = int(rest[1]) - 1
            except ValueError as e:
                raise ConfigError(f"Hypothesis '{spec}' has a malformed state.") from e
            if not 1 <= state < m:
                raise ConfigError(f"Hypothesis '{spec}': state must lie in 2..{m}.")
            return [sddr_pair_identification(store, state, i, j, n_batches=n_batches) for i, j in _pairs(n)]
        if len(rest) == 1:
            pair = _indices(rest[0], n, spec)
            if len(pair) != 2:
                raise ConfigError(f"Hypothesis '{spec}' must name exactly two equations.")
            return [sddr_joint_identification(store, pair[0], pair[1], n_batches=n_batches)]
    elif kind == "homoskedasticity":
        if rest == ["each"]:
            return [sddr_homoskedasticity(store, i, n_batches=n_batches) for i in range(n)]
        if len(rest) == 2 and rest[0] == "joint":
            equations = tuple(range(n)) if rest[1] == "all" else _indices(rest[1], n, spec)
            return [sddr_joint_homoskedasticity(store, equations, n_batches=n_batches)]
        if len(rest) == 1:
            equations = _indices(rest[0], n, spec)
            return [sddr_homoskedasticity(store, i, n_batches=n_batches) for i in equations]
    raise ConfigError(f"Unknown hypothesis '{spec}'.")


def _identification_matrix(results: Sequence[SddrResult], names: Sequence[str]) -> pd.DataFrame:
    """Upper-triangular N x N table of joint identification log SDDRs."""
    matrix = np.full((len(names), len(names)), np.nan)
    for result in results:
        if result.hypothesis.kind == "joint_identification":
            i, j = result.hypothesis.equations
            matrix[min(i, j), max(i, j)] = result.log_sddr
    return pd.DataFrame(matrix, columns=list(names), index=pd.Index(list(names), name="equation"))


def cmd_sddr(
    config: RunConfig,
    hypotheses: Sequence[str],
    store_dir: Optional[Union[str, Path]] = None,
    n_batches: int = SDDR_BATCHES,
) -> ReportBundle:
    """Log SDDR table with NSEs for every requested hypothesis specification."""
    if not hypotheses:
        raise ConfigError("No hypotheses requested.")
    store = DrawStore.load(store_dir or config.output_dir / DRAWS_DIR)
    results: List[SddrResult] = []
    for spec in hypotheses:
        results.extend(run_hypotheses(store, spec, n_batches))

    bundle = ReportBundle(title="Savage-Dickey density ratios", notes=[KASS_RAFTERY_LEGEND])
    bundle.tables["sddr"] = pd.DataFrame(
        [
            {
                "hypothesis": result.hypothesis.label,
                "log_sddr": result.log_sddr,
                "nse": result.nse,
                "log_numerator": result.log_numerator,
                "log_denominator": result.log_denominator,
                "n_draws": result.n_draws,
            }
            for result in results
        ]
    )
    if any(result.hypothesis.kind == "joint_identification" for result in results):
        bundle.tables["identification_matrix"] = _identification_matrix(results, store.variable_names)
    bundle.records["results"] = [result.to_dict() for result in results]
    ResultsManager(config.output_dir).save_bundle("sddr", bundle)
    return bundle


# --- Marginal data densities ---


def _model_names(stores: Sequence[DrawStore], paths: Sequence[Path]) -> List[str]:
    names = [store.metadata["scheme"].get("name") or path.parent.name for store, path in zip(stores, paths)]
    if len(set(names)) == len(names):
        return names
    return [f"{name}#{k + 1}" for k, name in enumerate(names)]


def cmd_mdd(
    config: RunConfig,
    store_dirs: Sequence[Union[str, Path]],
    n_importance: int = DEFAULT_IMPORTANCE_DRAWS,
    n_batches: int = MDD_BATCHES,
) -> ReportBundle:
    """
    Log MDD with NSE for one draw store per scheme; the largest is flagged.

    Importance draws of store k come from child k of the run seed.

    Raises:
        ConfigError: If the stores were produced from different data sets.
    """
    paths = [Path(path) for path in store_dirs] or [config.output_dir / DRAWS_DIR]
    stores = [DrawStore.load(path) for path in paths]
    digests = {store.metadata["data"]["digest"] for store in stores}
    if len(digests) != 1:
        raise ConfigError("Draw stores were produced from different data sets; MDDs are not comparable.")
    data = config.load_data()

    children = np.random.SeedSequence(config.seed).spawn(len(stores))
    results = []
    for store, child in zip(stores, children):
        results.append(
            estimate_mdd(
                store,
                data,
                n_importance=n_importance,
                rng=np.random.default_rng(child),
                n_batches=n_batches,
            )
        )
        logger.info("log MDD %.6f (NSE %.6f) for %s.", results[-1].log_mdd, results[-1].nse, store.scheme.label)

    names = _model_names(stores, paths)
    log_mdds = np.array([result.log_mdd for result in results])
    table = pd.DataFrame(
        {
            "model": names,
            "log_mdd": log_mdds,
            "nse": [result.nse for result in results],
            "best": log_mdds == log_mdds.max(),
            "probability": posterior_model_probabilities(log_mdds),
            "acceptance_fraction": [result.acceptance_fraction for result in results],
            "dimension": [result.dimension for result in results],
        }
    )
    bundle = ReportBundle(
        title="Marginal data densities",
        notes=[f"Numerical standard errors from {n_batches} batch means; equal prior model probabilities."],
    )
    bundle.tables["mdd"] = table
    bundle.records["data_digest"] = digests.pop()
    bundle.records["models"] = [{"model": name, **result.to_dict()} for name, result in zip(names, results)]
    ResultsManager(config.output_dir).save_bundle("mdd", bundle)
    return bundle


def cmd_compare(
    result_files: Sequence[Union[str, Path]], out_dir: Union[str, Path]
) -> pd.DataFrame:
    """
    Ranks the models of one or more saved MDD results by log MDD.

    Raises:
        ConfigError: If the results refer to different data sets or repeat a model name.
    """
    rows, digests = [], set()
    for path in result_files:
        try:
            with open(path, "r", encoding="utf-8") as f:
                saved = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise RuntimeError(f"Failed to load or parse JSON from {path}: {e}") from e
        try:
            digests.add(saved["records"]["data_digest"])
            for model in saved["records"]["models"]:
                rows.append({"model": model["model"], "log_mdd": model["log_mdd"], "nse": model["nse"]})
        except KeyError as e:
            raise ConfigError(f"{path} is not a saved MDD result: missing {e}.") from e
    if len(digests) > 1:
        raise ConfigError("MDD results refer to different data sets.")
    scores = pd.DataFrame(rows, columns=["model", "log_mdd", "nse"])
    if scores["model"].duplicated().any():
        raise ConfigError(f"Model names repeat across results: {scores['model'].tolist()}.")
    if not scores.empty:
        scores["probability"] = posterior_model_probabilities(scores["log_mdd"].to_numpy())

    manager = ResultsManager(out_dir)
    ranked = manager.compare_models(scores)
    bundle = ReportBundle(title="Model comparison", notes=["Equal prior model probabilities."])
    bundle.tables["ranking"] = ranked
    manager.save_bundle("compare", bundle)
    return ranked


# --- Simulation ---


def cmd_simulate(
    truth: TruthConfig,
    out_dir: Union[str, Path],
    T: Optional[int] = None,
    seed: Optional[int] = None,
) -> Tuple[TimeSeriesData, StateSequence]:
    """
    Simulates a data set, writes it to <out>/data.csv and the generating
    parameters with the state path to <out>/truth.json.

    Raises:
        InsufficientDataError: If T does not exceed the N(1 + pN) reduced-form coefficients.
        UnstableSystemError: If the generating system is explosive.
    """
    params = truth.params
    T = truth.T if T is None else int(T)
    seed = truth.seed if seed is None else seed
    n_coefficients = params.n_variables * params.A.shape[1]
    if T <= n_coefficients:
        raise InsufficientDataError(
            T,
            n_coefficients,
            f"T = {T} does not exceed the {n_coefficients} reduced-form coefficients "
            f"of N = {params.n_variables}, p = {params.n_lags}.",
        )

    data, states = simulate_data(params, T, seed=seed, burn=truth.burn, variable_names=truth.variable_names)
    out_dir = Path(out_dir)
    write_csv(data, out_dir / "data.csv")

    sidecar = {
        **truth.to_dict(),
        "T": T,
        "seed": seed,
        "variable_names": list(data.variable_names),
        "spectral_radius": spectral_radius(params),
        "data_digest": data.digest(),
        "state_path": (states.s + 1).tolist(),
    }
    with open(out_dir / "truth.json", "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2)
    print(f"  > Simulated data saved to: {out_dir / 'data.csv'}")
    return data, states


# --- Identification ---


def _resolve_target(target: Union[int, str], names: Sequence[str]) -> int:
    if isinstance(target, str) and target in names:
        return list(names).index(target)
    try:
        index = int(target) - 1
    except ValueError as e:
        raise ConfigError(f"Unknown target equation '{target}'; variables: {list(names)}.") from e
    if not 0 <= index < len(names):
        raise ConfigError(f"Target equation {target} out of range for N = {len(names)}.")
    return index


def cmd_identify(
    source: Union[str, Path],
    out_dir: Union[str, Path],
    target: Optional[Union[int, str]] = None,
    tol: float = 1e-6,
    n_batches: int = SDDR_BATCHES,
) -> ReportBundle:
    """
    Uniqueness verdicts for every row of A0.

    `source` is a draw store directory, judged at the posterior mean of the
    structural variances and cross-referenced with joint identification
    SDDRs, or a CSV of structural variances with one row per state and a
    header of variable names. With a draw store, `target` (name or one-based
    index) moves the equation with the largest state-2 relative variance to
    that position.
    """
    source = Path(source)
    store = None
    if source.is_dir():
        if not (source / METADATA_FILE).exists():
            raise ConfigError(f"{source} is not a draw store directory.")
        store = DrawStore.load(source)
        names, lam = store.variable_names, posterior_mean_lambda(store)
    else:
        names, lam = load_named_matrix(source)

    report = check_identification(lam, tol)
    bundle = ReportBundle(title="Identification of A0", notes=str(report).splitlines())
    bundle.tables["rows"] = pd.DataFrame(
        {"verdict": report.row_verdicts()}, index=pd.Index(list(names), name="equation")
    )
    bundle.records["identification"] = report.to_dict()
    bundle.records["lambda"] = lam

    n_states = lam.shape[0]
    if n_states > 1:
        bundle.tables["relative_variances"] = pd.DataFrame(
            (lam[1:] / lam[0]).T,
            columns=[f"state{m}" for m in range(2, n_states + 1)],
            index=pd.Index(list(names), name="equation"),
        )

    if store is not None and n_states > 1:
        assessments = [sddr_joint_identification(store, i, j, n_batches=n_batches) for i, j in _pairs(len(names))]
        bundle.tables["sddr"] = pd.DataFrame(
            [{"hypothesis": r.hypothesis.label, "log_sddr": r.log_sddr, "nse": r.nse} for r in assessments]
        )
        bundle.notes.append(KASS_RAFTERY_LEGEND)

    if target is not None:
        if store is None or n_states < 2:
            raise ConfigError("Reordering needs a draw store with at least two states.")
        index = _resolve_target(target, names)
        params = posterior_mean_parameters(store)
        order = order_by_relative_variance(params, index)
        reordering = {"order": [names[k] for k in order]}
        try:
            reordered = reorder_equations(params, order, store.scheme)
            reordering["omega"] = reordered.omega
            reordering["A0"] = reordered.A0
        except RestrictionError as e:
            reordering["error"] = str(e)
        bundle.records["reordering"] = reordering

    ResultsManager(out_dir).save_bundle("identify", bundle)
    return bundle
