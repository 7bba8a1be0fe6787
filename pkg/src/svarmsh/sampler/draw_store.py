"""
Storage of posterior draws: one binary matrix per chain plus a JSON sidecar.

Layout on disk:
    metadata.json          schema version, run configuration, scheme, prior,
                           data digest, column layout, per-chain files and seeds
    chain_<k>.draws.bin    little-endian float64, row-major, one row per draw
    chain_<k>.states.bin   little-endian float64, T x M smoothed state probabilities
"""

import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union

import numpy as np

from src.svarmsh.model import (
    ModelParameters,
    PriorHyperparameters,
    RestrictionScheme,
    TimeSeriesData,
)
from src.svarmsh.sampler.chain_state import SamplerContext
from src.svarmsh.sampler.draws import DrawLayout, PosteriorDraw
from src.svarmsh.sampler.sampler_config import SamplerConfig

SCHEMA_VERSION = 1
METADATA_FILE = "metadata.json"
_PRIOR_SCALARS = ("a_lambda", "b_lambda", "a_omega", "b_omega", "a", "b", "lag_decay")


def convert_for_json(obj: Any) -> Any:
    """Recursively converts numpy types to native Python types for JSON serialization."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: convert_for_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_for_json(v) for v in obj]
    return obj


def describe_run(context: SamplerContext, config: SamplerConfig) -> Dict[str, Any]:
    """Metadata shared by every chain of one run."""
    scheme, hyper = context.scheme, context.hyper
    layout = DrawLayout(
        n_variables=context.data.n_variables,
        n_lags=context.lags,
        n_free=scheme.n_free,
        n_states=hyper.n_states,
    )
    return {
        "schema_version": SCHEMA_VERSION,
        "config": dataclasses.asdict(config),
        "lags": context.lags,
        "scheme": {
            "name": scheme.preset_name,
            "parameter_names": list(scheme.parameter_names),
            "Q": scheme.Q,
            "q": scheme.q,
        },
        "prior": {
            "e": hyper.e,
            "D_diag": hyper.D_diag,
            **{name: getattr(hyper, name) for name in _PRIOR_SCALARS},
        },
        "data": {
            "digest": context.data.digest(),
            "variable_names": list(context.data.variable_names),
            "n_observations": context.data.n_observations,
        },
        "layout": layout.to_metadata(),
        "chains": [],
    }


class DrawStore:
    """
    Retained draws of one or more chains, immutable once built.

    Attributes:
        layout (DrawLayout): Column layout shared by every chain.
        metadata (dict): Run description; see describe_run.
    """

    def __init__(
        self,
        layout: DrawLayout,
        chains: Sequence[np.ndarray],
        smoothed: Sequence[np.ndarray],
        metadata: Dict[str, Any],
    ):
        if not chains:
            raise ValueError("A draw store needs at least one chain.")
        if len(smoothed) != len(chains):
            raise ValueError("Every chain needs its smoothed state probabilities.")
        lengths = {rows.shape[0] for rows in chains}
        if len(lengths) != 1:
            raise ValueError(f"Chains hold different numbers of draws: {sorted(lengths)}.")
        self.layout = layout
        self._chains = [self._frozen(rows, (-1, layout.width)) for rows in chains]
        self._smoothed = [self._frozen(probs, (-1, layout.n_states)) for probs in smoothed]
        self.metadata = metadata

    @staticmethod
    def _frozen(values: np.ndarray, shape: tuple) -> np.ndarray:
        array = np.array(values, dtype=float).reshape(shape)
        array.setflags(write=False)
        return array

    # --- Run description ---

    @property
    def n_chains(self) -> int:
        return len(self._chains)

    @property
    def n_draws(self) -> int:
        """Retained draws per chain."""
        return self._chains[0].shape[0]

    @property
    def lags(self) -> int:
        return int(self.metadata["lags"])

    @property
    def scheme(self) -> RestrictionScheme:
        info = self.metadata["scheme"]
        q = np.asarray(info["q"], dtype=float)
        Q = np.asarray(info["Q"], dtype=float).reshape(q.size, -1)
        return RestrictionScheme(
            Q=Q,
            q=q,
            preset_name=info.get("name"),
            parameter_names=tuple(info.get("parameter_names", ())),
        )

    @property
    def hyper(self) -> PriorHyperparameters:
        prior = self.metadata["prior"]
        return PriorHyperparameters(
            e=np.asarray(prior["e"], dtype=float),
            D_diag=np.asarray(prior["D_diag"], dtype=float),
            **{name: float(prior[name]) for name in _PRIOR_SCALARS},
        )

    @property
    def variable_names(self) -> List[str]:
        return list(self.metadata["data"]["variable_names"])

    def check_data(self, data: TimeSeriesData) -> None:
        """Raises ValueError unless `data` is the sample the draws were produced from."""
        expected = self.metadata["data"]["digest"]
        if data.digest() != expected:
            raise ValueError("Data digest does not match the sample these draws were produced from.")

    # --- Access ---

    def chain_rows(self, chain: int) -> np.ndarray:
        return self._chains[chain]

    def rows(self, chain: Optional[int] = None) -> np.ndarray:
        """All rows of one chain, or of every chain stacked in chain order."""
        if chain is not None:
            return self._chains[chain]
        return np.vstack(self._chains)

    def block(self, name: str, chain: Optional[int] = None) -> np.ndarray:
        return self.layout.block(self.rows(chain), name)

    def draw(self, chain: int, index: int) -> PosteriorDraw:
        return self.layout.from_row(self._chains[chain][index], self.scheme)

    def iter_draws(self, chain: Optional[int] = None) -> Iterator[PosteriorDraw]:
        scheme = self.scheme
        chains = range(self.n_chains) if chain is None else [chain]
        for k in chains:
            for row in self._chains[k]:
                yield self.layout.from_row(row, scheme)

    def parameters(self, chain: int, index: int) -> ModelParameters:
        return self.draw(chain, index).params

    def smoothed_probabilities(self, chain: Optional[int] = None) -> np.ndarray:
        """T x M posterior state probabilities, averaged over chains unless one is named."""
        if chain is not None:
            return self._smoothed[chain]
        return np.mean(self._smoothed, axis=0)

    def acceptance_rate(self, chain: Optional[int] = None) -> float:
        return float(np.mean(self.block("accepted", chain)))

    def posterior_mean(self, name: str) -> np.ndarray:
        return self.block(name).mean(axis=0)

    # --- Persistence ---

    def save(self, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        metadata = dict(self.metadata)
        chains_info = list(metadata.get("chains", []))
        for k in range(self.n_chains):
            draws_file, states_file = f"chain_{k}.draws.bin", f"chain_{k}.states.bin"
            self._chains[k].astype("<f8").tofile(directory / draws_file)
            self._smoothed[k].astype("<f8").tofile(directory / states_file)
            info = dict(chains_info[k]) if k < len(chains_info) else {"id": k}
            info.update(
                {
                    "draws_file": draws_file,
                    "states_file": states_file,
                    "n_draws": self.n_draws,
                }
            )
            if k < len(chains_info):
                chains_info[k] = info
            else:
                chains_info.append(info)
        metadata["chains"] = chains_info
        with open(directory / METADATA_FILE, "w", encoding="utf-8") as f:
            json.dump(convert_for_json(metadata), f, indent=2)
        return directory

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "DrawStore":
        """
        Reads a store written by save.

        Raises:
            RuntimeError: If the sidecar or a chain file cannot be read.
        """
        directory = Path(directory)
        try:
            with open(directory / METADATA_FILE, "r", encoding="utf-8") as f:
                metadata = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise RuntimeError(f"Failed to load draw store metadata from {directory}: {e}") from e
        if metadata.get("schema_version") != SCHEMA_VERSION:
            raise RuntimeError(
                f"Unsupported draw store schema {metadata.get('schema_version')} in {directory}."
            )

        layout = _layout_from_metadata(metadata)
        chains, smoothed = [], []
        for info in metadata["chains"]:
            try:
                rows = np.fromfile(directory / info["draws_file"], dtype="<f8")
                probs = np.fromfile(directory / info["states_file"], dtype="<f8")
            except OSError as e:
                raise RuntimeError(f"Failed to read chain {info.get('id')} in {directory}: {e}") from e
            chains.append(rows.reshape(-1, layout.width))
            smoothed.append(probs.reshape(-1, layout.n_states))
        return cls(layout, chains, smoothed, metadata)

    @classmethod
    def merge(cls, stores: Sequence["DrawStore"]) -> "DrawStore":
        """Concatenates the chains of stores produced by the same run."""
        if not stores:
            raise ValueError("Nothing to merge.")
        first = stores[0]
        for other in stores[1:]:
            if other.layout != first.layout or other.metadata["data"] != first.metadata["data"]:
                raise ValueError("Only stores of the same model and data can be merged.")
        metadata = dict(first.metadata)
        metadata["chains"] = [dict(info) for store in stores for info in store.metadata.get("chains", [])]
        for k, info in enumerate(metadata["chains"]):
            info["id"] = k
        chains = [store.chain_rows(k) for store in stores for k in range(store.n_chains)]
        smoothed = [store.smoothed_probabilities(k) for store in stores for k in range(store.n_chains)]
        return cls(first.layout, chains, smoothed, metadata)


def _layout_from_metadata(metadata: Dict[str, Any]) -> DrawLayout:
    shapes = {entry["name"]: entry["shape"] for entry in metadata["layout"]}
    n_variables = shapes["lambda1"][0]
    return DrawLayout(
        n_variables=n_variables,
        n_lags=(shapes["A"][1] - 1) // n_variables,
        n_free=shapes["alpha"][0],
        n_states=shapes["P"][0],
    )
