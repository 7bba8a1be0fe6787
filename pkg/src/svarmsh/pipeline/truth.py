"""
Generating parameters for synthetic data sets, read from and written to JSON.

A truth file is an object with the keys A0 (N x N, unit diagonal), A
(N x (1 + pN), constants first), lambda1 (N), omega ((M - 1) x N), P (M x M)
and optionally T, burn, seed and variable_names.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.svarmsh.model import ModelParameters, RestrictionScheme
from src.svarmsh.pipeline.errors import ConfigError

DEFAULT_T = 500
DEFAULT_BURN = 200


def parameters_to_dict(params: ModelParameters) -> Dict[str, Any]:
    return {
        "A0": params.A0.tolist(),
        "A": params.A.tolist(),
        "lambda1": params.lambda1.tolist(),
        "omega": params.omega.tolist(),
        "P": params.P.tolist(),
    }


def parameters_from_dict(record: Dict[str, Any]) -> ModelParameters:
    """
    Builds parameters under the unrestricted scheme from a truth record.

    Raises:
        ConfigError: If a key is missing or A0 does not have a unit diagonal.
    """
    try:
        A0 = np.array(record["A0"], dtype=float, ndmin=2)
        A = np.array(record["A"], dtype=float, ndmin=2)
        lambda1 = np.array(record["lambda1"], dtype=float).ravel()
        n = lambda1.size
        omega = np.array(record.get("omega", []), dtype=float).reshape(-1, n)
        P = np.array(record.get("P", [[1.0]]), dtype=float, ndmin=2)
    except KeyError as e:
        raise ConfigError(f"Truth record is missing {e}.") from e
    except ValueError as e:
        raise ConfigError(f"Malformed truth record: {e}") from e

    if A0.shape != (n, n) or not np.allclose(np.diag(A0), 1.0):
        raise ConfigError("A0 must be N x N with a unit diagonal.")
    if A.shape[0] != n or (A.shape[1] - 1) % n != 0 or A.shape[1] < 1 + n:
        raise ConfigError(f"A must be N x (1 + pN) with N = {n}, got {A.shape}.")
    if P.shape != (omega.shape[0] + 1,) * 2:
        raise ConfigError(f"P must be {omega.shape[0] + 1} x {omega.shape[0] + 1} for {omega.shape[0]} omega rows.")
    if not np.allclose(P.sum(axis=1), 1.0) or np.any(P < 0):
        raise ConfigError("Rows of P must be probability vectors.")
    if np.any(~(lambda1 > 0)) or np.any(~(omega > 0)):
        raise ConfigError("Variances must be positive.")

    scheme = RestrictionScheme.unrestricted(n)
    return ModelParameters.from_alpha(scheme.extract(A0), scheme, A, lambda1, omega, P)


@dataclass(frozen=True)
class TruthConfig:
    """
    A data-generating process and the sample to draw from it.

    Attributes:
        params (ModelParameters): Generating parameters.
        T (int): Estimation-sample length.
        burn (int): Discarded start-up periods.
        seed (Optional[int]): Simulation seed.
        variable_names (Tuple[str, ...]): Column names of the written CSV.
    """

    params: ModelParameters
    T: int = DEFAULT_T
    burn: int = DEFAULT_BURN
    seed: Optional[int] = None
    variable_names: Tuple[str, ...] = field(default=())

    @classmethod
    def default(cls) -> "TruthConfig":
        """Two variables, one lag, two states with relative variances (4, 9) and p_mm = 0.95."""
        record = {
            "A0": [[1.0, 0.5], [-0.3, 1.0]],
            "A": [[0.1, 0.5, 0.1], [-0.1, 0.0, 0.3]],
            "lambda1": [1.0, 2.0],
            "omega": [[4.0, 9.0]],
            "P": [[0.95, 0.05], [0.05, 0.95]],
        }
        return cls(params=parameters_from_dict(record))

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "TruthConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                record = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise RuntimeError(f"Failed to load or parse JSON from {path}: {e}") from e
        return cls(
            params=parameters_from_dict(record),
            T=int(record.get("T", DEFAULT_T)),
            burn=int(record.get("burn", DEFAULT_BURN)),
            seed=record.get("seed"),
            variable_names=tuple(record.get("variable_names", ())),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            **parameters_to_dict(self.params),
            "lags": self.params.n_lags,
            "T": self.T,
            "burn": self.burn,
            "seed": self.seed,
            "variable_names": list(self.variable_names),
        }
