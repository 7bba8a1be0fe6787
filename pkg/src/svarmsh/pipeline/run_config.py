"""
Run configuration: an INI file with the sections [data], [model], [prior],
[sampler] and [output], overridable from the command line.

Example:
    [data]
    path = macro.csv

    [model]
    lags = 4
    states = 2
    scheme = taylor_rule_with_money      ; or file:Q.csv,q.csv
    restricted_rows = 4                  ; 'all' or one-based rows
    persistent = 1,2,3,5,6
    equation_order = p,gdp,cp,m,FF,uc

    [prior]
    a_omega = 1
    b_omega = 3

    [sampler]
    burn = 5000
    draws = 20000
    chains = 2

    [output]
    directory = results/twm
    seed = 17

Relative paths are resolved against the directory of the file.
"""

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from src.svarmsh.model import (
    PriorHyperparameters,
    RestrictionError,
    RestrictionScheme,
    SchemeFactory,
    TimeSeriesData,
    compose_restricted_rows,
)
from src.svarmsh.pipeline.csv_io import load_csv, load_matrix
from src.svarmsh.pipeline.errors import ConfigError
from src.svarmsh.sampler import SamplerConfig

SCHEME_FILE_PREFIX = "file:"

_SECTIONS = {
    "data": {"path"},
    "model": {"lags", "states", "scheme", "restricted_rows", "persistent", "equation_order"},
    "prior": {
        "a_lambda",
        "b_lambda",
        "a_omega",
        "b_omega",
        "a",
        "b",
        "lag_decay",
        "e_diagonal",
        "e_off_diagonal",
    },
    "sampler": {
        "burn",
        "draws",
        "thin",
        "chains",
        "mh_dof",
        "mh_scale",
        "relabel_states",
        "progress_bar",
        "enable_logging",
    },
    "output": {"directory", "seed"},
}

# sampler keys -> SamplerConfig fields
_SAMPLER_FIELDS = {
    "burn": ("n_burn", int),
    "draws": ("n_draws", int),
    "thin": ("thin", int),
    "chains": ("n_chains", int),
    "mh_dof": ("mh_dof", float),
    "mh_scale": ("mh_scale_mult", float),
}
_SAMPLER_FLAGS = {
    "relabel_states": "state_relabeling",
    "progress_bar": "progress_bar",
    "enable_logging": "enable_logging",
}


def parse_rows(text: str, n_variables: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """
    Parses 'all' or a comma list of one-based indices into zero-based indices.

    Returns:
        None for 'all', otherwise the sorted zero-based indices.
    """
    text = str(text).strip()
    if text.lower() == "all":
        return None
    try:
        rows = sorted({int(token) - 1 for token in text.split(",") if token.strip()})
    except ValueError as e:
        raise ConfigError(f"Cannot read row list '{text}': {e}") from e
    if not rows or rows[0] < 0 or (n_variables is not None and rows[-1] >= n_variables):
        raise ConfigError(f"Row list '{text}' is empty or out of range.")
    return tuple(rows)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a pipeline command needs besides its own arguments.

    Attributes:
        data_path (Optional[Path]): CSV data set.
        lags (int): VAR order p. Defaults to 1.
        n_states (int): Number of volatility states M. Defaults to 2.
        scheme (str): Preset name or 'file:<Q.csv>,<q.csv>'.
        restricted_rows (Optional[Tuple[int, ...]]): Zero-based rows keeping the
                                                     preset pattern; None keeps all.
        persistent (Tuple[int, ...]): Zero-based variables whose first own lag
                                      is shrunk towards one.
        equation_order (Tuple[str, ...]): Variable names in the order the
                                          equations are estimated; empty keeps the file order.
        prior (Dict[str, float]): Overrides of the default prior constants.
        sampler (SamplerConfig): Sampler settings; its seed is the run seed.
        output_dir (Path): Directory receiving every artefact.
    """

    data_path: Optional[Path] = None
    lags: int = 1
    n_states: int = 2
    scheme: str = "unrestricted"
    restricted_rows: Optional[Tuple[int, ...]] = None
    persistent: Tuple[int, ...] = ()
    equation_order: Tuple[str, ...] = ()
    prior: Dict[str, float] = field(default_factory=dict)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    output_dir: Path = Path("results")

    def __post_init__(self):
        """Validate parameters after initialization."""
        if self.lags < 1:
            raise ConfigError("model.lags must be at least 1.")
        if self.n_states < 1:
            raise ConfigError("model.states must be at least 1.")
        unknown = set(self.prior) - _SECTIONS["prior"]
        if unknown:
            raise ConfigError(f"Unknown prior settings: {sorted(unknown)}.")

    @property
    def seed(self) -> Optional[int]:
        return self.sampler.seed

    @property
    def log_dir(self) -> Path:
        return self.output_dir / "logs"

    # --- Reading ---

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        """
        Reads an INI configuration.

        Raises:
            RuntimeError: If the file cannot be read.
            ConfigError: For unknown sections or keys and malformed values.
        """
        path = Path(path)
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path, "r", encoding="utf-8") as f:
                parser.read_file(f)
        except (OSError, configparser.Error) as e:
            raise RuntimeError(f"Failed to load or parse config from {path}: {e}") from e
        return cls.from_parser(parser, base_dir=path.resolve().parent)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser, base_dir: Path = Path(".")) -> "RunConfig":
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigError(f"Unknown config section [{section}].")
            unknown = set(parser[section]) - _SECTIONS[section]
            if unknown:
                raise ConfigError(f"Unknown keys in [{section}]: {sorted(unknown)}.")

        def resolve(value: str) -> Path:
            candidate = Path(value)
            return candidate if candidate.is_absolute() else base_dir / candidate

        try:
            kwargs: Dict[str, Any] = {}
            if parser.has_option("data", "path"):
                kwargs["data_path"] = resolve(parser.get("data", "path"))
            if parser.has_section("model"):
                model = parser["model"]
                if "lags" in model:
                    kwargs["lags"] = model.getint("lags")
                if "states" in model:
                    kwargs["n_states"] = model.getint("states")
                if "scheme" in model:
                    kwargs["scheme"] = _resolve_scheme(model["scheme"], resolve)
                if "restricted_rows" in model:
                    kwargs["restricted_rows"] = parse_rows(model["restricted_rows"])
                if "persistent" in model:
                    kwargs["persistent"] = _parse_persistent(model["persistent"])
                if "equation_order" in model:
                    kwargs["equation_order"] = tuple(
                        name.strip() for name in model["equation_order"].split(",") if name.strip()
                    )
            if parser.has_section("prior"):
                kwargs["prior"] = {key: parser.getfloat("prior", key) for key in parser["prior"]}

            sampler: Dict[str, Any] = {}
            if parser.has_section("sampler"):
                section = parser["sampler"]
                for key, (name, kind) in _SAMPLER_FIELDS.items():
                    if key in section:
                        sampler[name] = kind(section[key])
                for key, name in _SAMPLER_FLAGS.items():
                    if key in section:
                        sampler[name] = section.getboolean(key)
            if parser.has_option("output", "seed"):
                sampler["seed"] = parser.getint("output", "seed")
            if parser.has_option("output", "directory"):
                kwargs["output_dir"] = resolve(parser.get("output", "directory"))
            kwargs["sampler"] = SamplerConfig(**sampler)
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid configuration value: {e}") from e
        return cls(**kwargs)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        chains: Optional[int] = None,
        draws: Optional[int] = None,
        burn: Optional[int] = None,
        scheme: Optional[str] = None,
        restricted_rows: Optional[str] = None,
        out: Optional[Union[str, Path]] = None,
        data: Optional[Union[str, Path]] = None,
    ) -> "RunConfig":
        """Returns a copy with command-line values replacing file values; None leaves a value alone."""
        sampler_changes = {
            name: value
            for name, value in (("seed", seed), ("n_chains", chains), ("n_draws", draws), ("n_burn", burn))
            if value is not None
        }
        changes: Dict[str, Any] = {}
        try:
            if sampler_changes:
                changes["sampler"] = dataclasses.replace(self.sampler, **sampler_changes)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if scheme is not None:
            changes["scheme"] = _resolve_scheme(scheme, Path)
        if restricted_rows is not None:
            changes["restricted_rows"] = parse_rows(restricted_rows)
        if out is not None:
            changes["output_dir"] = Path(out)
        if data is not None:
            changes["data_path"] = Path(data)
        return dataclasses.replace(self, **changes)

    # --- Building library objects ---

    def load_data(self) -> TimeSeriesData:
        """Reads the data set and applies equation_order."""
        if self.data_path is None:
            raise ConfigError("No data set configured; set [data] path.")
        data = load_csv(self.data_path, self.lags)
        if not self.equation_order:
            return data
        names = list(data.variable_names)
        missing = [name for name in self.equation_order if name not in names]
        if missing or len(self.equation_order) != len(names):
            raise ConfigError(
                f"equation_order {list(self.equation_order)} must name every variable of {names} once."
            )
        return data.reordered([names.index(name) for name in self.equation_order])

    def hyperparameters(self, n_variables: int) -> PriorHyperparameters:
        overrides = dict(self.prior)
        e_diagonal = overrides.pop("e_diagonal", 10.0)
        e_off_diagonal = overrides.pop("e_off_diagonal", 1.0)
        if any(index >= n_variables for index in self.persistent):
            raise ConfigError(f"model.persistent names a variable beyond N = {n_variables}.")
        try:
            return PriorHyperparameters.default(
                n_variables,
                self.n_states,
                persistent=self.persistent,
                e_diagonal=e_diagonal,
                e_off_diagonal=e_off_diagonal,
                **overrides,
            )
        except ValueError as e:
            raise ConfigError(f"Invalid prior: {e}") from e

    def build_scheme(self, n_variables: int, factory: Optional[SchemeFactory] = None) -> RestrictionScheme:
        """
        Builds the restriction scheme for N variables.

        Raises:
            ConfigError: For an unknown preset or a scheme that does not fit N.
        """
        if self.restricted_rows is not None and self.restricted_rows[-1] >= n_variables:
            raise ConfigError(f"restricted_rows {self.restricted_rows} out of range for N = {n_variables}.")
        try:
            if self.scheme.startswith(SCHEME_FILE_PREFIX):
                scheme = _scheme_from_files(self.scheme[len(SCHEME_FILE_PREFIX):])
                if scheme.n_variables != n_variables:
                    raise ConfigError(
                        f"Scheme files describe N = {scheme.n_variables}, data has N = {n_variables}."
                    )
                if self.restricted_rows is not None:
                    scheme = compose_restricted_rows(scheme, self.restricted_rows)
                return scheme

            factory = factory or SchemeFactory()
            if not factory.has_scheme(self.scheme):
                raise ConfigError(f"Unknown restriction scheme '{self.scheme}'; presets: {factory.names}.")
            rows = None if self.restricted_rows is None else list(self.restricted_rows)
            return factory.create_scheme(self.scheme, n_variables, restricted_rows=rows)
        except RestrictionError as e:
            raise ConfigError(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "data_path": None if self.data_path is None else str(self.data_path),
            "lags": self.lags,
            "n_states": self.n_states,
            "scheme": self.scheme,
            "restricted_rows": None if self.restricted_rows is None else [r + 1 for r in self.restricted_rows],
            "persistent": [v + 1 for v in self.persistent],
            "equation_order": list(self.equation_order),
            "prior": dict(self.prior),
            "sampler": dataclasses.asdict(self.sampler),
        }


def _resolve_scheme(value: str, resolve) -> str:
    """Makes the paths of a 'file:' scheme absolute relative to the config file."""
    value = value.strip()
    if not value.startswith(SCHEME_FILE_PREFIX):
        return value
    parts = [part.strip() for part in value[len(SCHEME_FILE_PREFIX):].split(",")]
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"Scheme '{value}' must have the form file:<Q.csv>,<q.csv>.")
    return SCHEME_FILE_PREFIX + ",".join(str(resolve(part)) for part in parts)


def _parse_persistent(text: str) -> Tuple[int, ...]:
    """Comma list of one-based variables; 'none' or blank for no persistent variable."""
    if text.strip().lower() in ("", "none"):
        return ()
    rows = parse_rows(text)
    if rows is None:
        raise ConfigError("model.persistent takes a list of variables, not 'all'.")
    return rows


def _scheme_from_files(spec: str) -> RestrictionScheme:
    Q_path, q_path = spec.split(",")
    q = load_matrix(q_path).ravel()
    Q = load_matrix(Q_path)
    if Q.shape[0] != q.size:
        raise ConfigError(f"{Q_path} has {Q.shape[0]} rows, {q_path} has {q.size} entries.")
    return RestrictionScheme(Q=Q, q=q, preset_name=f"file:{Path(Q_path).stem}")
