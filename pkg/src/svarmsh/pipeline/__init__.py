from .commands import (
    DRAWS_DIR,
    cmd_compare,
    cmd_estimate,
    cmd_identify,
    cmd_mdd,
    cmd_sddr,
    cmd_simulate,
    posterior_mean_lambda,
    posterior_mean_parameters,
    run_hypotheses,
    summarize_posterior,
)
from .csv_io import load_csv, load_matrix, load_named_matrix, write_csv
from .errors import ConfigError, DataFormatError
from .results_manager import ReportBundle, ResultsManager
from .run_config import RunConfig, parse_rows
from .truth import TruthConfig, parameters_from_dict, parameters_to_dict

__all__ = [
    "DRAWS_DIR",
    "cmd_compare",
    "cmd_estimate",
    "cmd_identify",
    "cmd_mdd",
    "cmd_sddr",
    "cmd_simulate",
    "posterior_mean_lambda",
    "posterior_mean_parameters",
    "run_hypotheses",
    "summarize_posterior",
    "load_csv",
    "load_matrix",
    "load_named_matrix",
    "write_csv",
    "ConfigError",
    "DataFormatError",
    "ReportBundle",
    "ResultsManager",
    "RunConfig",
    "parse_rows",
    "TruthConfig",
    "parameters_from_dict",
    "parameters_to_dict",
]
