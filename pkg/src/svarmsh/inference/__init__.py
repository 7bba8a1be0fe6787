from .errors import EmptyAcceptanceRegionError, MissingRecordsError
from .mdd import (
    DEFAULT_IMPORTANCE_DRAWS,
    MddResult,
    ParameterTransform,
    estimate_mdd,
    posterior_model_probabilities,
)
from .nse import (
    MDD_BATCHES,
    SDDR_BATCHES,
    batch_means,
    log_mean_exp,
    nse_batch_means,
    nse_log_batch_means,
    potential_scale_reduction,
    reported_log_nse,
    usable_batches,
)
from .sddr import (
    KASS_RAFTERY_LEGEND,
    Hypothesis,
    SddrResult,
    sddr_homoskedasticity,
    sddr_joint_homoskedasticity,
    sddr_joint_identification,
    sddr_pair_identification,
)

__all__ = [
    "EmptyAcceptanceRegionError",
    "MissingRecordsError",
    "DEFAULT_IMPORTANCE_DRAWS",
    "MddResult",
    "ParameterTransform",
    "estimate_mdd",
    "posterior_model_probabilities",
    "MDD_BATCHES",
    "SDDR_BATCHES",
    "batch_means",
    "log_mean_exp",
    "nse_batch_means",
    "nse_log_batch_means",
    "potential_scale_reduction",
    "reported_log_nse",
    "usable_batches",
    "KASS_RAFTERY_LEGEND",
    "Hypothesis",
    "SddrResult",
    "sddr_homoskedasticity",
    "sddr_joint_homoskedasticity",
    "sddr_joint_identification",
    "sddr_pair_identification",
]
