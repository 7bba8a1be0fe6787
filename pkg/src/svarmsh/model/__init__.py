from .covariances import implied_covariances
from .design import DesignMatrices, build_design, check_sample_size, minimum_observations
from .errors import (
    InsufficientDataError,
    ReducibleChainError,
    RestrictionError,
    SingularStructuralMatrixError,
    UnstableSystemError,
)
from .evaluation import DensityEvaluation, EvaluationStatus
from .likelihood import (
    AlphaRegression,
    build_alpha_regression,
    ergodic_distribution,
    evaluate_log_likelihood,
    filtered_log_likelihood,
    forward_filter,
    log_likelihood,
    log_likelihood_alpha_form,
    log_likelihood_alpha_gradient,
    state_log_densities,
    structural_residuals,
)
from .parameters import ModelParameters, StateSequence
from .prior import (
    PRIOR_COMPONENTS,
    PriorHyperparameters,
    evaluate_log_prior,
    log_prior,
    log_prior_components,
)
from .reordering import order_by_relative_variance, reorder_equations
from .restrictions import (
    RestrictionScheme,
    compose_restricted_rows,
    extract_alpha,
    reconstruct_A0,
)
from .scheme_factory import SchemeFactory
from .simulation import (
    SimulatedPath,
    companion_matrix,
    simulate_data,
    simulate_path,
    spectral_radius,
)
from .time_series_data import TimeSeriesData

__all__ = [
    "implied_covariances",
    "DesignMatrices",
    "build_design",
    "check_sample_size",
    "minimum_observations",
    "InsufficientDataError",
    "ReducibleChainError",
    "RestrictionError",
    "SingularStructuralMatrixError",
    "UnstableSystemError",
    "DensityEvaluation",
    "EvaluationStatus",
    "AlphaRegression",
    "build_alpha_regression",
    "ergodic_distribution",
    "evaluate_log_likelihood",
    "filtered_log_likelihood",
    "forward_filter",
    "log_likelihood",
    "log_likelihood_alpha_form",
    "log_likelihood_alpha_gradient",
    "state_log_densities",
    "structural_residuals",
    "ModelParameters",
    "StateSequence",
    "PRIOR_COMPONENTS",
    "PriorHyperparameters",
    "evaluate_log_prior",
    "log_prior",
    "log_prior_components",
    "order_by_relative_variance",
    "reorder_equations",
    "RestrictionScheme",
    "compose_restricted_rows",
    "extract_alpha",
    "reconstruct_A0",
    "SchemeFactory",
    "SimulatedPath",
    "companion_matrix",
    "simulate_data",
    "simulate_path",
    "spectral_radius",
    "TimeSeriesData",
]
