from .blocks import (
    alpha_proposal_scale,
    backward_sample,
    log_acceptance_ratio,
    omega_posterior,
    rao_blackwell_records,
    relabel_states,
    sample_A_row,
    sample_alpha_mh,
    sample_lambda1,
    sample_omega,
    sample_shrinkage,
    sample_states_ffbs,
    sample_transition_matrix,
    smoothed_state_probabilities,
)
from .chain import ChainOutput, GibbsChain, initial_parameters, run_chain, run_chains
from .chain_state import ChainState, SamplerContext
from .draw_store import DrawStore, convert_for_json, describe_run
from .draws import DrawLayout, PosteriorDraw
from .errors import PrecisionMatrixError, SamplerBlockError
from .sampler_config import SamplerConfig

__all__ = [
    "alpha_proposal_scale",
    "backward_sample",
    "log_acceptance_ratio",
    "omega_posterior",
    "rao_blackwell_records",
    "relabel_states",
    "sample_A_row",
    "sample_alpha_mh",
    "sample_lambda1",
    "sample_omega",
    "sample_shrinkage",
    "sample_states_ffbs",
    "sample_transition_matrix",
    "smoothed_state_probabilities",
    "ChainOutput",
    "GibbsChain",
    "initial_parameters",
    "run_chain",
    "run_chains",
    "ChainState",
    "SamplerContext",
    "DrawStore",
    "convert_for_json",
    "describe_run",
    "DrawLayout",
    "PosteriorDraw",
    "PrecisionMatrixError",
    "SamplerBlockError",
    "SamplerConfig",
]
