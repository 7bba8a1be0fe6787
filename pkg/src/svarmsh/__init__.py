from .model.time_series_data import TimeSeriesData
from .model.restrictions import RestrictionScheme
from .model.scheme_factory import SchemeFactory
from .model.parameters import ModelParameters
from .model.prior import PriorHyperparameters
from .model.simulation import simulate_data
from .identification.conditions import check_identification
from .sampler.sampler_config import SamplerConfig
from .sampler.draw_store import DrawStore
from .sampler.chain import run_chains
from .inference.sddr import sddr_joint_homoskedasticity, sddr_joint_identification
from .inference.mdd import estimate_mdd

__all__ = [
    "TimeSeriesData",
    "RestrictionScheme",
    "SchemeFactory",
    "ModelParameters",
    "PriorHyperparameters",
    "simulate_data",
    "check_identification",
    "SamplerConfig",
    "DrawStore",
    "run_chains",
    "sddr_joint_homoskedasticity",
    "sddr_joint_identification",
    "estimate_mdd",
]
