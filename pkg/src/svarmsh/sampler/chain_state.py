"""
The data a chain conditions on and the values it carries between sweeps.
"""

from dataclasses import dataclass

import numpy as np

from src.svarmsh.model import (
    AlphaRegression,
    DesignMatrices,
    ModelParameters,
    PriorHyperparameters,
    RestrictionScheme,
    StateSequence,
    TimeSeriesData,
    build_alpha_regression,
    build_design,
    structural_residuals,
)


@dataclass(frozen=True)
class SamplerContext:
    """
    Everything that stays fixed during a run.

    Attributes:
        data (TimeSeriesData): Observations.
        design (DesignMatrices): Regressors built for `lags`.
        scheme (RestrictionScheme): Restrictions on A0.
        hyper (PriorHyperparameters): Prior constants; also fixes M.
        regression (AlphaRegression): Data-only pieces of the alpha form.
        lags (int): VAR order p.
    """

    data: TimeSeriesData
    design: DesignMatrices
    scheme: RestrictionScheme
    hyper: PriorHyperparameters
    regression: AlphaRegression
    lags: int

    @classmethod
    def build(
        cls,
        data: TimeSeriesData,
        scheme: RestrictionScheme,
        hyper: PriorHyperparameters,
        lags: int,
    ) -> "SamplerContext":
        if hyper.n_variables != data.n_variables:
            raise ValueError(
                f"Prior is for N = {hyper.n_variables}, data has N = {data.n_variables}."
            )
        return cls(
            data=data,
            design=build_design(data, lags),
            scheme=scheme,
            hyper=hyper,
            regression=build_alpha_regression(data, scheme),
            lags=lags,
        )

    @property
    def n_states(self) -> int:
        return self.hyper.n_states

    @property
    def n_observations(self) -> int:
        return self.data.n_observations


@dataclass(slots=True)
class ChainState:
    """
    Current position of a chain.

    Attributes:
        params (ModelParameters): Latest value of every parameter block.
        states (StateSequence): Latest state path.
        alpha_accepted (bool): Outcome of the latest Metropolis step for alpha.
        transition_accepted (bool): Outcome of the latest Metropolis step for P.
    """

    params: ModelParameters
    states: StateSequence
    alpha_accepted: bool = False
    transition_accepted: bool = False

    def residuals(self, context: SamplerContext) -> np.ndarray:
        return structural_residuals(self.params, context.data, context.design)
