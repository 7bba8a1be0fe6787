"""
This module defines the configuration of a posterior simulation run.
"""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SamplerConfig:
    """
    Holds the user-defined parameters of the Gibbs sampler.

    Attributes:
        n_burn (int): Sweeps discarded before recording. Defaults to 5000.
        n_draws (int): Retained draws per chain. Defaults to 20000.
        thin (int): Keep every `thin`-th sweep after burn-in. Defaults to 1.
        mh_dof (float): Degrees of freedom of the t proposal for alpha. Defaults to 5.
        mh_scale_mult (float): Scalar multiplying the proposal scale. Defaults to 1.0.
        seed (Optional[int]): Root seed; chains receive spawned child streams.
        n_chains (int): Number of independent chains. Defaults to 2.
        state_relabeling (bool): Record draws with states ordered by volatility.
                                 Defaults to True.
        enable_logging (bool): Whether to write per-chain log files. Defaults to False.
        log_level (int): The logging level used when logging is enabled.
                         Defaults to logging.INFO.
        progress_bar (bool): Whether to show a tqdm bar per chain. Defaults to True.
    """

    n_burn: int = 5000
    n_draws: int = 20000
    thin: int = 1
    mh_dof: float = 5.0
    mh_scale_mult: float = 1.0
    seed: Optional[int] = None
    n_chains: int = 2
    state_relabeling: bool = True
    enable_logging: bool = False
    log_level: int = 20
    progress_bar: bool = True

    def __post_init__(self):
        """Validate parameters after initialization."""
        if self.n_burn < 0:
            raise ValueError("n_burn must be non-negative.")
        if self.n_draws < 1:
            raise ValueError("n_draws must be at least 1.")
        if self.thin < 1:
            raise ValueError("thin must be at least 1.")
        if self.n_chains < 1:
            raise ValueError("n_chains must be at least 1.")
        if not self.mh_dof > 2:
            raise ValueError("mh_dof must exceed 2 so the proposal has a covariance.")
        if not self.mh_scale_mult > 0:
            raise ValueError("mh_scale_mult must be positive.")

    @property
    def total_sweeps(self) -> int:
        return self.n_burn + self.n_draws * self.thin
