"""
One recorded sweep and its flat row encoding.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.svarmsh.model import ModelParameters, RestrictionScheme


@dataclass(frozen=True)
class PosteriorDraw:
    """
    Everything recorded from one retained sweep.

    Attributes:
        params (ModelParameters): Parameter snapshot.
        state_counts (np.ndarray): T_m for every state.
        rb_a (np.ndarray): (M - 1) x N shapes a_omega + T_m of the omega conditionals.
        rb_b (np.ndarray): (M - 1) x N scales of the omega conditionals.
        log_likelihood (float): log p(Y | S, theta) at the snapshot.
        accepted (bool): Whether the sweep's Metropolis step for alpha accepted.
        sweep (int): Index of the sweep within the chain, burn-in included.
    """

    params: ModelParameters
    state_counts: np.ndarray
    rb_a: np.ndarray
    rb_b: np.ndarray
    log_likelihood: float
    accepted: bool
    sweep: int


@dataclass(frozen=True)
class DrawLayout:
    """
    Column layout of a draw row.

    Blocks follow in the order alpha, A (row-major N x K), lambda1, omega
    (row-major), P (row-major), gamma_alpha, gamma_mu, gamma_beta,
    state_counts, rb_a, rb_b, log_likelihood, accepted, sweep.
    """

    n_variables: int
    n_lags: int
    n_free: int
    n_states: int

    @property
    def shapes(self) -> List[Tuple[str, Tuple[int, ...]]]:
        n, m = self.n_variables, self.n_states
        k = 1 + self.n_lags * n
        return [
            ("alpha", (self.n_free,)),
            ("A", (n, k)),
            ("lambda1", (n,)),
            ("omega", (m - 1, n)),
            ("P", (m, m)),
            ("gamma_alpha", ()),
            ("gamma_mu", ()),
            ("gamma_beta", ()),
            ("state_counts", (m,)),
            ("rb_a", (m - 1, n)),
            ("rb_b", (m - 1, n)),
            ("log_likelihood", ()),
            ("accepted", ()),
            ("sweep", ()),
        ]

    @property
    def columns(self) -> Dict[str, Tuple[int, int, Tuple[int, ...]]]:
        """name -> (offset, width, shape)."""
        offset = 0
        result = {}
        for name, shape in self.shapes:
            width = int(np.prod(shape)) if shape else 1
            result[name] = (offset, width, shape)
            offset += width
        return result

    @property
    def width(self) -> int:
        return sum(width for _, width, _ in self.columns.values())

    def block(self, rows: np.ndarray, name: str) -> np.ndarray:
        """The named block of every row in an S x width matrix, shaped S x shape."""
        offset, width, shape = self.columns[name]
        rows = np.atleast_2d(rows)
        return rows[:, offset : offset + width].reshape((rows.shape[0],) + shape)

    def to_row(self, draw: PosteriorDraw) -> np.ndarray:
        p = draw.params
        values = {
            "alpha": p.alpha,
            "A": p.A,
            "lambda1": p.lambda1,
            "omega": p.omega,
            "P": p.P,
            "gamma_alpha": p.gamma_alpha,
            "gamma_mu": p.gamma_mu,
            "gamma_beta": p.gamma_beta,
            "state_counts": draw.state_counts,
            "rb_a": draw.rb_a,
            "rb_b": draw.rb_b,
            "log_likelihood": draw.log_likelihood,
            "accepted": float(draw.accepted),
            "sweep": float(draw.sweep),
        }
        row = np.empty(self.width)
        for name, (offset, width, _) in self.columns.items():
            row[offset : offset + width] = np.asarray(values[name], dtype=float).ravel()
        return row

    def from_row(self, row: np.ndarray, scheme: RestrictionScheme) -> PosteriorDraw:
        def get(name: str) -> np.ndarray:
            return self.block(row, name)[0]

        params = ModelParameters.from_alpha(
            get("alpha"),
            scheme,
            get("A"),
            get("lambda1"),
            get("omega"),
            get("P"),
            gamma_alpha=float(get("gamma_alpha")),
            gamma_mu=float(get("gamma_mu")),
            gamma_beta=float(get("gamma_beta")),
        )
        return PosteriorDraw(
            params=params,
            state_counts=get("state_counts").astype(np.int64),
            rb_a=get("rb_a").copy(),
            rb_b=get("rb_b").copy(),
            log_likelihood=float(get("log_likelihood")),
            accepted=bool(get("accepted")),
            sweep=int(get("sweep")),
        )

    def to_metadata(self) -> List[dict]:
        return [
            {"name": name, "offset": offset, "width": width, "shape": list(shape)}
            for name, (offset, width, shape) in self.columns.items()
        ]
