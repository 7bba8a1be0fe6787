from typing import List

import numpy as np

from src.svarmsh.model.errors import SingularStructuralMatrixError
from src.svarmsh.model.parameters import ModelParameters


def implied_covariances(params: ModelParameters) -> List[np.ndarray]:
    """
    Reduced-form covariances Sigma_m = A0^{-1} diag(lambda_m) A0^{-T}, one per state.

    Raises:
        SingularStructuralMatrixError: If A0 is singular.
    """
    if not np.isfinite(params.log_abs_det_A0()):
        raise SingularStructuralMatrixError("Implied covariances need a nonsingular A0.")
    inverse = np.linalg.inv(params.A0)
    sigmas = []
    for lam in params.lambda_matrix:
        sigma = (inverse * lam) @ inverse.T
        sigmas.append(0.5 * (sigma + sigma.T))
    return sigmas
