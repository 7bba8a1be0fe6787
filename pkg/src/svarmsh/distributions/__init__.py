from .errors import DistributionDomainError, MomentExistenceError
from .inverse_gamma import (
    IG1Params,
    IG2Params,
    ig1_log_density,
    ig1_log_pdf,
    ig1_sample,
    ig2_log_density,
    ig2_log_pdf,
    ig2_mean,
    ig2_mode,
    ig2_pdf,
    ig2_sample,
)
from .multivariate import (
    DirichletParams,
    cholesky_lower,
    dirichlet_log_pdf,
    dirichlet_sample,
    mvn_log_pdf,
    mvn_sample,
    mvt_log_pdf,
    mvt_sample,
)
from .quadrature import integrate_density
from .ratio import (
    IG1RParams,
    IG2RParams,
    ig1r_log_density,
    ig1r_log_pdf,
    ig1r_mean,
    ig1r_moment,
    ig1r_pdf,
    ig1r_sample,
    ig1r_variance,
    ig2r_log_density,
    ig2r_log_pdf,
    ig2r_mean,
    ig2r_moment,
    ig2r_pdf,
    ig2r_sample,
    ig2r_variance,
)

__all__ = [
    "DistributionDomainError",
    "MomentExistenceError",
    "IG1Params",
    "IG2Params",
    "ig1_log_density",
    "ig1_log_pdf",
    "ig1_sample",
    "ig2_log_density",
    "ig2_log_pdf",
    "ig2_mean",
    "ig2_mode",
    "ig2_pdf",
    "ig2_sample",
    "DirichletParams",
    "cholesky_lower",
    "dirichlet_log_pdf",
    "dirichlet_sample",
    "mvn_log_pdf",
    "mvn_sample",
    "mvt_log_pdf",
    "mvt_sample",
    "integrate_density",
    "IG1RParams",
    "IG2RParams",
    "ig1r_log_density",
    "ig1r_log_pdf",
    "ig1r_mean",
    "ig1r_moment",
    "ig1r_pdf",
    "ig1r_sample",
    "ig1r_variance",
    "ig2r_log_density",
    "ig2r_log_pdf",
    "ig2r_mean",
    "ig2r_moment",
    "ig2r_pdf",
    "ig2r_sample",
    "ig2r_variance",
]
