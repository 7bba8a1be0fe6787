from .brute_force import brute_force_alternatives, givens_rotation, invariant_rows, normalize_rows
from .conditions import check_identification, decomposition_error, verify_decomposition
from .report import NO_HETEROSKEDASTICITY, IdentificationReport, RelativeVarianceProfile

__all__ = [
    "brute_force_alternatives",
    "givens_rotation",
    "invariant_rows",
    "normalize_rows",
    "check_identification",
    "decomposition_error",
    "verify_decomposition",
    "NO_HETEROSKEDASTICITY",
    "IdentificationReport",
    "RelativeVarianceProfile",
]
