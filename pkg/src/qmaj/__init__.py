"""
qmaj: decide, certify and quantify quantum majorization of bipartite states
and channels with semidefinite programs.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    frobenius_inner, hermitian_part, is_psd, operator_norm, operator_schmidt,
    partial_trace, tensor, trace_norm,
)
from .channel import (  # noqa: E402
    Channel, adjoint, apply, apply_to_factor, choi_from_kraus, compose, depolarizing,
    eb_from_ensemble, identity, replacement, validate,
)
from .entropy import hmin, hmin_dual, lambda_selfadjoint, linfl1_norm  # noqa: E402
from .majorize import (  # noqa: E402
    FamilyInstance, convert_family, extract_witness, finite_subfamily_scan, is_majorized,
    sup_pairing,
)
from .factorize import choi_majorization_equiv, post_factor, pre_factor  # noqa: E402
from .approx import (  # noqa: E402
    check_apro1, check_apro2, diamond_norm, min_conversion_error, min_post_factor_error,
    trace_dist_variational,
)

__all__ = [
    "Channel", "FamilyInstance", "adjoint", "apply", "apply_to_factor", "check_apro1",
    "check_apro2", "choi_from_kraus", "choi_majorization_equiv", "compose", "convert_family",
    "depolarizing", "diamond_norm", "eb_from_ensemble", "extract_witness",
    "finite_subfamily_scan", "frobenius_inner", "hermitian_part", "hmin", "hmin_dual",
    "identity", "is_majorized", "is_psd", "lambda_selfadjoint", "linfl1_norm",
    "min_conversion_error", "min_post_factor_error", "operator_norm", "operator_schmidt",
    "partial_trace", "post_factor", "pre_factor", "replacement", "sup_pairing", "tensor",
    "trace_dist_variational", "trace_norm", "validate",
]
