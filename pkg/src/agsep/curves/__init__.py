from .curve import (
    INFINITY,
    Curve,
    CurvePoint,
    Divisor,
    canonical_divisor,
    curve_from_json,
    enumerate_points,
    hermitian,
    projective_line,
    random_divisor,
)
from .functions import (
    FunctionRep,
    PrecisionError,
    SeriesExpansion,
    ZeroFunctionError,
    divisor_of,
    evaluate,
    laurent,
    local_expansion,
    valuation,
)
from .riemann_roch import basis_data, clearing_factors, l_dim, riemann_roch_basis

__all__ = [
    "INFINITY", "Curve", "CurvePoint", "Divisor", "canonical_divisor", "curve_from_json",
    "enumerate_points", "hermitian", "projective_line", "random_divisor", "FunctionRep", "PrecisionError",
    "SeriesExpansion", "ZeroFunctionError", "divisor_of", "evaluate", "laurent",
    "local_expansion", "valuation", "basis_data", "clearing_factors", "l_dim",
    "riemann_roch_basis",
]
