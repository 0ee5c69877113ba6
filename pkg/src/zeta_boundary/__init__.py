"""
zeta-boundary-terms

Numerical library and CLI for the boundary-term functions of two-dimensional
zeta integrals attached to elliptic curves over Q: coefficient sequences c(ν),
the Bessel-kernel series V(x,ν), Z(x,ν) and Z_E(x) with certified truncation
bounds, sign scans, partial Euler products and random Euler products.
"""

from .curves import (
    BUILTIN_CURVES,
    EllipticCurve,
    ap,
    cE_coeffs,
    get_builtin,
    goldfeld_C1,
    goldfeld_ladder,
    l_coeffs,
    load_curve,
    partial_euler_L1,
    zetaE_sq_coeffs,
)
from .dirichlet import CoeffSeries, EulerFactorMap, convolve, euler_expand
from .exceptions import (
    BoundError,
    ConfigError,
    DegenerateProductError,
    DomainError,
    InvalidFactorError,
    NonnegativityError,
    PrecisionError,
    RequiresOverrideError,
    UsageError,
    ValidationError,
    VerificationError,
    ZetaBoundaryError,
)
from .specfun import AccuracyBudget, bessel_k0, bessel_k1, eisenstein_E, kernel_K, theta
from .stochastic import batch_sign_study, d1k_coeffs, d_omega_coeffs, dchik_coeffs, sample_omega
from .zseries import (
    TruncationPlan,
    V,
    Z_E,
    Z_E0_truncated,
    Z_xnu,
    ZSeriesSpec,
    omega_quadrature,
    sign_scan,
)
from . import utils

__version__ = "0.3.0"
__author__ = "zeta-boundary-terms contributors"

__all__ = [
    "AccuracyBudget",
    "BUILTIN_CURVES",
    "BoundError",
    "CoeffSeries",
    "ConfigError",
    "DegenerateProductError",
    "DomainError",
    "EllipticCurve",
    "EulerFactorMap",
    "InvalidFactorError",
    "NonnegativityError",
    "PrecisionError",
    "RequiresOverrideError",
    "TruncationPlan",
    "UsageError",
    "V",
    "ValidationError",
    "VerificationError",
    "ZSeriesSpec",
    "Z_E",
    "Z_E0_truncated",
    "Z_xnu",
    "ZetaBoundaryError",
    "ap",
    "batch_sign_study",
    "bessel_k0",
    "bessel_k1",
    "cE_coeffs",
    "convolve",
    "d1k_coeffs",
    "d_omega_coeffs",
    "dchik_coeffs",
    "eisenstein_E",
    "euler_expand",
    "get_builtin",
    "goldfeld_C1",
    "goldfeld_ladder",
    "kernel_K",
    "l_coeffs",
    "load_curve",
    "omega_quadrature",
    "partial_euler_L1",
    "sample_omega",
    "sign_scan",
    "theta",
    "utils",
    "zetaE_sq_coeffs",
]
