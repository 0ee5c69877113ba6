"""
Boundary-term series V(x,ν), Z(x,ν) and Z_E(x).

V(x,ν) = κ_γ(νx⁻²) - x²κ_γ(νx²) with κ_γ(x) = 4Σσ₀(N)K₀(2πNx) is the
elementary boundary kernel; Z(x,ν) = (-x d/dx)⁴V(x,ν) is evaluated termwise:

    (x d/dx)⁴K₀(Ax⁻²)   = W(Ax⁻²)
    (x d/dx)⁴[x²K₀(Ax²)] = 𝒦(Ax²)/A

with A = 2πNν. For a nonnegative sequence c(ν) the truncated small-x part is

    Z_{E,0}(x) = (2/π)Σ_{n<=T} (a(n)/n)·𝒦(2πnx²),   a = c * σ₀,

returned together with an explicit tail majorant, and Z_E = -Z_{E,0} up to a
term of size O(x^A) that is bounded separately. Sign scans only assert a
sign where |value| exceeds the combined bound.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import pandas as pd
from scipy import integrate, special

from .curves import VARIANT_QE, EllipticCurve, cE_coeffs
from .dirichlet import CoeffSeries, a_weights, growth_constant
from .exceptions import DomainError, PrecisionError, UsageError, ValidationError
from .specfun import (
    DEFAULT_BUDGET,
    KERNEL_ENVELOPE,
    LOG_Q,
    PI,
    W_ENVELOPE,
    AccuracyBudget,
    Envelope,
    divisor_k0_sum,
    divisor_series_sum,
    eisenstein_E,
    k0_array,
    k1_array,
    kernel_W_array,
    kernel_K_array,
    log_upper_gamma_bound,
    theta_minus_one,
)
from .utils import log_grid, validate_positive, validate_positive_int, validate_sign

logger = logging.getLogger(__name__)

# log(Q·e⁴)
LOG_QE4 = LOG_Q + 4.0
# Relative error of one kernel term (Bessel evaluation plus the two products).
KERNEL_REL_ERR = 1e-14
# 𝒦(y)/y, the x²-side kernel of Z(x,ν) after factoring out x².
KERNEL_OVER_Y_ENVELOPE = Envelope(KERNEL_ENVELOPE.power - 1.0, KERNEL_ENVELOPE.const)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 10**4


@dataclass(frozen=True)
class ZSeriesSpec:
    """
    Parameters (ε, n, λ_c, λ_γ) of a boundary-term family.

    Args:
        epsilon: Sign of the functional equation
        n: Degree of the dilation x -> x^n
        lambda_c: Pole order of D_c at s = 1
        lambda_gamma: Pole order of γ at s = 1
    """

    epsilon: int = 1
    n: int = 2
    lambda_c: int = 2
    lambda_gamma: int = 2

    def __post_init__(self) -> None:
        validate_sign(self.epsilon)
        validate_positive_int(self.n, "n")
        validate_positive_int(self.lambda_c, "lambda_c")
        validate_positive_int(self.lambda_gamma, "lambda_gamma")

    @property
    def experimental(self) -> bool:
        return (self.epsilon, self.n, self.lambda_c, self.lambda_gamma) not in _SUPPORTED_SPECS

    @property
    def log_degree(self) -> int:
        """Degree in t = log(1/x) of the growth of h near x = 0."""
        return self.lambda_c + self.lambda_gamma - 1


_SUPPORTED_SPECS = {(1, 2, 2, 2), (1, 1, 1, 1)}
ELLIPTIC_SPEC = ZSeriesSpec(1, 2, 2, 2)
TOY_SPEC = ZSeriesSpec(1, 1, 1, 1)


@dataclass(frozen=True)
class TruncationPlan:
    """
    Error-bounded cutoff of the Z_{E,0} series.

    Args:
        T: Cutoff; terms n <= T are summed
        R: Validity ratio, the plan applies for x >= √(R/T)
        alpha: Exponent parameter in (0, 1)
        beta: Exponent parameter > 1
        eps: Coefficient growth exponent in (0, 1)
    """

    T: float
    R: float = 20.0
    alpha: float = 0.5
    beta: float = 2.0
    eps: float = 0.1

    def __post_init__(self) -> None:
        validate_positive(self.T, "T")
        if not self.R > 1:
            raise ValidationError(f"Invalid R. Must be > 1, got: {self.R}")
        if not 0 < self.alpha < 1:
            raise ValidationError(f"Invalid alpha. Must lie in (0, 1), got: {self.alpha}")
        if not self.beta > 1:
            raise ValidationError(f"Invalid beta. Must be > 1, got: {self.beta}")
        if not 0 < self.eps < 1:
            raise ValidationError(f"Invalid eps. Must lie in (0, 1), got: {self.eps}")
        if not self.alpha * self.beta > self.eps:
            raise ValidationError(
                f"Invalid plan. alpha*beta must exceed eps, got: "
                f"{self.alpha}*{self.beta} <= {self.eps}"
            )

    @classmethod
    def for_grid(cls, x_lo: float, R: float = 20.0, **kwargs: float) -> "TruncationPlan":
        """Plan with T = R/x_lo², the smallest T admitting x_lo."""
        x_lo = validate_positive(x_lo, "x_lo")
        return cls(T=R / (x_lo * x_lo), R=R, **kwargs)

    @property
    def terms(self) -> int:
        return max(1, int(math.floor(self.T)))

    @property
    def min_x(self) -> float:
        return math.sqrt(self.R / self.T)

    @property
    def k_start(self) -> int:
        """Smallest integer >= alpha·beta + 1."""
        return int(math.ceil(self.alpha * self.beta + 1.0))

    def scaled(self, factor: float) -> "TruncationPlan":
        return TruncationPlan(self.T * factor, self.R, self.alpha, self.beta, self.eps)

    def to_dict(self) -> Dict[str, float]:
        return {"T": self.T, "R": self.R, "alpha": self.alpha, "beta": self.beta, "eps": self.eps}


class BoundedValue(NamedTuple):
    """A value with a certified absolute error bound."""

    value: float
    bound: float


def sign_symbol(value: float, bound: float) -> str:
    """'+' or '-' when |value| > bound, '0' for an exact zero, '?' otherwise."""
    if abs(value) > bound:
        return "+" if value > 0 else "-"
    if value == 0.0 and bound == 0.0:
        return "0"
    return "?"


@dataclass(frozen=True)
class TruncatedValue:
    """
    Truncated Z_{E,0}(x) with the pieces of its error bound.

    Args:
        value: (2/π)Σ_{n<=T}(a(n)/n)𝒦(2πnx²)
        tail_bound: Majorant of the omitted terms n > T
        rounding_bound: Floating-point error of the summed terms
        k: Exponent attaining the smallest tail majorant
        growth: M_ε = max a(n)/n^ε over the stored weights
        terms: Number of summed terms
    """

    value: float
    tail_bound: float
    rounding_bound: float
    k: int
    growth: float
    terms: int

    @property
    def bound(self) -> float:
        return self.tail_bound + self.rounding_bound


@dataclass(frozen=True)
class ZEResult:
    """
    Z_E(x) = -Z_{E,0}(x) with its diagnostics.

    ``neglected_bound`` bounds the dropped x^{-2}-side part Z_{E,1}(x);
    ``bound`` is the total used to certify signs.
    """

    x: float
    value: float
    truncation: TruncatedValue
    neglected_bound: float

    @property
    def bound(self) -> float:
        return self.truncation.bound + self.neglected_bound

    @property
    def sign(self) -> str:
        return sign_symbol(self.value, self.bound)

    def diagnostics(self) -> Dict[str, float]:
        return {
            "tail_bound": self.truncation.tail_bound,
            "rounding_bound": self.truncation.rounding_bound,
            "neglected_bound": self.neglected_bound,
            "k": self.truncation.k,
            "M_eps": self.truncation.growth,
            "terms": self.truncation.terms,
        }


def kappa_gamma(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    κ_γ(x) = 4Σ_{N>=1}σ₀(N)K₀(2πNx), the inverse Mellin transform of ζ̂(s)².

    Raises:
        DomainError: If x <= 0
        PrecisionError: If x is so small the series exceeds max_terms
    """
    value, _ = divisor_k0_sum(x, budget)
    return 4.0 * value


def kappa_toy(x: float) -> float:
    """κ(x) = 2e^{-πx²}, the inverse Mellin transform of π^{-s/2}Γ(s/2)."""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"Invalid x. Must be nonnegative, got: {x}")
    return 2.0 * math.exp(-PI * x * x)


def V(x: float, nu: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """V(x,ν) = κ_γ(νx⁻²) - x²κ_γ(νx²)."""
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    return kappa_gamma(nu / (x * x), budget) - x * x * kappa_gamma(nu * x * x, budget)


def V_general(
    x: float, nu: float, kappa: Callable[[float], float], spec: ZSeriesSpec = ELLIPTIC_SPEC
) -> float:
    """V^{ε,n}(x,ν) = κ(νx^{-n}) - εx^{n}κ(νx^{n}) for an arbitrary kernel κ."""
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    xn = x**spec.n
    return kappa(nu / xn) - spec.epsilon * xn * kappa(nu * xn)


def V_eisenstein(x: float, nu: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    V(x,ν) through the central Eisenstein value:

    x²log x² + x²log Qν + log x² - log Qν + (x/√ν)(E(νx⁻²) - E(νx²))
    """
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    x2 = x * x
    log_x2 = math.log(x2)
    log_q_nu = LOG_Q + math.log(nu)
    difference = eisenstein_E(nu / x2, budget) - eisenstein_E(nu * x2, budget)
    return x2 * log_x2 + x2 * log_q_nu + log_x2 - log_q_nu + x / math.sqrt(nu) * difference


def adaptive_quad(
    integrand: Callable[[float], float],
    lower: float,
    upper: float,
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
    points: Optional[Sequence[float]] = None,
    target: Optional[float] = None,
) -> float:
    """Adaptive Gauss-Kronrod quadrature; raises when the error estimate misses ``target``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(
            integrand, lower, upper, epsabs=epsabs, epsrel=epsrel, limit=QUAD_LIMIT, points=points
        )
    if target is not None and error > target:
        raise PrecisionError(f"Quadrature on [{lower}, {upper}] stalled at error {error:.2e}")
    return float(value)


def kappa_integral(x: float) -> float:
    """Oracle κ_γ(x) = ∫₀^∞(θ(a²)-1)(θ(x²a⁻²)-1)da/a by quadrature in log a."""
    x = validate_positive(x, "x")

    def integrand(t: float) -> float:
        a2 = math.exp(2.0 * t)
        return theta_minus_one(a2) * theta_minus_one(x * x / a2)

    lower = math.log(x) - 3.0
    upper = 3.0
    return adaptive_quad(
        integrand, lower, upper, epsabs=1e-14, epsrel=1e-12, points=[0.5 * math.log(x)]
    )


def w_ab(x: float, a: float, b: float) -> float:
    """w_{a,b}(x) = (θ(a²x⁻²)-1)(θ(b²x⁻²)-1) - x²(θ(a²x²)-1)(θ(b²x²)-1)."""
    x2 = x * x
    first = theta_minus_one(a * a / x2) * theta_minus_one(b * b / x2)
    second = theta_minus_one(a * a * x2) * theta_minus_one(b * b * x2)
    return first - x2 * second


def V_integral(x: float, nu: float) -> float:
    """Oracle V(x,ν) = ∫₀^∞ w_{a,νa⁻¹}(x) da/a by quadrature in log a."""
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    centre = 0.5 * math.log(nu)
    half_width = abs(math.log(x)) + 3.0

    def integrand(t: float) -> float:
        a = math.exp(t)
        return w_ab(x, a, nu / a)

    return adaptive_quad(
        integrand,
        centre - half_width,
        centre + half_width,
        epsabs=1e-13,
        epsrel=1e-11,
        points=[centre + math.log(x), centre, centre - math.log(x)],
    )


def Z_xnu_bounded(
    x: float, nu: float, budget: AccuracyBudget = DEFAULT_BUDGET
) -> BoundedValue:
    """
    Z(x,ν) = 4Σσ₀(N)[W(2πNνx⁻²) - x²·𝒦(2πNνx²)/(2πNνx²)] with its error bound.

    The bound adds both certified tails and the rounding of the summed terms.

    Raises:
        PrecisionError: If either side needs more than max_terms terms
    """
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    x2 = x * x

    near = divisor_series_sum(2.0 * PI * nu / x2, kernel_W_array, W_ENVELOPE, budget)
    far = divisor_series_sum(
        2.0 * PI * nu * x2,
        lambda y: kernel_K_array(y) / y,
        KERNEL_OVER_Y_ENVELOPE,
        budget,
    )

    value = 4.0 * (near.value - x2 * far.value)
    tails = 4.0 * (near.tail + x2 * far.tail)
    rounding = 4.0 * KERNEL_REL_ERR * (near.magnitude + x2 * far.magnitude)
    return BoundedValue(value, tails + rounding)


def Z_xnu(x: float, nu: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """Z(x,ν) = (-x d/dx)⁴V(x,ν), summed termwise."""
    return Z_xnu_bounded(x, nu, budget).value


def Z_asym_small(x: float, nu: float) -> float:
    """
    Leading small-x terms 16x²log x² + 16x²log(Qe⁴ν) of Z(x,ν).

    Raises:
        DomainError: If x is not in (0, 1]
    """
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    if x > 1.0:
        raise DomainError(f"Invalid x. Small-x expansion needs 0 < x <= 1, got: {x}")
    x2 = x * x
    return 16.0 * x2 * math.log(x2) + 16.0 * x2 * (LOG_QE4 + math.log(nu))


def Z_asym_large(x: float, nu: float) -> float:
    """
    Leading large-x terms (16/ν)x²log x² + (16/ν)x²log(Qe⁴/ν) of Z(x,ν).

    Raises:
        DomainError: If x < 1
    """
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    if x < 1.0:
        raise DomainError(f"Invalid x. Large-x expansion needs x >= 1, got: {x}")
    x2 = x * x
    return 16.0 / nu * x2 * (math.log(x2) + LOG_QE4 - math.log(nu))


def dilation_residual(
    x: float, nu: float, nu0: float, budget: AccuracyBudget = DEFAULT_BUDGET
) -> float:
    """R(x,ν;ν₀) = Z(x,ν) - (ν₀/ν)Z(x√(ν/ν₀), ν₀)."""
    x = validate_positive(x, "x")
    nu = validate_positive(nu, "nu")
    nu0 = validate_positive(nu0, "nu0")
    if nu == nu0:
        return 0.0
    return Z_xnu(x, nu, budget) - nu0 / nu * Z_xnu(x * math.sqrt(nu / nu0), nu0, budget)


def _log_tail_majorants(
    y: float, cutoff: int, growth: float, plan: TruncationPlan
) -> Tuple[float, int]:
    """
    Smallest log-majorant of (2/π)Σ_{n>cutoff}(|a(n)|/n)|𝒦(yn)| over admissible k.

    For every k > ε: |𝒦(t)| <= 312√(2π)(k+5)!·t^{-k} (t >= 1) and
    |a(n)| <= M_ε n^ε give (2/π)·312√(2π)(k+5)!·M_ε/(k-ε)·y^{-k}·cutoff^{ε-k}.
    """
    if growth <= 0.0:
        return -math.inf, plan.k_start
    start = plan.k_start
    # The optimum sits near k = y·cutoff; past a few hundred the bound underflows anyway.
    stop = min(max(start + 8, int(2.0 * y * cutoff) + 16), start + 1000)
    ks = np.arange(start, stop + 1, dtype=float)
    logs = (
        math.log(2.0 / PI * KERNEL_ENVELOPE.const)
        + special.gammaln(ks + 6.0)
        + math.log(growth)
        - np.log(ks - plan.eps)
        - ks * math.log(y)
        + (plan.eps - ks) * math.log(cutoff)
    )
    best = int(np.argmin(logs))
    return float(logs[best]), int(ks[best])


def Z_E0_truncated(
    a: CoeffSeries,
    x: float,
    plan: TruncationPlan,
    growth: Optional[float] = None,
) -> TruncatedValue:
    """
    Truncated Z_{E,0}(x) = (2/π)Σ_{n<=T}(a(n)/n)𝒦(2πnx²) with its certified bound.

    Args:
        a: Divisor weights a = c * σ₀ with a.limit >= T
        x: Evaluation point, x >= √(R/T)
        plan: Truncation plan
        growth: Precomputed M_ε; measured from ``a`` when omitted

    Raises:
        DomainError: If x is below √(R/T)
        UsageError: If the weights stop before T
    """
    x = validate_positive(x, "x")
    if x < plan.min_x * (1.0 - 1e-12):
        raise DomainError(
            f"x = {x} is below the plan's validity threshold; minimal admissible x is "
            f"{plan.min_x:.6g} (raise T)"
        )
    cutoff = plan.terms
    if a.limit < cutoff:
        raise UsageError(f"Weights '{a.label}' stop at {a.limit}, plan needs {cutoff}")

    if growth is None:
        growth = growth_constant(a, plan.eps)

    y = 2.0 * PI * x * x
    weights = a.padded[1 : cutoff + 1]
    indices = np.flatnonzero(weights) + 1
    if indices.size:
        t = y * indices
        t2 = t * t
        k0 = k0_array(t)
        k1 = k1_array(t)
        head = (16.0 * t2 * t2 + 288.0 * t2 + 16.0) * t * k0
        tail_part = (128.0 * t2 + 64.0) * t2 * k1
        w = weights[indices - 1] / indices
        terms = w * (head - tail_part)
        value = 2.0 / PI * math.fsum(terms)
        rounding = 2.0 / PI * KERNEL_REL_ERR * math.fsum(np.abs(w) * (head + tail_part))
    else:
        value, rounding = 0.0, 0.0

    log_tail, k = _log_tail_majorants(y, cutoff, growth, plan)
    tail = math.exp(log_tail) if log_tail < 709.0 else math.inf
    return TruncatedValue(value, tail, rounding, k, growth, int(indices.size))


def _neglected_bound(a: CoeffSeries, x: float, cutoff: int, growth: float, eps: float) -> float:
    """
    Bound on |Z_{E,1}(x)| = |4Σ_n a(n)W(2πn/x²)| for the sequence behind ``a``.
    """
    c = 2.0 * PI / (x * x)
    weights = a.padded[1 : cutoff + 1]
    indices = np.flatnonzero(weights) + 1
    head = 0.0
    if indices.size:
        head = math.fsum(np.abs(weights[indices - 1] * kernel_W_array(c * indices)))
        head *= 1.0 + KERNEL_REL_ERR

    # Σ_{n>cutoff} M n^ε C (cn)^p e^{-cn} <= M C c^{-ε-1} Γ(p+ε+1, c·cutoff)
    p = W_ENVELOPE.power + eps
    z = c * cutoff
    if growth <= 0.0:
        tail = 0.0
    elif z < max(1.0, p + 1.0):
        tail = math.inf
    else:
        log_tail = (
            math.log(growth * W_ENVELOPE.const)
            - (eps + 1.0) * math.log(c)
            + log_upper_gamma_bound(p + 1.0, z)
        )
        tail = math.exp(log_tail) if log_tail < 709.0 else math.inf
    return 4.0 * (head + tail)


class BoundaryTermEvaluator:
    """
    Evaluator x -> Z_c(x) = -Z_{c,0}(x) for a fixed coefficient series.

    The divisor weights and M_ε are computed once; calls are thread-safe.

    Args:
        c: Nonnegative coefficients c(ν) with c.limit >= plan.T
        plan: Truncation plan shared by every evaluation
        label: Display name used in reports
    """

    def __init__(self, c: CoeffSeries, plan: TruncationPlan, label: str = ""):
        if c.limit < plan.terms:
            raise UsageError(f"Series '{c.label}' stops at {c.limit}, plan needs {plan.terms}")
        self.plan = plan
        self.label = label or c.label
        self.weights = a_weights(c.truncate(plan.terms))
        self.growth = growth_constant(self.weights, plan.eps)
        logger.info(
            f"Boundary-term evaluator '{self.label}': T={plan.T:g}, M_eps={self.growth:.4g}"
        )

    def z0(self, x: float) -> TruncatedValue:
        return Z_E0_truncated(self.weights, x, self.plan, self.growth)

    def __call__(self, x: float) -> ZEResult:
        truncated = self.z0(x)
        neglected = _neglected_bound(
            self.weights, x, self.plan.terms, self.growth, self.plan.eps
        )
        return ZEResult(float(x), -truncated.value, truncated, neglected)


@lru_cache(maxsize=16)
def curve_evaluator(
    curve: EllipticCurve, plan: TruncationPlan, variant: str = VARIANT_QE
) -> BoundaryTermEvaluator:
    """Cached evaluator for Z_E of a curve under a plan."""
    c = cE_coeffs(curve, plan.terms, variant)
    return BoundaryTermEvaluator(c, plan, label=f"Z_E[{curve.label}]")


def curve_plan(
    curve: EllipticCurve, x_lo: float, R: float = 20.0, variant: str = VARIANT_QE, **kwargs: float
) -> TruncationPlan:
    """
    Plan for Z_E on a grid starting at x_lo.

    T = max(R/x_lo², 4s²) where s² (s = q_E, or c_E for the n_E variant) is the
    first index in the support of c; the first two support points are summed.
    """
    x_lo = validate_positive(x_lo, "x_lo")
    scale = curve.conductor if variant == VARIANT_QE else curve.c_scale
    return TruncationPlan(max(R / (x_lo * x_lo), 4.0 * scale * scale), R=R, **kwargs)


def series_evaluator(
    c: CoeffSeries, plan: TruncationPlan, label: str = ""
) -> BoundaryTermEvaluator:
    """Evaluator for Z_c of an arbitrary nonnegative sequence."""
    return BoundaryTermEvaluator(c, plan, label)


def Z_E(
    curve: EllipticCurve, x: float, plan: TruncationPlan, variant: str = VARIANT_QE
) -> ZEResult:
    """
    Z_E(x) = -Z_{E,0}(x), with truncation and neglected-term diagnostics.

    Raises:
        DomainError: If x is below √(R/T)
    """
    return curve_evaluator(curve, plan, variant)(x)


@dataclass
class SignScanReport:
    """
    Result of a sign scan over a log-spaced grid.

    Args:
        xs: Grid points
        values: Evaluated values
        bounds: Certified error bounds
        signs: One of '+', '-', '0', '?' per point
        brackets: Pairs (x_i, x_j) of consecutive certified points of opposite sign
        prefix_sign: Sign held from x_lo onwards, None when x_lo is not certified
        prefix_end: Last grid point x* of that constant-sign prefix
    """

    xs: List[float]
    values: List[float]
    bounds: List[float]
    signs: List[str]
    brackets: List[Tuple[float, float]] = field(default_factory=list)
    prefix_sign: Optional[str] = None
    prefix_end: Optional[float] = None

    @property
    def indeterminate(self) -> int:
        return sum(1 for s in self.signs if s == "?")

    @property
    def has_sign_change(self) -> bool:
        return bool(self.brackets)

    def to_frame(self) -> pd.DataFrame:
        """Table with columns x, value, bound, sign."""
        return pd.DataFrame(
            {"x": self.xs, "value": self.values, "bound": self.bounds, "sign": self.signs}
        )

    def summary(self) -> Dict[str, Any]:
        return {
            "points": len(self.xs),
            "indeterminate": self.indeterminate,
            "sign_changes": len(self.brackets),
            "brackets": [list(b) for b in self.brackets],
            "prefix_sign": self.prefix_sign,
            "prefix_end": self.prefix_end,
        }


EvaluatorResult = Union[float, BoundedValue, ZEResult, Tuple[float, float]]


def _as_bounded(result: EvaluatorResult) -> BoundedValue:
    if isinstance(result, ZEResult):
        return BoundedValue(result.value, result.bound)
    if isinstance(result, tuple):
        return BoundedValue(float(result[0]), float(result[1]))
    return BoundedValue(float(result), 0.0)


def sign_scan(
    evaluator: Callable[[float], EvaluatorResult],
    x_lo: float,
    x_hi: float,
    points: int,
    workers: int = 1,
) -> SignScanReport:
    """
    Evaluate on a log-spaced grid and report certified signs.

    Args:
        evaluator: Callable returning a float, (value, bound) or ZEResult
        x_lo: Left end of the grid
        x_hi: Right end of the grid
        points: Number of grid points
        workers: Concurrent evaluations; results keep grid order

    Returns:
        SignScanReport
    """
    xs = [float(x) for x in log_grid(x_lo, x_hi, points)]
    workers = validate_positive_int(workers, "workers")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluator, xs))
    else:
        results = [evaluator(x) for x in xs]

    bounded = [_as_bounded(r) for r in results]
    report = SignScanReport(
        xs=xs,
        values=[b.value for b in bounded],
        bounds=[b.bound for b in bounded],
        signs=[sign_symbol(b.value, b.bound) for b in bounded],
    )

    previous: Optional[Tuple[float, str]] = None
    for x, sign in zip(report.xs, report.signs):
        if sign not in ("+", "-"):
            continue
        if previous is not None and previous[1] != sign:
            report.brackets.append((previous[0], x))
        previous = (x, sign)

    if report.signs[0] in ("+", "-"):
        report.prefix_sign = report.signs[0]
        for x, sign in zip(report.xs, report.signs):
            if sign != report.prefix_sign:
                break
            report.prefix_end = x

    if report.indeterminate:
        logger.warning(f"Sign scan: {report.indeterminate} of {points} points indeterminate")
    return report


def toy_h(x: float) -> float:
    """
    h(x) = Σ_ν V^{+1,1}(x,ν) for c ≡ 1 and κ(x) = 2e^{-πx²}.

    Equals (θ(x⁻²) - 1) - x(θ(x²) - 1), which is x - 1 by the theta transformation.
    """
    x = validate_positive(x, "x")
    return theta_minus_one(1.0 / (x * x)) - x * theta_minus_one(x * x)


def toy_kernel_sum(x: float) -> float:
    """Σ_ν κ(νx) = θ(x²) - 1 for the toy kernel."""
    x = validate_positive(x, "x")
    return theta_minus_one(x * x)


def toy_completed_zeta(s: float) -> float:
    """ζ̂(s) = π^{-s/2}Γ(s/2)ζ(s)."""
    with mpmath.workdps(30):
        return float(mpmath.pi ** (-s / 2.0) * mpmath.gamma(s / 2.0) * mpmath.zeta(s))


def toy_omega(s: float) -> float:
    """Closed form ω(s) = 1/(1-s) + 1/s of the toy boundary term."""
    return 1.0 / (1.0 - s) + 1.0 / s


def series_kernel_sum(
    c: CoeffSeries, spec: ZSeriesSpec = ELLIPTIC_SPEC
) -> Callable[[float], float]:
    """x -> Σ_ν c(ν)κ_γ(νx^n) = 4Σ_m a(m)K₀(2πm·x^n) for γ = ζ̂²."""
    weights = a_weights(c)
    indices = np.flatnonzero(weights.values) + 1
    values = weights.padded[indices]

    def kernel_sum(x: float) -> float:
        y = 2.0 * PI * x**spec.n
        return 4.0 * math.fsum(values * k0_array(y * indices))

    return kernel_sum


def h_functional_residual(
    h: Callable[[float], float], x: float, spec: ZSeriesSpec = TOY_SPEC
) -> float:
    """h(x⁻¹) + εx^{-n}h(x), zero when h satisfies its functional equation."""
    x = validate_positive(x, "x")
    return h(1.0 / x) + spec.epsilon * x ** (-spec.n) * h(x)


def omega_quadrature(
    h: Callable[[float], float],
    s: float,
    spec: ZSeriesSpec = ELLIPTIC_SPEC,
    t_cut: float = 8.0,
    window: float = 4.0,
) -> float:
    """
    ω(s) = ∫₀¹ h(x)x^{s-n}dx/x for real s > n.

    With x = e^{-t}, the part t <= t_cut is integrated adaptively. Beyond
    t_cut, h(e^{-t}) is replaced by its fitted asymptotic form
    Σ_{m<=d}(p_m + q_m e^{-nt})t^m, d = λ_c + λ_γ - 1, whose Laplace
    transform is integrated in closed form.

    Raises:
        DomainError: If s <= n
        PrecisionError: If the quadrature does not converge
    """
    s = float(s)
    if not s > spec.n:
        raise DomainError(f"Invalid s. Must exceed n = {spec.n}, got: {s}")
    if spec.experimental:
        logger.warning(f"ZSeriesSpec {spec} is experimental")
    sigma = s - spec.n

    head = adaptive_quad(lambda t: h(math.exp(-t)) * math.exp(-sigma * t), 0.0, t_cut, target=1e-9)

    degree = spec.log_degree
    samples = np.linspace(t_cut - window, t_cut, 8 * (degree + 1))
    observed = np.array([h(math.exp(-t)) for t in samples])
    columns = []
    for m in range(degree + 1):
        columns.append(samples**m)
        columns.append(np.exp(-spec.n * samples) * samples**m)
    design = np.column_stack(columns)
    norms = np.linalg.norm(design, axis=0)
    norms[norms == 0] = 1.0
    coefficients, *_ = np.linalg.lstsq(design / norms, observed, rcond=None)
    coefficients = coefficients / norms

    residual = float(np.max(np.abs(design @ coefficients - observed)))
    if residual > 1e-8 * max(1.0, float(np.max(np.abs(observed)))):
        logger.warning(f"Asymptotic fit of h beyond t={t_cut} has residual {residual:.2e}")

    tail = 0.0
    for m in range(degree + 1):
        plain, damped = coefficients[2 * m], coefficients[2 * m + 1]
        for coefficient, rate in ((plain, sigma), (damped, sigma + spec.n)):
            incomplete = special.gammaincc(m + 1, rate * t_cut) * special.gamma(m + 1)
            tail += coefficient * incomplete / rate ** (m + 1)

    return head + float(tail)


def xi_quadrature(
    source: Union[str, CoeffSeries, Callable[[float], float]],
    s: float,
    spec: ZSeriesSpec = TOY_SPEC,
) -> float:
    """
    ξ(s) = ∫₁^∞(Σ_ν c(ν)κ_γ(νx^n))x^s dx/x.

    Args:
        source: "toy" (θ(x²) - 1), a coefficient series (elliptic kernel), or the
            kernel sum itself as a callable
        s: Real argument
        spec: Family parameters (used for coefficient series)
    """
    if isinstance(source, str):
        if source != "toy":
            raise ValidationError(f"Invalid source. Must be 'toy', got: {source}")
        kernel_sum: Callable[[float], float] = toy_kernel_sum
    elif isinstance(source, CoeffSeries):
        kernel_sum = series_kernel_sum(source, spec)
    else:
        kernel_sum = source

    s = float(s)
    return adaptive_quad(
        lambda x: kernel_sum(x) * x ** (s - 1.0), 1.0, np.inf, epsabs=1e-14, target=1e-9
    )


def toy_identity_residual(s: float) -> float:
    """ζ̂(s) - ξ(s) - ξ(1-s) + ω(s) for the toy family, ω by quadrature (s > 1)."""
    omega = omega_quadrature(toy_h, s, TOY_SPEC)
    return toy_completed_zeta(s) - xi_quadrature("toy", s) - xi_quadrature("toy", 1.0 - s) + omega
