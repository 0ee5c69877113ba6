"""
Special functions used by every boundary-term series.

K₀ and K₁ come from scipy's Chebyshev implementations (exponentially scaled
beyond the underflow threshold) and are guarded by the large-argument
envelope K_ν(t) = √(π/2t)e^{-t}(1 + θ/(2t)), |θ| <= |ν² - 1/4|. Every infinite
series in this module is truncated by a proved tail bound, never by a fixed
term count.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np
from scipy import special

from .dirichlet import divisor_counts
from .exceptions import DomainError, PrecisionError, ValidationError

logger = logging.getLogger(__name__)

EULER_GAMMA = float("0.577215664901532860606512090082")
PI = float("3.14159265358979323846264338328")
LOG_4PI = math.log(4.0 * PI)
# log Q with Q = e^γ/(4π)
LOG_Q = EULER_GAMMA - LOG_4PI
SQRT_HALF_PI = math.sqrt(PI / 2.0)

# scipy.special.k0/k1 underflow past this argument; use the scaled forms.
_UNDERFLOW_ARGUMENT = 700.0
_ENVELOPE_CHECK_FROM = 10.0


@dataclass(frozen=True)
class AccuracyBudget:
    """
    Error budget for series and special-function evaluation.

    Args:
        rel_tol: Relative tolerance
        abs_tol: Absolute floor
        max_terms: Largest admitted series length
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 10**6

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ValidationError(f"Invalid rel_tol. Must be positive, got: {self.rel_tol}")
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ValidationError(f"Invalid abs_tol. Must be positive, got: {self.abs_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValidationError(f"Invalid max_terms. Must be >= 1, got: {self.max_terms}")

    def target(self, value: float) -> float:
        """Admissible absolute error for a result of size ``value``."""
        return max(self.rel_tol * abs(value), self.abs_tol)


DEFAULT_BUDGET = AccuracyBudget()


@dataclass(frozen=True)
class Envelope:
    """
    Majorant |g(y)| <= const·y^power·e^{-y}, valid for y >= 1.

    Args:
        power: Exponent of y
        const: Leading constant
    """

    power: float
    const: float

    def bound(self, y: float) -> float:
        if y < 1.0:
            return math.inf
        return self.const * math.exp(self.power * math.log(y) - y)


K0_ENVELOPE = Envelope(-0.5, 1.125 * SQRT_HALF_PI)
K1_ENVELOPE = Envelope(-0.5, 1.375 * SQRT_HALF_PI)
# 624·√(π/2) = 312·√(2π)
KERNEL_ENVELOPE = Envelope(4.5, 624.0 * SQRT_HALF_PI)
W_ENVELOPE = Envelope(3.5, 178.0 * SQRT_HALF_PI)


def _validate_argument(x: float, name: str = "x") -> float:
    try:
        value = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"Invalid {name}. Must be a real number, got: {x!r}")
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"Invalid {name}. Must be positive and finite, got: {x}")
    return value


def _bessel(x: float, order: int, budget: AccuracyBudget) -> float:
    x = _validate_argument(x)
    plain, scaled = (special.k0, special.k0e) if order == 0 else (special.k1, special.k1e)

    if x < _UNDERFLOW_ARGUMENT:
        value = float(plain(x))
    else:
        value = float(scaled(x)) * math.exp(-x)

    if not math.isfinite(value) or value < 0:
        raise PrecisionError(f"K_{order}({x}) evaluation failed, got: {value}")

    if x >= _ENVELOPE_CHECK_FROM:
        theta = 0.25 if order == 0 else 0.75
        ratio = float(scaled(x)) * math.sqrt(2.0 * x / PI)
        if abs(ratio - 1.0) > theta / (2.0 * x) + 1e-14:
            raise PrecisionError(f"K_{order}({x}) violates its asymptotic envelope")

    return value


def bessel_k0(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    Modified Bessel function K₀(x) for real x > 0.

    Values are full double precision for every budget; results below the
    double range underflow to 0, which lies within any absolute floor.

    Raises:
        DomainError: If x <= 0
        PrecisionError: If the value cannot be certified
    """
    return _bessel(x, 0, budget)


def bessel_k1(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    Modified Bessel function K₁(x) for real x > 0.

    Raises:
        DomainError: If x <= 0
        PrecisionError: If the value cannot be certified
    """
    return _bessel(x, 1, budget)


def k0_array(y: np.ndarray) -> np.ndarray:
    """Vectorised K₀ for positive arguments; underflows to 0."""
    return special.k0(np.asarray(y, dtype=float))


def k1_array(y: np.ndarray) -> np.ndarray:
    """Vectorised K₁ for positive arguments; underflows to 0."""
    return special.k1(np.asarray(y, dtype=float))


def kernel_K_array(y: np.ndarray) -> np.ndarray:
    """𝒦(y) = (16y⁵+288y³+16y)K₀(y) - (128y⁴+64y²)K₁(y), elementwise."""
    y = np.asarray(y, dtype=float)
    y2 = y * y
    return (16.0 * y2 * y2 + 288.0 * y2 + 16.0) * y * k0_array(y) - (
        128.0 * y2 + 64.0
    ) * y2 * k1_array(y)


def kernel_W_array(y: np.ndarray) -> np.ndarray:
    """W(y) = (64y² + 16y⁴)K₀(y) - 64y³K₁(y), the (x d/dx)⁴ image of K₀(Ax⁻²)."""
    y = np.asarray(y, dtype=float)
    y2 = y * y
    return (64.0 + 16.0 * y2) * y2 * k0_array(y) - 64.0 * y2 * y * k1_array(y)


def kernel_K(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    The kernel 𝒦(x) = (16x⁵+288x³+16x)K₀(x) - (128x⁴+64x²)K₁(x).

    Raises:
        DomainError: If x <= 0
    """
    x = _validate_argument(x)
    k0 = bessel_k0(x, budget)
    k1 = bessel_k1(x, budget)
    x2 = x * x
    return (16.0 * x2 * x2 + 288.0 * x2 + 16.0) * x * k0 - (128.0 * x2 + 64.0) * x2 * k1


def log_upper_gamma_bound(a: float, z: float) -> float:
    """
    Upper bound on log Γ(a, z).

    Uses Γ(a,z) <= z^{a-1}e^{-z} for a <= 1 and
    Γ(a,z) <= z^{a-1}e^{-z}/(1 - (a-1)/z) for a > 1, z > a - 1.
    """
    if z <= 0:
        return math.inf
    log_bound = (a - 1.0) * math.log(z) - z
    if a <= 1.0:
        return log_bound
    if z <= a - 1.0:
        return math.inf
    return log_bound - math.log1p(-(a - 1.0) / z)


def envelope_tail(c: float, m: int, envelope: Envelope) -> float:
    """
    Certified bound on Σ_{N>m} σ₀(N)·|g(cN)| for g dominated by ``envelope``.

    σ₀(N) <= 2√N turns the summand into 2c^{-1/2}·const·u^p e^{-u} with
    u = cN and p = power + 1/2; once c·m >= max(1, p) the summand decreases
    and the sum is bounded by Γ(p+1, cm)/c. Returns inf when the bound does
    not yet apply.
    """
    z = c * m
    p = envelope.power + 0.5
    if z < max(1.0, p + 1.0):
        return math.inf
    log_tail = (
        math.log(2.0 * envelope.const)
        - 1.5 * math.log(c)
        + log_upper_gamma_bound(p + 1.0, z)
    )
    return math.exp(log_tail) if log_tail < 709.0 else math.inf


class SeriesSum(NamedTuple):
    """Truncated series value with its certified tail and term statistics."""

    value: float
    tail: float
    terms: int
    magnitude: float


def divisor_series_sum(
    c: float,
    kernel: Callable[[np.ndarray], np.ndarray],
    envelope: Envelope,
    budget: AccuracyBudget = DEFAULT_BUDGET,
) -> SeriesSum:
    """
    Evaluate S = Σ_{N>=1} σ₀(N)·g(cN) to within the budget.

    Args:
        c: Positive scale of the kernel argument
        kernel: Vectorised g
        envelope: Majorant of |g| used for the tail
        budget: Accuracy budget

    Returns:
        SeriesSum with the value, the tail bound, the term count and Σ|terms|

    Raises:
        PrecisionError: If more than budget.max_terms terms would be needed
    """
    c = _validate_argument(c, "scale")
    start = max(1.0, envelope.power + 1.5) / c
    if start > budget.max_terms:
        raise PrecisionError(
            f"Series at scale {c:.3e} needs more than {budget.max_terms} terms"
        )

    m = max(16, int(math.ceil(start)))
    while True:
        m = min(m, budget.max_terms)
        sigma = divisor_counts(m)[1 : m + 1]
        terms = sigma * kernel(c * np.arange(1, m + 1, dtype=float))
        total = math.fsum(terms)
        tail = envelope_tail(c, m, envelope)
        if tail <= budget.target(total):
            return SeriesSum(total, tail, m, math.fsum(np.abs(terms)))
        if m >= budget.max_terms:
            raise PrecisionError(
                f"Series at scale {c:.3e} did not reach the budget within {m} terms"
            )
        m *= 2


def divisor_k0_sum(y: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> Tuple[float, float]:
    """Σ_{N>=1} σ₀(N)K₀(2πNy) with its tail bound."""
    y = _validate_argument(y, "y")
    result = divisor_series_sum(2.0 * PI * y, k0_array, K0_ENVELOPE, budget)
    return result.value, result.tail


def _theta_terms(x: float, target: float, budget: AccuracyBudget) -> int:
    """Smallest K with 2e^{-π(K+1)²x}/(1-e^{-πx}) <= target."""
    gap = -math.expm1(-PI * x)
    needed = math.log(2.0 / (gap * target)) / (PI * x)
    count = max(1, int(math.ceil(math.sqrt(max(needed, 0.0)))) - 1)
    if count > budget.max_terms:
        raise PrecisionError(f"theta({x}) needs {count} terms, above {budget.max_terms}")
    return count


def theta(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    Jacobi theta θ(x) = Σ_{k∈Z} e^{-πk²x} by direct summation.

    Raises:
        DomainError: If x <= 0
        PrecisionError: If the tail bound needs more than max_terms terms
    """
    x = _validate_argument(x)
    count = _theta_terms(x, budget.target(1.0), budget)
    k = np.arange(1, count + 1, dtype=float)
    return 1.0 + 2.0 * math.fsum(np.exp(-PI * k * k * x))


def theta_minus_one(x: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """θ(x) - 1 = 2Σ_{k>=1} e^{-πk²x}, accurate relative to itself."""
    x = _validate_argument(x)
    leading = 2.0 * math.exp(-PI * x)
    count = _theta_terms(x, budget.target(leading), budget)
    k = np.arange(1, count + 1, dtype=float)
    return 2.0 * math.fsum(np.exp(-PI * k * k * x))


def eisenstein_E(y: float, budget: AccuracyBudget = DEFAULT_BUDGET) -> float:
    """
    Central value E(y) = E*(iy, 1/2) of the real-analytic Eisenstein series.

    E(y) = √y·log y + (γ - log 4π)√y + 4√y·Σ_{N>=1} σ₀(N)K₀(2πNy)

    Raises:
        DomainError: If y <= 0
    """
    y = _validate_argument(y, "y")
    series, _ = divisor_k0_sum(y, budget)
    root = math.sqrt(y)
    return root * math.log(y) + LOG_Q * root + 4.0 * root * series


def fourth_difference(f: Callable[[float], float], t: float, h: float) -> float:
    """
    Fourth derivative of f at t by the 7-point central stencil (error O(h⁴)).
    """
    weights: Sequence[float] = (
        -1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0
    )
    samples = [f(t + j * h) for j in range(-3, 4)]
    return math.fsum(w * s for w, s in zip(weights, samples)) / h**4
