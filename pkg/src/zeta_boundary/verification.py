"""
Self-verification battery.

Each criterion is a named check returning a CriterionResult; ``run_battery``
runs all of them (or a selection) and never raises on a failed check, only on
an unknown name.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import mpmath
import numpy as np

from .curves import VARIANT_QE, ap, count_points, cE_coeffs, get_builtin, goldfeld_ladder
from .dirichlet import a_weights, prime_sieve
from .exceptions import ValidationError, ZetaBoundaryError
from .specfun import (
    AccuracyBudget,
    bessel_k0,
    bessel_k1,
    eisenstein_E,
    fourth_difference,
    kernel_K,
    theta,
)
from .stochastic import assert_nonnegative, d_omega_coeffs, sample_omega, sample_seeds
from .utils import log_grid
from .zseries import (
    TOY_SPEC,
    TruncationPlan,
    V,
    V_eisenstein,
    V_integral,
    Z_E0_truncated,
    Z_xnu_bounded,
    adaptive_quad,
    curve_evaluator,
    curve_plan,
    omega_quadrature,
    sign_scan,
    toy_h,
    toy_identity_residual,
    toy_omega,
)

logger = logging.getLogger(__name__)

CheckResult = Tuple[bool, str]


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one criterion."""

    name: str
    passed: bool
    detail: str
    elapsed: float


@dataclass(frozen=True)
class Criterion:
    name: str
    description: str
    check: Callable[[], CheckResult]


CRITERIA: Dict[str, Criterion] = {}


Check = Callable[[], CheckResult]


def criterion(name: str, description: str) -> Callable[[Check], Check]:
    """Register a check under ``name``."""

    def register(check: Check) -> Check:
        CRITERIA[name] = Criterion(name, description, check)
        return check

    return register


def _bessel_oracle(x: float, order: int) -> float:
    """K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt at 30 digits."""
    with mpmath.workdps(30):
        value = mpmath.quad(
            lambda t: mpmath.exp(-x * mpmath.cosh(t)) * mpmath.cosh(order * t),
            [0, 1, 5, mpmath.inf],
        )
        return float(value)


@criterion("bessel-accuracy", "K0, K1 within 1e-12 relative of a quadrature oracle on [1e-3, 50]")
def check_bessel_accuracy() -> CheckResult:
    worst = 0.0
    where = 0.0
    for x in log_grid(1e-3, 50.0, 200):
        for order, func in ((0, bessel_k0), (1, bessel_k1)):
            expected = _bessel_oracle(float(x), order)
            error = abs(func(float(x)) - expected) / expected
            if error > worst:
                worst, where = error, float(x)
    return worst <= 1e-12, f"max relative error {worst:.2e} at x={where:.4g}"


@criterion("theta-modularity", "|θ(1/x) - √x·θ(x)| <= 1e-12 on [0.1, 10]")
def check_theta_modularity() -> CheckResult:
    worst = max(abs(theta(1.0 / x) - math.sqrt(x) * theta(x)) for x in np.linspace(0.1, 10.0, 50))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


@criterion("eisenstein-invariance", "|E(y) - E(1/y)| <= 1e-10 on [1.05, 20]")
def check_eisenstein_invariance() -> CheckResult:
    worst = max(abs(eisenstein_E(y) - eisenstein_E(1.0 / y)) for y in np.linspace(1.05, 20.0, 20))
    return worst <= 1e-10, f"max deviation {worst:.2e}"


@criterion("v-two-route", "Bessel and Eisenstein routes for V agree within 1e-9")
def check_v_two_route() -> CheckResult:
    worst = 0.0
    for x in (0.5, 0.8, 1.3):
        for nu in (1.0, 2.0, 5.0):
            worst = max(worst, abs(V(x, nu) - V_eisenstein(x, nu)))
    return worst <= 1e-9, f"max deviation {worst:.2e}"


@criterion("v-integral", "double-theta quadrature of V agrees with the Bessel route within 1e-8")
def check_v_integral() -> CheckResult:
    deviation = abs(V_integral(0.9, 1.0) - V(0.9, 1.0))
    return deviation <= 1e-8, f"deviation {deviation:.2e} at (x, nu) = (0.9, 1)"


@criterion("z-derivative", "Z(x,ν) matches a finite difference of V in log x within 1e-5")
def check_z_derivative() -> CheckResult:
    budget = AccuracyBudget(rel_tol=1e-14)
    worst = 0.0
    for x, nu in ((0.5, 1.0), (0.8, 2.0), (1.0, 1.0), (1.3, 5.0), (2.0, 2.0)):
        numeric = fourth_difference(lambda t: V(math.exp(t), nu, budget), math.log(x), 0.05)
        analytic = Z_xnu_bounded(x, nu, budget).value
        worst = max(worst, abs(numeric - analytic) / abs(analytic))
    return worst <= 1e-5, f"max relative deviation {worst:.2e}"


@criterion("z-sign-structure", "Z(x,1) negative for small x, positive for large x, one sign change")
def check_z_sign_structure() -> CheckResult:
    negatives = [Z_xnu_bounded(x, 1.0) for x in (0.05, 0.1, 0.2)]
    positives = [Z_xnu_bounded(x, 1.0) for x in (3.0, 5.0, 10.0)]
    ok = all(v.value < -v.bound for v in negatives) and all(v.value > v.bound for v in positives)
    report = sign_scan(lambda x: Z_xnu_bounded(x, 1.0), 0.05, 10.0, 60)
    ok = ok and len(report.brackets) == 1
    return ok, f"certified endpoints {'ok' if ok else 'failed'}, brackets {report.brackets}"


@criterion("kernel-zero-integral", "|∫₀^∞ 𝒦(2πx)dx/x| <= 1e-8")
def check_kernel_zero_integral() -> CheckResult:
    value = adaptive_quad(
        lambda t: kernel_K(2.0 * math.pi * math.exp(t)),
        -40.0,
        3.0,
        epsabs=1e-12,
        epsrel=1e-12,
        points=[-2.0, 0.0, 1.0],
    )
    return abs(value) <= 1e-8, f"integral {value:.2e}"


@criterion("truncation-certificate", "|Z_E0(T) - Z_E0(4T)| <= bound on curve 11a")
def check_truncation_certificate(T: float = 2.5e3) -> CheckResult:
    curve = get_builtin("11a")
    plan = TruncationPlan(T)
    wide = plan.scaled(4.0)
    weights = a_weights(cE_coeffs(curve, wide.terms, VARIANT_QE))
    failures = []
    for x in log_grid(plan.min_x, 0.5, 20):
        narrow_value = Z_E0_truncated(weights, float(x), plan)
        wide_value = Z_E0_truncated(weights, float(x), wide)
        if abs(narrow_value.value - wide_value.value) > narrow_value.bound:
            failures.append(float(x))
    return not failures, f"violations at {failures}" if failures else "bound holds at 20 points"


@criterion("coefficient-nonnegativity", "c_E (11a, 37a) and 100 ω-samples have no negative entry")
def check_coefficient_nonnegativity() -> CheckResult:
    for label in ("11a", "37a"):
        assert_nonnegative(cE_coeffs(get_builtin(label), 10**5))
    for seed in sample_seeds(2024, 100):
        assert_nonnegative(d_omega_coeffs(sample_omega((), 100, seed), 10**4))
    return True, "no negative coefficient"


@criterion("toy-boundary-term", "ω(s) of the toy family matches 1/s + 1/(1-s)")
def check_toy_boundary_term() -> CheckResult:
    worst = max(abs(omega_quadrature(toy_h, s, TOY_SPEC) - toy_omega(s)) for s in (2.0, 3.0, 4.0))
    closure = abs(toy_identity_residual(3.0))
    ok = worst <= 1e-8 and closure <= 1e-7
    return ok, f"max deviation {worst:.2e}, identity residual {closure:.2e}"


@criterion("hasse-bound", "|a_p| <= 2√p up to 1e4 and a_p spot values on 37a")
def check_hasse_bound() -> CheckResult:
    for label in ("11a", "37a"):
        curve = get_builtin(label)
        for p in prime_sieve(10**4):
            info = ap(curve, int(p))
            if info.is_good and abs(info.ap) > 2.0 * math.sqrt(p):
                return False, f"{label}: a_{p} = {info.ap} violates the Hasse bound"
    curve = get_builtin("37a")
    expected = {2: -2, 3: -3, 5: -2}
    for p, value in expected.items():
        counted = p + 1 - count_points(curve, p)
        if ap(curve, p).ap != value or counted != value:
            return False, f"37a: a_{p} = {ap(curve, p).ap}, counted {counted}, expected {value}"
    return True, "Hasse bound and spot values hold"


@criterion("small-x-negativity", "every certified sign of Z_E on [0.25, 0.5] for 37a is negative")
def check_small_x_negativity() -> CheckResult:
    curve = get_builtin("37a")
    plan = curve_plan(curve, 0.25)
    report = sign_scan(curve_evaluator(curve, plan), 0.25, 0.5, 20)
    positives = [x for x, s in zip(report.xs, report.signs) if s == "+"]
    negatives = sum(1 for s in report.signs if s == "-")
    if positives:
        return False, f"certified positive at {positives}"
    return True, f"{negatives} certified negative, {report.indeterminate} indeterminate"


@criterion("goldfeld-trend", "partial Euler products follow (log T)^{-r} loosely")
def check_goldfeld_trend() -> CheckResult:
    ladder = (1e3, 1e4, 1e5)
    rank_one = goldfeld_ladder(get_builtin("37a"), ladder, 1)["L_T_logT_r"]
    ratio = float(rank_one.max() / rank_one.min())
    rank_zero = goldfeld_ladder(get_builtin("11a"), ladder, 0)["L_T"]
    drift = abs(float(rank_zero.iloc[2] / rank_zero.iloc[1]) - 1.0)
    ok = ratio <= 2.0 and drift <= 0.25
    return ok, f"37a max/min {ratio:.3f}, 11a drift {drift:.3f}"


def run_criterion(name: str) -> CriterionResult:
    """Run one criterion; any exception raised by the check counts as a failure."""
    entry = CRITERIA[name]
    start = time.perf_counter()
    try:
        passed, detail = entry.check()
    except ZetaBoundaryError as e:
        passed, detail = False, f"{type(e).__name__}: {e}"
    except Exception as e:
        logger.debug(f"Criterion {name} raised outside the library", exc_info=True)
        passed, detail = False, f"unexpected {type(e).__name__}: {e}"
    elapsed = time.perf_counter() - start
    level = logging.INFO if passed else logging.ERROR
    logger.log(level, f"Criterion {name}: {'pass' if passed else 'FAIL'} ({elapsed:.1f}s) {detail}")
    return CriterionResult(name, passed, detail, elapsed)


def run_battery(only: Optional[Iterable[str]] = None) -> List[CriterionResult]:
    """
    Run the named criteria (all of them by default) in registry order.

    Raises:
        ValidationError: If a requested name is unknown
    """
    names = list(CRITERIA) if only is None else list(only)
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise ValidationError(
            f"Invalid criterion. Must be one of: {', '.join(CRITERIA)}, got: {', '.join(unknown)}"
        )
    return [run_criterion(name) for name in names]
