"""
Random and deterministic degree-two Euler products with nonnegative coefficients.

For a sample ω of the torus Ω_S the series

    D_ω(s) = ζ(2s)²ζ(2s-1)²/L(2s-1/2, ω)²

has nonnegative Dirichlet coefficients c_ω(ν) supported on perfect squares.
The same construction with ω(p) replaced by 1 or by a quadratic character
χ(p), raised to the power k, gives D_{1,k} and D_{χ,k}.

Local factors are expanded in v = p^{-2s} with mpmath at ``LOCAL_DPS``
digits and only then rounded, so a nonnegative local expansion stays
nonnegative in storage.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import pandas as pd
from sympy import factorint, legendre_symbol

from .curves import zeta_pair_denominator
from .dirichlet import (
    CoeffSeries,
    EulerFactorMap,
    euler_expand,
    prime_sieve,
    smallest_prime_factors,
    square_support,
)
from .exceptions import BoundError, DomainError, NonnegativityError
from .utils import validate_grid, validate_positive_int, validate_prime
from .zseries import TruncationPlan, series_evaluator, sign_scan

logger = logging.getLogger(__name__)

LOCAL_DPS = 32
FIRST_CHANGE_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


_DENOMINATORS = EulerFactorMap(default=zeta_pair_denominator)


@dataclass(frozen=True)
class OmegaSample:
    """
    A point ω of Ω_S restricted to the primes p <= P outside S.

    Args:
        excluded: The finite prime set S
        primes: Sampled primes in increasing order
        angles: arg ω(p) in [0, 2π), aligned with ``primes``
        seed: Seed the angles were drawn from
        bound: Sampling bound P
    """

    excluded: FrozenSet[int]
    primes: np.ndarray
    angles: np.ndarray
    seed: int
    bound: int

    def _position(self, p: int) -> int:
        index = int(np.searchsorted(self.primes, p))
        if index >= self.primes.size or self.primes[index] != p:
            raise KeyError(p)
        return index

    def omega(self, p: int) -> complex:
        """ω(p) = e^{iθ_p}."""
        theta = float(self.angles[self._position(p)])
        return complex(math.cos(theta), math.sin(theta))

    def re_omega(self, p: int) -> float:
        return math.cos(float(self.angles[self._position(p)]))

    def as_dict(self) -> Dict[int, float]:
        return {int(p): float(a) for p, a in zip(self.primes, self.angles)}


def _validate_excluded(S: Iterable[int]) -> FrozenSet[int]:
    return frozenset(validate_prime(p) for p in S)


def sample_omega(S: Iterable[int], P: int, seed: int) -> OmegaSample:
    """
    Draw independent Haar-uniform angles for every prime p <= P outside S.

    Args:
        S: Excluded primes
        P: Sampling bound, P >= 2
        seed: Seed of the numpy generator

    Returns:
        OmegaSample; the same (S, P, seed) always yields the same sample
    """
    P = validate_positive_int(P, "P", minimum=2)
    seed = validate_positive_int(seed, "seed", minimum=0)
    excluded = _validate_excluded(S)

    primes = prime_sieve(P)
    primes = primes[~np.isin(primes, list(excluded))] if excluded else primes
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=primes.size)
    primes.setflags(write=False)
    angles.setflags(write=False)
    return OmegaSample(excluded, primes, angles, seed, P)


def _check_sampling_bound(bound: int, root: int) -> None:
    largest = prime_sieve(root)
    if largest.size and int(largest[-1]) > bound:
        raise BoundError(
            f"Sampling bound P={bound} is too small; coefficients up to {root}² "
            f"need every prime up to {int(largest[-1])}"
        )


def _omega_numerator(p: int, re_omega: float) -> Tuple[Any, ...]:
    """(1 - 2Re ω(p)√p·v + p·v²)² in v, computed at LOCAL_DPS digits."""
    with mpmath.workdps(LOCAL_DPS):
        a = 2 * mpmath.mpf(re_omega) * mpmath.sqrt(p)
        return (1, -2 * a, a * a + 2 * p, -2 * a * p, mpmath.mpf(p) ** 2)


def d_omega_coeffs(omega: OmegaSample, N: int) -> CoeffSeries:
    """
    Coefficients c_ω(ν), ν <= N, of ζ(2s)²ζ(2s-1)²/L(2s-1/2, ω)².

    Primes in S keep only the ζ-factors.

    Raises:
        BoundError: If a prime p with p² <= N was not sampled
    """
    N = validate_positive_int(N, "limit")
    root = math.isqrt(N)
    _check_sampling_bound(omega.bound, root)

    numerators = {
        int(p): _omega_numerator(int(p), math.cos(float(theta)))
        for p, theta in zip(omega.primes, omega.angles)
        if p <= root
    }
    half = euler_expand(
        EulerFactorMap(factors=numerators),
        root,
        denominator=_DENOMINATORS,
        dps=LOCAL_DPS,
        label=f"D_omega[{omega.seed}]",
    )
    return square_support(half, N)


def _power_numerator(chi: int, p: int, k: int) -> Tuple[Any, ...]:
    """(1 - χ√p·v)^{2k} in v, computed at LOCAL_DPS digits."""
    if chi == 0 or k == 0:
        return (1,)
    with mpmath.workdps(LOCAL_DPS):
        root = chi * mpmath.sqrt(p)
        return tuple(
            mpmath.binomial(2 * k, j) * (-root) ** j if j else 1 for j in range(2 * k + 1)
        )


def _character_family(chi: Callable[[int], int], k: int, N: int, label: str) -> CoeffSeries:
    k = validate_positive_int(k, "k", minimum=0)
    N = validate_positive_int(N, "limit")
    root = math.isqrt(N)
    factors = EulerFactorMap(
        default=lambda p: _power_numerator(chi(p), p, k), max_degree=max(4, 2 * k)
    )
    half = euler_expand(factors, root, denominator=_DENOMINATORS, dps=LOCAL_DPS, label=label)
    return square_support(half, N)


def d1k_coeffs(k: int, N: int) -> CoeffSeries:
    """Coefficients of (ζ(2s)ζ(2s-1)/ζ(2s-1/2)^k)² up to N."""
    return _character_family(lambda p: 1, k, N, f"D_1,{k}")


def kronecker_symbol(d: int, n: int) -> int:
    """
    Kronecker symbol (d/n) for n >= 1.

    Multiplicative in n; (d/2) is 0 for even d and ±1 by d mod 8 otherwise.
    """
    n = validate_positive_int(n, "n")
    result = 1
    for p, e in factorint(n).items():
        if p == 2:
            if d % 2 == 0:
                return 0
            local = 1 if d % 8 in (1, 7) else -1
        elif d % p == 0:
            return 0
        else:
            local = legendre_symbol(d % p, p)
        result *= local**e
    return result


def is_fundamental_discriminant(d: int) -> bool:
    """
    True for d = 1 and for the discriminants of quadratic fields.

    Those are d ≡ 1 (mod 4) squarefree, or d = 4m with m ≡ 2, 3 (mod 4) squarefree.
    """
    d = int(d)
    if d == 1:
        return True
    if d == 0:
        return False

    def squarefree(m: int) -> bool:
        return all(e == 1 for e in factorint(abs(m)).values())

    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def dchik_coeffs(d: int, k: int, N: int) -> CoeffSeries:
    """
    Coefficients of (ζ(2s)ζ(2s-1)/L(2s-1/2, χ_d)^k)² up to N.

    Raises:
        DomainError: If d is not a fundamental discriminant
    """
    if not is_fundamental_discriminant(d):
        raise DomainError(f"Invalid d. Must be a fundamental discriminant, got: {d}")
    return _character_family(lambda p: kronecker_symbol(d, p), k, N, f"D_chi{d},{k}")


def local_identity_coefficients(p: int, re_omega: float, order: int) -> List[float]:
    """
    Closed-form coefficients of (1 - 2√p·Reω·u + pu²)/((1-u)(1-pu)) up to u^order.

    Equals 1 + (p + 1 - 2√p·Reω)·Σ_{n>=1}(1 + p + ... + p^{n-1})uⁿ, each
    coefficient nonnegative because |Reω| <= 1.
    """
    p = validate_prime(p)
    order = validate_positive_int(order, "order", minimum=0)
    leading = p + 1 - 2.0 * math.sqrt(p) * re_omega
    coefficients = [1.0]
    geometric = 0
    for n in range(1, order + 1):
        geometric += p ** (n - 1)
        coefficients.append(leading * geometric)
    return coefficients


def _blame_prime(index: int) -> int:
    spf = smallest_prime_factors(index)
    return int(spf[index])


def assert_nonnegative(c: CoeffSeries, tolerance: float = 0.0) -> CoeffSeries:
    """
    Check c(ν) >= -tolerance for every stored ν.

    Raises:
        NonnegativityError: Naming the first offending ν and its smallest prime factor
    """
    negative = np.flatnonzero(c.values < -tolerance)
    if negative.size:
        index = int(negative[0]) + 1
        value = c[index]
        prime = _blame_prime(index) if index > 1 else None
        raise NonnegativityError(
            f"Series '{c.label}' has c({index}) = {value:.6g} < 0 (prime {prime})",
            index=index,
            prime=prime,
            value=value,
        )
    return c


@dataclass
class SampleOutcome:
    """Sign-scan outcome of one ω-sample."""

    sample: int
    seed: int
    sign_changes: int
    first_change: Optional[float]
    prefix_sign: Optional[str]
    indeterminate: int


@dataclass
class BatchSummary:
    """
    Summary of a batch sign study.

    ``first_change_quantiles`` holds the quantiles FIRST_CHANGE_QUANTILES of
    the first bracketed sign change over the samples that have one.
    """

    num_samples: int
    seed: int
    nonneg_violations: int = 0
    no_sign_change_fraction: Optional[float] = None
    first_change_quantiles: List[float] = field(default_factory=list)
    outcomes: List[SampleOutcome] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_samples": self.num_samples,
            "seed": self.seed,
            "nonneg_violations": self.nonneg_violations,
            "no_sign_change_fraction": self.no_sign_change_fraction,
            "first_change_quantiles": list(self.first_change_quantiles),
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [vars(o) for o in self.outcomes],
            columns=[
                "sample",
                "seed",
                "sign_changes",
                "first_change",
                "prefix_sign",
                "indeterminate",
            ],
        )


def sample_seeds(seed: int, num_samples: int) -> List[int]:
    """Independent 63-bit child seeds spawned from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(num_samples)
    return [int(child.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for child in children]


def batch_sign_study(
    S: Iterable[int],
    P: int,
    N: int,
    num_samples: int,
    x_grid: Sequence[float],
    seed: int,
    R: float = 20.0,
    workers: int = 1,
) -> BatchSummary:
    """
    Sign scans of Z_{c_ω} over independent ω-samples.

    Every sample is checked for nonnegativity before it is evaluated; the
    coefficient limit is raised to the plan's cutoff T = R/x_lo² if needed.

    Args:
        S: Excluded primes
        P: Sampling bound
        N: Minimal coefficient limit
        num_samples: Number of ω-samples
        x_grid: (x_lo, x_hi, points)
        seed: Master seed
        R: Validity ratio of the truncation plan
        workers: Samples evaluated concurrently

    Raises:
        NonnegativityError: If a sample produces a negative coefficient
        BoundError: If P is too small for the coefficient limit
    """
    num_samples = validate_positive_int(num_samples, "num_samples", minimum=0)
    seed = validate_positive_int(seed, "seed", minimum=0)
    workers = validate_positive_int(workers, "workers")
    x_lo, x_hi, points = validate_grid(*x_grid)
    excluded = _validate_excluded(S)

    summary = BatchSummary(num_samples=num_samples, seed=seed)
    if num_samples == 0:
        return summary

    plan = TruncationPlan.for_grid(x_lo, R=R)
    limit = max(validate_positive_int(N, "N"), plan.terms)
    _check_sampling_bound(P, math.isqrt(limit))

    def run(item: Tuple[int, int]) -> SampleOutcome:
        index, child_seed = item
        omega = sample_omega(excluded, P, child_seed)
        c = assert_nonnegative(d_omega_coeffs(omega, limit))
        report = sign_scan(series_evaluator(c, plan), x_lo, x_hi, points)
        first = None
        if report.brackets:
            a, b = report.brackets[0]
            first = math.sqrt(a * b)
        return SampleOutcome(
            index, child_seed, len(report.brackets), first, report.prefix_sign, report.indeterminate
        )

    items = list(enumerate(sample_seeds(seed, num_samples)))
    logger.info(f"Batch sign study: {num_samples} samples, limit {limit}, {workers} workers")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            summary.outcomes = list(pool.map(run, items))
    else:
        summary.outcomes = [run(item) for item in items]

    firsts = [o.first_change for o in summary.outcomes if o.first_change is not None]
    summary.no_sign_change_fraction = 1.0 - len(firsts) / num_samples
    if firsts:
        summary.first_change_quantiles = [
            float(q) for q in np.quantile(firsts, FIRST_CHANGE_QUANTILES)
        ]
    return summary
