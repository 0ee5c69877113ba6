"""
Truncated Dirichlet-series coefficient arithmetic.

A Dirichlet series Σ c(ν)ν^{-s} is represented by its first N coefficients.
This module builds such truncations from Euler products, multiplies them,
relocates their support (s -> 2s, multiplication by q^{-2s}) and forms the
divisor weights a(n) = Σ_{d|n} c(d)σ₀(n/d) consumed by the boundary-term
series in :mod:`zeta_boundary.zseries`.
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import pandas as pd

from .exceptions import InvalidFactorError, UsageError, ValidationError
from .utils import validate_positive_int

logger = logging.getLogger(__name__)

Number = Union[int, float]

# Float64 represents every integer below this exactly.
EXACT_INTEGER_LIMIT = 2**53

_SIEVE_LOCK = threading.Lock()
_SIEVE_CACHE: Dict[str, np.ndarray] = {}
_MIN_SIEVE_SIZE = 1024


def _grown_size(requested: int, current: Optional[np.ndarray]) -> int:
    size = max(requested, _MIN_SIEVE_SIZE)
    if current is not None:
        size = max(size, 2 * (len(current) - 1))
    return size


def _prime_table(n: int) -> np.ndarray:
    """Boolean primality table covering 0..n (possibly longer)."""
    with _SIEVE_LOCK:
        table = _SIEVE_CACHE.get("is_prime")
        if table is not None and len(table) > n:
            return table

        size = _grown_size(n, table)
        table = np.ones(size + 1, dtype=bool)
        table[:2] = False
        for i in range(2, math.isqrt(size) + 1):
            if table[i]:
                table[i * i :: i] = False
        table.setflags(write=False)
        _SIEVE_CACHE["is_prime"] = table
        logger.info(f"Prime sieve extended to {size}")
        return table


def prime_sieve(n: int) -> np.ndarray:
    """
    Return all primes p <= n in increasing order.

    The underlying sieve of Eratosthenes is cached and shared read-only; it is
    only rebuilt (at least doubling) when a larger bound is requested.
    """
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    table = _prime_table(n)
    return np.flatnonzero(table[: n + 1]).astype(np.int64)


def smallest_prime_factors(n: int) -> np.ndarray:
    """Return spf with spf[m] the least prime factor of m for 2 <= m <= n."""
    with _SIEVE_LOCK:
        spf = _SIEVE_CACHE.get("spf")
        if spf is not None and len(spf) > n:
            return spf

        size = _grown_size(n, spf)
        spf = np.zeros(size + 1, dtype=np.int64)
        for p in range(2, size + 1):
            if spf[p] == 0:
                block = spf[p::p]
                block[block == 0] = p
        spf.setflags(write=False)
        _SIEVE_CACHE["spf"] = spf
        return spf


def divisor_counts(n: int) -> np.ndarray:
    """Return sigma with sigma[m] = σ₀(m) for 1 <= m <= n and sigma[0] = 0."""
    with _SIEVE_LOCK:
        counts = _SIEVE_CACHE.get("sigma0")
        if counts is not None and len(counts) > n:
            return counts

        size = _grown_size(n, counts)
        counts = np.zeros(size + 1, dtype=np.int64)
        for d in range(1, size + 1):
            counts[d::d] += 1
        counts.setflags(write=False)
        _SIEVE_CACHE["sigma0"] = counts
        logger.info(f"Divisor-count table extended to {size}")
        return counts


def prime_power_exponent(n: int, p: int) -> int:
    """Largest k with p**k <= n."""
    k, q = 0, p
    while q <= n:
        k += 1
        q *= p
    return k


@dataclass(frozen=True, eq=False)
class CoeffSeries:
    """
    Truncated Dirichlet series Σ_{ν<=N} c(ν)ν^{-s}.

    Args:
        values: Coefficients c(1), ..., c(N) in order
        label: Free-form provenance string
        multiplicative: Whether the series is known to be multiplicative
        integral: Whether every coefficient is an exactly represented integer
    """

    values: np.ndarray
    label: str = ""
    multiplicative: bool = False
    integral: bool = False
    _data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValidationError("Invalid series. Must hold at least one coefficient")
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"Invalid series '{self.label}'. Coefficients must be finite")

        data = np.zeros(values.size + 1, dtype=float)
        data[1:] = values
        data.setflags(write=False)
        object.__setattr__(self, "_data", data)
        object.__setattr__(self, "values", data[1:])

    @classmethod
    def from_padded(
        cls,
        data: np.ndarray,
        label: str = "",
        multiplicative: bool = False,
        integral: bool = False,
    ) -> "CoeffSeries":
        """Build a series from an array whose entry 0 is a placeholder."""
        return cls(np.asarray(data)[1:], label, multiplicative, integral)

    @property
    def limit(self) -> int:
        return int(self.values.size)

    @property
    def padded(self) -> np.ndarray:
        """Read-only array with padded[n] = c(n) and padded[0] = 0."""
        return self._data

    def __len__(self) -> int:
        return self.limit

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.limit:
            raise IndexError(f"Index {n} outside 1..{self.limit}")
        return float(self._data[n])

    def nonzero(self) -> np.ndarray:
        """Indices (1-based) of the nonzero coefficients."""
        return np.flatnonzero(self.values) + 1

    def first_nonzero(self) -> Optional[int]:
        indices = self.nonzero()
        return int(indices[0]) if indices.size else None

    def minimum(self) -> Tuple[int, float]:
        """Return (index, value) of the smallest coefficient."""
        position = int(np.argmin(self.values))
        return position + 1, float(self.values[position])

    def truncate(self, n: int) -> "CoeffSeries":
        n = validate_positive_int(n, "limit")
        if n > self.limit:
            raise UsageError(f"Cannot extend series '{self.label}' from {self.limit} to {n}")
        return CoeffSeries(self.values[:n], self.label, self.multiplicative, self.integral)

    def scale(self, factor: float) -> "CoeffSeries":
        """Multiply every coefficient by ``factor``."""
        integral = self.integral and float(factor).is_integer()
        return CoeffSeries(self.values * factor, self.label, False, integral)

    def to_frame(self) -> pd.DataFrame:
        """DataFrame with columns index, value holding the nonzero coefficients."""
        indices = self.nonzero()
        return pd.DataFrame({"index": indices, "value": self._data[indices]})

    def is_multiplicative(self, rtol: float = 1e-12) -> bool:
        """Exhaustive check of c(mn) = c(m)c(n) over coprime m, n with mn <= N."""
        data = self._data
        n = self.limit
        if n >= 1 and data[1] != 1.0 and np.any(data[1:] != 0):
            return False

        scale = max(1.0, float(np.max(np.abs(data))))
        for m in range(2, n // 2 + 1):
            others = np.arange(m, n // m + 1)
            if others.size == 0:
                break
            others = others[np.gcd(others, m) == 1]
            expected = data[m] * data[others]
            actual = data[m * others]
            if not np.allclose(actual, expected, rtol=rtol, atol=rtol * scale):
                return False
        return True


def _check_limits(a: CoeffSeries, b: CoeffSeries) -> int:
    if a.limit != b.limit:
        raise UsageError(
            f"Mismatched series limits: '{a.label}' has {a.limit}, '{b.label}' has {b.limit}"
        )
    return a.limit


def _dirichlet_product(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=np.result_type(a, b))
    for d in np.flatnonzero(a[1:]) + 1:
        m = n // d
        out[d : d * m + 1 : d] += a[d] * b[1 : m + 1]
    return out


def convolve(a: CoeffSeries, b: CoeffSeries, label: Optional[str] = None) -> CoeffSeries:
    """
    Dirichlet convolution c(n) = Σ_{d|n} a(d)b(n/d).

    Integral inputs whose products stay below 2**53 are convolved in int64
    and are exact; everything else runs in float64.

    Raises:
        UsageError: If the two limits differ
    """
    n = _check_limits(a, b)
    name = label if label is not None else f"({a.label})*({b.label})"

    exact = a.integral and b.integral
    if exact:
        bound = float(np.sum(np.abs(a.values))) * float(np.max(np.abs(b.values)))
        exact = bound < EXACT_INTEGER_LIMIT

    if exact:
        product = _dirichlet_product(
            a.padded.astype(np.int64), b.padded.astype(np.int64), n
        ).astype(float)
    else:
        product = _dirichlet_product(a.padded, b.padded, n)

    return CoeffSeries.from_padded(
        product, name, a.multiplicative and b.multiplicative, exact
    )


def delta_series(n: int) -> CoeffSeries:
    """The unit δ₁ = (1, 0, 0, ...)."""
    n = validate_positive_int(n, "limit")
    values = np.zeros(n)
    values[0] = 1.0
    return CoeffSeries(values, "delta", multiplicative=True, integral=True)


def ones_series(n: int) -> CoeffSeries:
    """Coefficients of ζ(s)."""
    n = validate_positive_int(n, "limit")
    return CoeffSeries(np.ones(n), "zeta", multiplicative=True, integral=True)


def identity_series(n: int) -> CoeffSeries:
    """Coefficients of ζ(s-1), i.e. c(ν) = ν."""
    n = validate_positive_int(n, "limit")
    return CoeffSeries(
        np.arange(1, n + 1, dtype=float), "zeta(s-1)", multiplicative=True, integral=True
    )


def sigma0_series(n: int) -> CoeffSeries:
    """Coefficients of ζ(s)², i.e. the divisor function σ₀."""
    n = validate_positive_int(n, "limit")
    counts = divisor_counts(n)
    return CoeffSeries(
        counts[1 : n + 1].astype(float), "sigma0", multiplicative=True, integral=True
    )


Polynomial = Sequence[Number]


@dataclass(frozen=True)
class EulerFactorMap:
    """
    Local factors f_p(u), u = p^{-s}, of an Euler product ∏_p f_p(p^{-s}).

    Args:
        factors: Explicit polynomial (coefficient list, constant term first) per prime
        default: Callable p -> polynomial used for primes missing from ``factors``;
            when absent such primes contribute the factor 1
        max_degree: Largest admitted polynomial degree
    """

    factors: Mapping[int, Polynomial] = field(default_factory=dict)
    default: Optional[Callable[[int], Polynomial]] = None
    max_degree: int = 4

    def local(self, p: int) -> Tuple[Number, ...]:
        """
        Return the validated local polynomial at p.

        Raises:
            InvalidFactorError: If the constant term is not 1 or the degree is too large
        """
        if p in self.factors:
            poly = tuple(self.factors[p])
        elif self.default is not None:
            poly = tuple(self.default(p))
        else:
            return (1,)

        if not poly or poly[0] != 1:
            raise InvalidFactorError(
                f"Invalid Euler factor at p={p}. Constant term must be 1, got: {poly[:1]}"
            )
        while len(poly) > 1 and poly[-1] == 0:
            poly = poly[:-1]
        if len(poly) - 1 > self.max_degree:
            raise InvalidFactorError(
                f"Invalid Euler factor at p={p}. Degree must be <= {self.max_degree}, "
                f"got: {len(poly) - 1}"
            )
        return poly


def _is_integral_poly(poly: Sequence[Number]) -> bool:
    return all(isinstance(c, (int, np.integer)) and not isinstance(c, bool) for c in poly)


def _reciprocal(poly: Sequence, order: int, one: object) -> List:
    """Power series 1/poly up to u**order; poly[0] == 1."""
    series = [one] + [one * 0 for _ in range(order)]
    for k in range(1, order + 1):
        acc = one * 0
        for j in range(1, min(k, len(poly) - 1) + 1):
            acc += poly[j] * series[k - j]
        series[k] = -acc
    return series


def _truncated_product(left: Sequence, right: Sequence, order: int, zero: object) -> List:
    out = [zero for _ in range(order + 1)]
    for i, a in enumerate(left[: order + 1]):
        if a == 0:
            continue
        for j, b in enumerate(right[: order + 1 - i]):
            out[i + j] += a * b
    return out


def local_series(
    poly: Sequence[Number],
    order: int,
    invert: bool = False,
    denominator: Optional[Sequence[Number]] = None,
    dps: Optional[int] = None,
) -> List[float]:
    """
    Local power series of poly(u)^{±1} / denominator(u) up to u**order.

    Integer polynomials are expanded in exact integer arithmetic; ``dps``
    switches to mpmath with that many decimal digits before rounding to float.
    """
    polys = [poly] + ([denominator] if denominator is not None else [])
    exact = dps is None and all(_is_integral_poly(p) for p in polys)

    if exact:
        one: object = 1
        convert: Callable[[Number], object] = int
    elif dps is not None:
        one = mpmath.mpf(1)
        convert = mpmath.mpf
    else:
        one = 1.0
        convert = float

    def expand() -> List[float]:
        numerator = [convert(c) for c in poly]
        if invert:
            series = _reciprocal(numerator, order, one)
        else:
            series = (numerator + [one * 0] * (order + 1))[: order + 1]
        if denominator is not None:
            inverse = _reciprocal([convert(c) for c in denominator], order, one)
            series = _truncated_product(series, inverse, order, one * 0)
        return [float(c) for c in series]

    if dps is not None:
        with mpmath.workdps(dps):
            return expand()
    return expand()


def euler_expand(
    factors: EulerFactorMap,
    n: int,
    invert: bool = False,
    denominator: Optional[EulerFactorMap] = None,
    dps: Optional[int] = None,
    label: str = "euler",
) -> CoeffSeries:
    """
    Expand ∏_p f_p(p^{-s})^{±1} into Dirichlet coefficients up to n.

    Each local factor is expanded as a power series to order log_p(n) (the
    reciprocal when ``invert`` is set, divided by the matching ``denominator``
    factor when one is given), then the prime powers are assembled
    multiplicatively.

    Args:
        factors: Local polynomials
        n: Truncation limit
        invert: Use the reciprocal of each local polynomial
        denominator: Optional second map whose local polynomials divide the result
        dps: Decimal digits for an extended-precision local expansion
        label: Provenance label of the result

    Returns:
        Multiplicative CoeffSeries of length n

    Raises:
        InvalidFactorError: If a local polynomial has constant term != 1
    """
    n = validate_positive_int(n, "limit")
    data = np.zeros(n + 1, dtype=float)
    data[1] = 1.0
    integral = dps is None

    for p in prime_sieve(n):
        p = int(p)
        order = prime_power_exponent(n, p)
        poly = factors.local(p)
        den = denominator.local(p) if denominator is not None else None
        if poly == (1,) and (den is None or den == (1,)):
            continue

        integral = integral and _is_integral_poly(poly) and (den is None or _is_integral_poly(den))
        series = local_series(poly, order, invert, den, dps)

        base = data[1 : n // p + 1].copy()
        q = 1
        for k in range(1, order + 1):
            q *= p
            if series[k] != 0.0:
                count = n // q
                data[q : q * count + 1 : q] += series[k] * base[:count]

    if integral and np.max(np.abs(data)) >= EXACT_INTEGER_LIMIT:
        integral = False

    logger.info(f"Expanded Euler product '{label}' up to {n}")
    return CoeffSeries.from_padded(data, label, multiplicative=True, integral=integral)


def square_support(a: CoeffSeries, n: int) -> CoeffSeries:
    """
    Substitute s -> 2s: c(m²) = a(m) for m² <= n, zero elsewhere.

    Raises:
        UsageError: If a is too short to fill all squares up to n
    """
    n = validate_positive_int(n, "limit")
    root = math.isqrt(n)
    if root > a.limit:
        raise UsageError(f"Series '{a.label}' has {a.limit} terms, squares up to {n} need {root}")

    data = np.zeros(n + 1)
    squares = np.arange(1, root + 1, dtype=np.int64)
    data[squares * squares] = a.padded[1 : root + 1]
    return CoeffSeries.from_padded(data, f"sq({a.label})", a.multiplicative, a.integral)


def shift_support(a: CoeffSeries, q: int, n: int) -> CoeffSeries:
    """
    Multiply by q^{-2s}: c(q²m) = a(m) for q²m <= n, zero elsewhere.

    Raises:
        UsageError: If a is too short to fill all multiples of q² up to n
    """
    q = validate_positive_int(q, "q")
    n = validate_positive_int(n, "limit")
    step = q * q
    count = n // step
    if count > a.limit:
        raise UsageError(f"Series '{a.label}' has {a.limit} terms, shift by {q}² needs {count}")

    data = np.zeros(n + 1)
    if count:
        data[step : step * count + 1 : step] = a.padded[1 : count + 1]
    label = a.label if q == 1 else f"{q}^(-2s)*{a.label}"
    return CoeffSeries.from_padded(data, label, a.multiplicative and q == 1, a.integral)


def a_weights(c: CoeffSeries) -> CoeffSeries:
    """Divisor weights a(n) = Σ_{d|n} c(d)σ₀(n/d), i.e. c * σ₀."""
    return convolve(c, sigma0_series(c.limit), label=f"a[{c.label}]")


def growth_constant(a: CoeffSeries, eps: float) -> float:
    """Empirical M_ε = max_n |a(n)|/n^ε over the stored range."""
    indices = np.arange(1, a.limit + 1, dtype=float)
    return float(np.max(np.abs(a.values) / indices**eps))
