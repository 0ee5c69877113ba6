"""
Elliptic curve data for the boundary-term series.

Provides a_p by point counting over F_p, reduction types at bad primes, the
Dirichlet coefficients of L(E,s), of ζ_E(s)² = (ζ(s)ζ(s-1)/L(E,s))² and of the
nonnegative sequences c(ν) feeding Z_E, together with the partial Euler
products L_T(E,1) and the constant C₁(T) of the partial-product transform.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sympy import factorint

from .dirichlet import (
    CoeffSeries,
    EulerFactorMap,
    convolve,
    euler_expand,
    prime_sieve,
    shift_support,
    square_support,
)
from .exceptions import (
    BoundError,
    ConfigError,
    DegenerateProductError,
    RequiresOverrideError,
    ValidationError,
)
from .specfun import EULER_GAMMA
from .utils import parse_int_list, validate_positive_int, validate_prime

logger = logging.getLogger(__name__)

GAMMA_QUARTER = float("3.62560990822190831193068515587")
ZETA_HALF = float("-1.46035450880958681288949915252")
ZETA_ZERO = -0.5

DEFAULT_COUNTING_BOUND = 10**6

VARIANT_QE = "qE"
VARIANT_NE = "nE"
VARIANTS = (VARIANT_QE, VARIANT_NE)


class ReductionKind(str, Enum):
    """Reduction type of a curve at a prime."""

    GOOD = "good"
    SPLIT = "split-multiplicative"
    NONSPLIT = "nonsplit-multiplicative"
    ADDITIVE = "additive"


_KIND_AP = {ReductionKind.SPLIT: 1, ReductionKind.NONSPLIT: -1, ReductionKind.ADDITIVE: 0}


@dataclass(frozen=True)
class ReductionInfo:
    """
    Local data of a curve at one prime.

    Args:
        prime: The prime p
        kind: Reduction type at p
        ap: Trace of Frobenius (good p) or the bad-prime value in {-1, 0, 1}
    """

    prime: int
    kind: ReductionKind
    ap: int

    def __post_init__(self) -> None:
        if self.kind is ReductionKind.GOOD:
            if self.ap * self.ap > 4 * self.prime:
                raise ValidationError(
                    f"Hasse bound violated at p={self.prime}: |a_p| = {abs(self.ap)}"
                )
        elif self.ap != _KIND_AP[self.kind]:
            raise ValidationError(
                f"Invalid a_p for {self.kind.value} reduction at p={self.prime}. "
                f"Must be {_KIND_AP[self.kind]}, got: {self.ap}"
            )

    @property
    def is_good(self) -> bool:
        return self.kind is ReductionKind.GOOD

    def euler_polynomial(self) -> Tuple[int, ...]:
        """Local polynomial of L(E,s) in u = p^{-s}."""
        if self.is_good:
            return (1, -self.ap, self.prime)
        return (1, -self.ap)


@dataclass(frozen=True)
class EllipticCurve:
    """
    Elliptic curve over Q in global minimal Weierstrass form.

    y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6

    Args:
        a1, a2, a3, a4, a6: Integral Weierstrass coefficients
        conductor: The conductor q_E (input data, not computed)
        bad_ap_override: Pairs (p, a_p) with a_p in {-1, 0, 1} fixing bad-prime values
        singular_fiber_q: Prime powers q_j of the finite product n_E(s)
        label: Display name
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    bad_ap_override: Tuple[Tuple[int, int], ...] = ()
    singular_fiber_q: Optional[Tuple[int, ...]] = None
    label: str = ""

    def __post_init__(self) -> None:
        for name in ("a1", "a2", "a3", "a4", "a6"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValidationError(f"Invalid {name}. Must be an integer, got: {value!r}")
        validate_positive_int(self.conductor, "conductor")
        if self.discriminant == 0:
            raise ValidationError(f"Invalid curve {self.coefficients}. Discriminant is zero")

        overrides = tuple(sorted((int(p), int(a)) for p, a in dict(self.bad_ap_override).items()))
        for p, a in overrides:
            validate_prime(p)
            if a not in (-1, 0, 1):
                raise ValidationError(
                    f"Invalid bad_ap override at p={p}. Must be one of: -1, 0, 1, got: {a}"
                )
        object.__setattr__(self, "bad_ap_override", overrides)

        if self.singular_fiber_q is not None:
            fibers = tuple(int(q) for q in self.singular_fiber_q)
            if len(set(fibers)) != len(fibers):
                raise ValidationError(f"Invalid fiber_q. Entries must be distinct, got: {fibers}")
            for q in fibers:
                if q < 2 or len(factorint(q)) != 1:
                    raise ValidationError(f"Invalid fiber_q. Must be prime powers, got: {q}")
            object.__setattr__(self, "singular_fiber_q", fibers)

    @property
    def coefficients(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.coefficients
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def overrides(self) -> Dict[int, int]:
        return dict(self.bad_ap_override)

    @property
    def bad_primes(self) -> List[int]:
        return sorted(factorint(self.conductor))

    @property
    def c_scale(self) -> int:
        """c_E = q_E·∏ q_j."""
        return self.conductor * math.prod(self.singular_fiber_q or ())

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready description (the curve input schema)."""
        data: Dict[str, Any] = {
            "a1": self.a1,
            "a2": self.a2,
            "a3": self.a3,
            "a4": self.a4,
            "a6": self.a6,
            "conductor": self.conductor,
            "bad_ap": {str(p): a for p, a in self.bad_ap_override},
        }
        if self.singular_fiber_q is not None:
            data["fiber_q"] = list(self.singular_fiber_q)
        if self.label:
            data["label"] = self.label
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EllipticCurve":
        """
        Build a curve from {a1,a2,a3,a4,a6,conductor,bad_ap:{p:ap},fiber_q:[...]}.

        Raises:
            ConfigError: If a required key is missing
        """
        missing = [k for k in ("a1", "a2", "a3", "a4", "a6", "conductor") if k not in data]
        if missing:
            raise ConfigError(f"Curve description is missing: {', '.join(missing)}")

        try:
            coefficients = [int(data[k]) for k in ("a1", "a2", "a3", "a4", "a6")]
            bad_ap = {int(p): int(a) for p, a in dict(data.get("bad_ap") or {}).items()}
            fibers = data.get("fiber_q")
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid curve description: {e}")

        return cls(
            *coefficients,
            conductor=int(data["conductor"]),
            bad_ap_override=tuple(bad_ap.items()),
            singular_fiber_q=tuple(fibers) if fibers is not None else None,
            label=str(data.get("label", "")),
        )

    @classmethod
    def from_string(
        cls,
        text: str,
        conductor: Optional[int],
        bad_ap: Optional[Mapping[int, int]] = None,
    ) -> "EllipticCurve":
        """
        Build a curve from the inline form "a1,a2,a3,a4,a6".

        Raises:
            ValidationError: If the string is malformed
            ConfigError: If no conductor is given
        """
        coefficients = parse_int_list(text, "curve")
        if len(coefficients) != 5:
            raise ValidationError(
                f"Invalid curve. Must have 5 coefficients a1,a2,a3,a4,a6, got: {text!r}"
            )
        if conductor is None:
            raise ConfigError("Inline curves need an explicit conductor")
        return cls(
            *coefficients,
            conductor=conductor,
            bad_ap_override=tuple((bad_ap or {}).items()),
            label=text,
        )


BUILTIN_CURVES: Dict[str, EllipticCurve] = {
    "11a": EllipticCurve(0, -1, 1, -10, -20, conductor=11, bad_ap_override=((11, 1),), label="11a"),
    "37a": EllipticCurve(0, 0, 1, -1, 0, conductor=37, bad_ap_override=((37, -1),), label="37a"),
}


def get_builtin(name: str) -> EllipticCurve:
    """
    Return a builtin curve by label.

    Raises:
        ValidationError: If the label is unknown
    """
    try:
        return BUILTIN_CURVES[name]
    except KeyError:
        raise ValidationError(
            f"Invalid curve. Must be one of: {', '.join(BUILTIN_CURVES)}, got: {name}"
        )


def load_curve(
    source: Union[str, Path, Mapping[str, Any]],
    conductor: Optional[int] = None,
    bad_ap: Optional[Mapping[int, int]] = None,
) -> EllipticCurve:
    """
    Resolve a curve description.

    Accepts a builtin label ("11a", "37a"), the inline form "a1,a2,a3,a4,a6"
    (with ``conductor``), a JSON file path or an already parsed mapping.
    """
    if isinstance(source, Mapping):
        return EllipticCurve.from_dict(source)
    text = str(source).strip()
    if text in BUILTIN_CURVES:
        return BUILTIN_CURVES[text]
    if "," in text:
        return EllipticCurve.from_string(text, conductor, bad_ap)
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read curve file {path}: {e}")
        return EllipticCurve.from_dict(data)
    return get_builtin(text)


def count_points(curve: EllipticCurve, p: int) -> int:
    """
    Brute-force #Ẽ(F_p) including the point at infinity (any p, O(p²)).

    Used as an oracle and for p = 2, 3.
    """
    a1, a2, a3, a4, a6 = (c % p for c in curve.coefficients)
    xs = np.arange(p, dtype=np.int64)[:, None]
    ys = np.arange(p, dtype=np.int64)[None, :]
    lhs = (ys * ys + a1 * xs * ys + a3 * ys) % p
    rhs = (xs * xs * xs + a2 * xs * xs + a4 * xs + a6) % p
    return int(np.count_nonzero(lhs == rhs)) + 1


def _square_table(p: int) -> np.ndarray:
    residues = np.zeros(p, dtype=bool)
    r = np.arange(p, dtype=np.int64)
    residues[(r * r) % p] = True
    return residues


def _cubic_values(curve: EllipticCurve, p: int) -> np.ndarray:
    """f(x) = 4x³ + b2x² + 2b4x + b6 mod p on all of F_p."""
    x = np.arange(p, dtype=np.int64)
    x2 = (x * x) % p
    x3 = (x2 * x) % p
    b2, b4, b6 = curve.b2 % p, (2 * curve.b4) % p, curve.b6 % p
    return (4 * x3 + b2 * x2 + b4 * x + b6) % p


def _legendre(value: int, p: int) -> int:
    value %= p
    if value == 0:
        return 0
    return 1 if pow(value, (p - 1) // 2, p) == 1 else -1


def _good_ap(curve: EllipticCurve, p: int) -> int:
    if p < 5:
        return p + 1 - count_points(curve, p)
    values = _cubic_values(curve, p)
    residues = _square_table(p)
    chi = np.where(values == 0, 0, np.where(residues[values], 1, -1))
    return -int(np.sum(chi))


def reduction_type(curve: EllipticCurve, p: int) -> ReductionKind:
    """
    Classify the reduction of the curve at p.

    Multiplicative reduction (p | Δ, p ∤ c4) is split when the tangent cone
    Y² = (12x₀ + b2)(x - x₀)² at the node (x₀, 0) of the completed-square model
    splits over F_p.

    Raises:
        RequiresOverrideError: At p = 2 with bad reduction (no completed square)
    """
    if curve.discriminant % p != 0:
        return ReductionKind.GOOD
    if curve.c4 % p == 0:
        return ReductionKind.ADDITIVE
    if p == 2:
        raise RequiresOverrideError(
            f"Curve {curve.label or curve.coefficients} has bad reduction at 2; "
            f"supply bad_ap for p=2"
        )

    values = _cubic_values(curve, p)
    x = np.arange(p, dtype=np.int64)
    derivative = (12 * ((x * x) % p) + 2 * (curve.b2 % p) * x + 2 * (curve.b4 % p)) % p
    nodes = np.flatnonzero((values == 0) & (derivative == 0))
    if nodes.size == 0:
        raise RequiresOverrideError(f"No singular point found at p={p}; supply bad_ap")

    x0 = int(nodes[0])
    slope = _legendre(12 * x0 + curve.b2, p)
    return ReductionKind.SPLIT if slope == 1 else ReductionKind.NONSPLIT


@lru_cache(maxsize=65536)
def _reduction(curve: EllipticCurve, p: int) -> ReductionInfo:
    if curve.discriminant % p != 0:
        return ReductionInfo(p, ReductionKind.GOOD, _good_ap(curve, p))

    overrides = curve.overrides
    if p in overrides:
        ap_value = overrides[p]
        kind = {1: ReductionKind.SPLIT, -1: ReductionKind.NONSPLIT, 0: ReductionKind.ADDITIVE}
        return ReductionInfo(p, kind[ap_value], ap_value)

    kind = reduction_type(curve, p)
    return ReductionInfo(p, kind, _KIND_AP[kind])


def ap(curve: EllipticCurve, p: int, bound: int = DEFAULT_COUNTING_BOUND) -> ReductionInfo:
    """
    Local data at p: a_p = p + 1 - #E(F_p) at good p, the tangent test at bad p.

    Args:
        curve: The curve
        p: A prime
        bound: Largest prime admitted for point counting

    Raises:
        BoundError: If p exceeds the counting bound
        RequiresOverrideError: If a bad prime cannot be classified
    """
    p = validate_prime(p)
    if p > bound:
        raise BoundError(f"Prime {p} exceeds the point-counting bound {bound}")
    return _reduction(curve, p)


def ap_table(
    curve: EllipticCurve, limit: int, bound: int = DEFAULT_COUNTING_BOUND
) -> Dict[int, ReductionInfo]:
    """Local data at every prime p <= limit."""
    table = {int(p): ap(curve, int(p), bound) for p in prime_sieve(limit)}
    logger.info(f"Computed a_p for {len(table)} primes up to {limit} on {curve.label}")
    return table


def _l_factor_map(curve: EllipticCurve, limit: int, power: int = 1) -> EulerFactorMap:
    factors = {}
    for p, info in ap_table(curve, limit).items():
        poly: Sequence[int] = info.euler_polynomial()
        result: Tuple[int, ...] = (1,)
        for _ in range(power):
            result = _poly_mul(result, poly)
        factors[p] = result
    return EulerFactorMap(factors=factors, max_degree=2 * power)


def _poly_mul(left: Sequence[int], right: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * (len(left) + len(right) - 1)
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            out[i + j] += a * b
    return tuple(out)


def zeta_pair_denominator(p: int) -> Tuple[int, ...]:
    """(1 - u)²(1 - pu)², the local denominator of (ζ(s)ζ(s-1))^{-2}."""
    return _poly_mul(_poly_mul((1, -1), (1, -1)), _poly_mul((1, -p), (1, -p)))


def l_coeffs(curve: EllipticCurve, n: int) -> CoeffSeries:
    """Dirichlet coefficients a(n) of L(E,s) up to n."""
    n = validate_positive_int(n, "limit")
    return euler_expand(_l_factor_map(curve, n), n, invert=True, label=f"L({curve.label})")


def zetaE_sq_coeffs(curve: EllipticCurve, n: int) -> CoeffSeries:
    """
    Coefficients of ζ_E(s)² = ζ(s)²ζ(s-1)²/L(E,s)² up to n.

    The local factor (1 - a_p u + p u²)² (or (1 - a_p u)²) is divided by
    (1 - u)²(1 - pu)²; the expansion is exact in integers.
    """
    n = validate_positive_int(n, "limit")
    numerators = _l_factor_map(curve, n, power=2)
    denominators = EulerFactorMap(default=zeta_pair_denominator)
    return euler_expand(
        numerators, n, denominator=denominators, label=f"zetaE^2({curve.label})"
    )


def _fiber_series(fibers: Iterable[int], n: int) -> CoeffSeries:
    """Coefficients of n_E(s)² = ∏(1 - q_j·q_j^{-s})^{-2} in s."""
    data = np.zeros(n + 1)
    data[1] = 1.0
    for q in fibers:
        base = data.copy()
        # (1 - q·T)^{-2} = Σ (k+1) q^k T^k with T = q^{-s}
        power, k = q, 1
        while power <= n:
            count = n // power
            data[power : power * count + 1 : power] += (k + 1) * float(q) ** k * base[1 : count + 1]
            power *= q
            k += 1
    return CoeffSeries.from_padded(data, "nE^2", integral=True)


def cE_coeffs(curve: EllipticCurve, n: int, variant: str = VARIANT_QE) -> CoeffSeries:
    """
    The nonnegative sequence c(ν) whose boundary term is Z_E.

    Variant "qE": Σ c(ν)ν^{-s} = q_E^{-2s}ζ_E(2s)².
    Variant "nE": Σ c(ν)ν^{-s} = c_E^{1-2s}n_E(2s)²ζ_E(2s)².

    Raises:
        ConfigError: If variant nE is requested without singular_fiber_q
        ValidationError: If the variant is unknown
    """
    n = validate_positive_int(n, "limit")
    if variant not in VARIANTS:
        raise ValidationError(
            f"Invalid variant. Must be one of: {', '.join(VARIANTS)}, got: {variant}"
        )

    if variant == VARIANT_QE:
        scale, factor = curve.conductor, 1
    else:
        if curve.singular_fiber_q is None:
            raise ConfigError(f"Variant {VARIANT_NE} needs singular_fiber_q on {curve.label}")
        scale = curve.c_scale
        factor = scale

    root = max(1, math.isqrt(n // (scale * scale)))
    inner = zetaE_sq_coeffs(curve, root)
    if variant == VARIANT_NE:
        inner = convolve(inner, _fiber_series(curve.singular_fiber_q or (), root))

    squared = square_support(inner, max(1, n // (scale * scale)))
    shifted = shift_support(squared, scale, n)
    result = shifted.scale(factor) if factor != 1 else shifted
    return CoeffSeries(result.values, f"c[{curve.label},{variant}]", False, result.integral)


def d_partial_coeffs(curve: EllipticCurve, T: float, n: int) -> CoeffSeries:
    """
    Coefficients of D_{E,T}(s) = (ζ(2s)ζ(2s-1)/(q_E^s·L_T(E,2s)))².

    Only primes p <= T contribute an L-factor numerator.
    """
    n = validate_positive_int(n, "limit")
    scale = curve.conductor
    inner_limit = max(1, n // (scale * scale))
    root = max(1, math.isqrt(inner_limit))
    factors = _l_factor_map(curve, min(root, int(T)), power=2) if T >= 2 else EulerFactorMap()
    inner = euler_expand(
        factors,
        root,
        denominator=EulerFactorMap(default=zeta_pair_denominator),
        label=f"D_T({curve.label},{T:g})",
    )
    squared = square_support(inner, inner_limit)
    return shift_support(squared, scale, n)


def _local_log_factor(info: ReductionInfo) -> float:
    p = info.prime
    if info.is_good:
        return -math.log1p(-info.ap / p + 1.0 / p)
    return -math.log1p(-info.ap / p)


def partial_euler_L1(curve: EllipticCurve, T: float) -> float:
    """
    Partial Euler product L_T(E,1) = ∏_{p<=T} L_p(E,1).

    The product is accumulated as an exactly rounded sum of logarithms, so it
    does not depend on the order of the factors.
    """
    primes = prime_sieve(int(math.floor(T))) if T >= 2 else []
    logs = [_local_log_factor(ap(curve, int(p))) for p in primes]
    return math.exp(math.fsum(logs))


def goldfeld_C1(curve: EllipticCurve, T: float) -> float:
    """
    C₁(T) = -q_E^{-1}·Γ(1/4)²/(16√2)·ζ(0)²ζ(1/2)²/L_T(E,1)².

    Raises:
        DegenerateProductError: If L_T(E,1) vanishes
    """
    value = partial_euler_L1(curve, T)
    if value == 0.0 or not math.isfinite(value):
        raise DegenerateProductError(f"L_T(E,1) = {value} at T={T} on {curve.label}")
    constant = GAMMA_QUARTER**2 / (16.0 * math.sqrt(2.0)) * ZETA_ZERO**2 * ZETA_HALF**2
    return -constant / (curve.conductor * value * value)


def goldfeld_constant(derivative: float, rank: int) -> float:
    """Limit constant C = L^{(r)}(E,1)/r!·1/(√2·e^{rγ}) of L_T(E,1)·(log T)^r."""
    rank = validate_positive_int(rank, "rank", minimum=0)
    return derivative / math.factorial(rank) / (math.sqrt(2.0) * math.exp(rank * EULER_GAMMA))


def goldfeld_ladder(curve: EllipticCurve, ladder: Sequence[float], rank: int) -> pd.DataFrame:
    """
    Table with columns T, L_T, C1, L_T_logT_r over a ladder of cutoffs.

    The local logarithms are computed once up to max(ladder) and summed per
    prefix with an exactly rounded sum.
    """
    rank = validate_positive_int(rank, "rank", minimum=0)
    cutoffs = sorted(float(t) for t in ladder)
    if not cutoffs or cutoffs[0] < 2:
        raise ValidationError(f"Invalid ladder. Every T must be >= 2, got: {list(ladder)}")

    primes = prime_sieve(int(cutoffs[-1]))
    logs = [_local_log_factor(ap(curve, int(p))) for p in primes]
    constant = GAMMA_QUARTER**2 / (16.0 * math.sqrt(2.0)) * ZETA_ZERO**2 * ZETA_HALF**2

    rows = []
    for T in cutoffs:
        count = int(np.searchsorted(primes, math.floor(T), side="right"))
        value = math.exp(math.fsum(logs[:count]))
        c1 = -constant / (curve.conductor * value * value) if value > 0 else -math.inf
        rows.append(
            {"T": T, "L_T": value, "C1": c1, "L_T_logT_r": value * math.log(T) ** rank}
        )

    logger.info(f"Goldfeld ladder for {curve.label}: {len(rows)} cutoffs up to {cutoffs[-1]:g}")
    return pd.DataFrame(rows, columns=["T", "L_T", "C1", "L_T_logT_r"])
