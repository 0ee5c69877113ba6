"""
Run configuration for the command-line front end.

Values resolve with precedence CLI flags > config file > environment > defaults.
Recognised environment variables: ZETA_BOUNDARY_SEED, ZETA_BOUNDARY_THREADS,
ZETA_BOUNDARY_REL_TOL and ZETA_BOUNDARY_FORMAT.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .curves import VARIANT_QE, VARIANTS, EllipticCurve, load_curve
from .exceptions import ConfigError, ValidationError
from .reports import validate_format
from .specfun import AccuracyBudget
from .utils import validate_grid, validate_positive, validate_positive_int
from .zseries import TruncationPlan

logger = logging.getLogger(__name__)

ENV_PREFIX = "ZETA_BOUNDARY_"
DEFAULT_GRID = (0.2, 1.0, 50)


def _env(name: str, default: Any, cast: Any) -> Any:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"Invalid environment variable {ENV_PREFIX + name}={raw!r}")


@dataclass(frozen=True)
class RunConfig:
    """
    Resolved configuration of one CLI run.

    Args:
        curve: Builtin label, inline "a1,a2,a3,a4,a6" or mapping
        conductor: Conductor for inline curves
        T: Truncation cutoff; defaults to R/x_lo²
        R: Validity ratio of the truncation plan
        alpha: Plan exponent in (0, 1)
        beta: Plan exponent > 1
        eps: Coefficient growth exponent
        grid: (x_lo, x_hi, points)
        out: Output path, None for stdout
        fmt: "csv" or "json"
        seed: Seed of random components
        rel_tol: Relative tolerance of the accuracy budget
        threads: Worker threads for grid and batch work
        variant: Sequence construction used for Z_E
        verbose: Log at INFO level
    """

    curve: Union[str, Dict[str, Any]] = "11a"
    conductor: Optional[int] = None
    T: Optional[float] = None
    R: float = 20.0
    alpha: float = 0.5
    beta: float = 2.0
    eps: float = 0.1
    grid: Tuple[float, float, int] = DEFAULT_GRID
    out: Optional[str] = None
    fmt: str = "csv"
    seed: int = 0
    rel_tol: float = 1e-12
    threads: int = 1
    variant: str = VARIANT_QE
    verbose: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", validate_grid(*self.grid))
        object.__setattr__(self, "fmt", validate_format(self.fmt))
        validate_positive_int(self.seed, "seed", minimum=0)
        validate_positive_int(self.threads, "threads")
        validate_positive(self.rel_tol, "rel_tol")
        if self.T is not None:
            validate_positive(self.T, "T")
        if self.variant not in VARIANTS:
            raise ValidationError(
                f"Invalid variant. Must be one of: {', '.join(VARIANTS)}, got: {self.variant}"
            )
        # Fails early on an inconsistent plan.
        self.plan()

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Defaults overridden by ZETA_BOUNDARY_* environment variables."""
        return cls(
            seed=_env("SEED", 0, int),
            threads=_env("THREADS", 1, int),
            rel_tol=_env("REL_TOL", 1e-12, float),
            fmt=_env("FORMAT", "csv", str),
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Optional["RunConfig"] = None) -> "RunConfig":
        """
        Build a config from a mapping mirroring the dataclass fields.

        Raises:
            ConfigError: On unknown keys
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
        values = dict(data)
        if "grid" in values:
            values["grid"] = tuple(values["grid"])
        return replace(base or cls(), **values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["grid"] = list(self.grid)
        return data

    def hashable_dict(self) -> Dict[str, Any]:
        """Fields that determine numeric output (excludes out, threads, verbose)."""
        data = self.to_dict()
        for key in ("out", "threads", "verbose"):
            data.pop(key)
        return data

    def plan(self) -> TruncationPlan:
        kwargs = {"R": self.R, "alpha": self.alpha, "beta": self.beta, "eps": self.eps}
        if self.T is None:
            return TruncationPlan.for_grid(self.grid[0], **kwargs)
        return TruncationPlan(self.T, **kwargs)

    def budget(self) -> AccuracyBudget:
        return AccuracyBudget(rel_tol=self.rel_tol)

    def load_curve(self) -> EllipticCurve:
        return load_curve(self.curve, conductor=self.conductor)


def load_config(path: Union[str, Path], base: Optional[RunConfig] = None) -> RunConfig:
    """
    Load a JSON config file on top of ``base`` (environment defaults if omitted).

    Raises:
        ConfigError: If the file cannot be read or parsed
    """
    path = Path(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    logger.info(f"Loaded config from {path}")
    return RunConfig.from_dict(data, base or RunConfig.from_env())


def merge_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """Apply CLI overrides; None values leave the config untouched."""
    present = {k: v for k, v in overrides.items() if v is not None}
    return RunConfig.from_dict(present, config) if present else config


def resolve_config(path: Optional[str], overrides: Mapping[str, Any]) -> RunConfig:
    """Environment defaults, then the config file, then CLI overrides."""
    base = RunConfig.from_env()
    if path:
        base = load_config(path, base)
    return merge_overrides(base, overrides)
