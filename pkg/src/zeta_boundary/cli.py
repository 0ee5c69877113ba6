"""
Command-line front end: zeta-boundary.

Usage:
    zeta-boundary [global options] <command> [options]

Commands:
    coeffs      Export a coefficient series (c_E, L, ζ_E², D_ω, D_{1,k}, D_{χ,k}, D_{E,T})
    ztable      Tabulate Z_E(x) with certified bounds
    signscan    Certified sign scan of Z_E, Z_c or Z(x,ν)
    goldfeld    Partial Euler products L_T(E,1) over a ladder of T
    omega       Batch sign study over random Euler products
    verify      Run the self-verification battery

Exit codes: 0 success, 1 verification or assertion failure, 2 usage error.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from . import __version__
from .config import RunConfig, resolve_config
from .curves import (
    VARIANTS,
    cE_coeffs,
    d_partial_coeffs,
    goldfeld_ladder,
    l_coeffs,
    zetaE_sq_coeffs,
)
from .dirichlet import CoeffSeries
from .exceptions import (
    NonnegativityError,
    UsageError,
    ValidationError,
    VerificationError,
    ZetaBoundaryError,
)
from .reports import FORMATS, ReportWriter, create_report_writer
from .stochastic import (
    assert_nonnegative,
    batch_sign_study,
    d1k_coeffs,
    d_omega_coeffs,
    dchik_coeffs,
    sample_omega,
)
from .utils import parse_int_list
from .verification import CRITERIA, run_battery
from .zseries import (
    BoundaryTermEvaluator,
    SignScanReport,
    TruncationPlan,
    Z_xnu_bounded,
    curve_evaluator,
    curve_plan,
    series_evaluator,
    sign_scan,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SERIES_CHOICES = ("cE", "L", "zetaE2", "omega", "d1k", "dchik", "dT")
NONNEGATIVE_SERIES = {"cE", "omega", "d1k", "dchik", "dT"}


def print_success(message: str) -> None:
    """Print success message in green."""
    print(f"\033[92m✓ {message}\033[0m", file=sys.stderr)


def print_error(message: str) -> None:
    """Print error message in red."""
    print(f"\033[91m✗ {message}\033[0m", file=sys.stderr)


def print_warning(message: str) -> None:
    """Print warning message in yellow."""
    print(f"\033[93m⚠ {message}\033[0m", file=sys.stderr)


def print_info(message: str) -> None:
    """Print info message."""
    print(f"ℹ {message}", file=sys.stderr)


def _emit(writer: ReportWriter, text: str, out: Optional[str], rows: int) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    writer.write_text(text, out, rows)
    print_success(f"Wrote {rows} rows to {out}")


def _writer(
    command: str, config: RunConfig, args: argparse.Namespace, **extra: Any
) -> ReportWriter:
    settings = config.hashable_dict()
    settings.update({k: v for k, v in sorted(vars(args).items()) if k not in ("handler",)})
    settings.pop("config", None)
    settings.pop("out", None)
    settings.pop("threads", None)
    settings.pop("verbose", None)
    return create_report_writer(command, settings, config.fmt, config.seed, **extra)


def _build_series(config: RunConfig, args: argparse.Namespace, limit: int) -> CoeffSeries:
    what = args.series
    if what == "omega":
        excluded = parse_int_list(args.excluded, "excluded") if args.excluded else []
        return d_omega_coeffs(sample_omega(excluded, args.P, config.seed), limit)
    if what == "d1k":
        return d1k_coeffs(args.k, limit)
    if what == "dchik":
        return dchik_coeffs(args.d, args.k, limit)

    curve = config.load_curve()
    if what == "cE":
        return cE_coeffs(curve, limit, config.variant)
    if what == "L":
        return l_coeffs(curve, limit)
    if what == "zetaE2":
        return zetaE_sq_coeffs(curve, limit)
    if args.cutoff is None:
        raise UsageError("Series dT needs --cutoff")
    return d_partial_coeffs(curve, args.cutoff, limit)


def cmd_coeffs(config: RunConfig, args: argparse.Namespace) -> int:
    """Write the nonzero coefficients of a series as index,value."""
    series = _build_series(config, args, args.limit)
    index, value = series.minimum()
    print_info(f"{series.label}: {len(series.nonzero())} nonzero, min c({index}) = {value:.6g}")
    if args.series in NONNEGATIVE_SERIES:
        assert_nonnegative(series)
        print_success("All coefficients are nonnegative")

    writer = _writer("coeffs", config, args, label=series.label)
    frame = series.to_frame()
    _emit(writer, writer.render_table(frame), config.out, len(frame))
    return EXIT_OK


def _check_grid(plan: TruncationPlan, x_lo: float) -> None:
    if x_lo < plan.min_x * (1.0 - 1e-12):
        raise UsageError(
            f"Grid starts at x = {x_lo:g}, below the plan's validity threshold; "
            f"minimal admissible x is {plan.min_x:.6g} (raise T or x_lo)"
        )


def _curve_setup(config: RunConfig) -> BoundaryTermEvaluator:
    curve = config.load_curve()
    x_lo = config.grid[0]
    if config.T is None:
        plan = curve_plan(
            curve,
            x_lo,
            config.R,
            config.variant,
            alpha=config.alpha,
            beta=config.beta,
            eps=config.eps,
        )
    else:
        plan = config.plan()
    _check_grid(plan, x_lo)
    return curve_evaluator(curve, plan, config.variant)


def _scan(config: RunConfig, evaluator: Callable[[float], Any]) -> SignScanReport:
    x_lo, x_hi, points = config.grid
    return sign_scan(evaluator, x_lo, x_hi, points, workers=config.threads)


def cmd_ztable(config: RunConfig, args: argparse.Namespace) -> int:
    """Table x,value,bound,sign of Z_E over the configured grid."""
    evaluator = _curve_setup(config)
    report = _scan(config, evaluator)
    frame = report.to_frame()
    writer = _writer(
        "ztable",
        config,
        args,
        curve=evaluator.label,
        T=evaluator.plan.T,
        M_eps=evaluator.growth,
        variant=config.variant,
    )
    _emit(writer, writer.render_table(frame), config.out, len(frame))
    if report.indeterminate:
        print_warning(f"{report.indeterminate} of {len(frame)} points are indeterminate")
    return EXIT_OK


def cmd_signscan(config: RunConfig, args: argparse.Namespace) -> int:
    """Sign scan of Z_E, of Z_c for a coefficient family, or of Z(x, ν)."""
    extra: Dict[str, Any] = {}
    evaluator: Callable[[float], Any]
    if args.series == "xnu":
        budget = config.budget()
        nu = args.nu
        evaluator = lambda x: Z_xnu_bounded(x, nu, budget)  # noqa: E731
        extra["nu"] = nu
    elif args.series == "cE":
        curve_eval = _curve_setup(config)
        evaluator = curve_eval
        extra.update(curve=curve_eval.label, T=curve_eval.plan.T, M_eps=curve_eval.growth)
    else:
        plan = config.plan()
        _check_grid(plan, config.grid[0])
        series = assert_nonnegative(_build_series(config, args, plan.terms))
        series_eval = series_evaluator(series, plan)
        evaluator = series_eval
        extra.update(series=series.label, T=plan.T, M_eps=series_eval.growth)

    report = _scan(config, evaluator)
    summary = report.summary()
    writer = _writer("signscan", config, args, **extra)
    frame = report.to_frame()
    _emit(writer, writer.render_table(frame), config.out, len(frame))

    if report.prefix_sign is not None:
        print_info(f"Sign {report.prefix_sign} holds from x_lo up to x* = {report.prefix_end:.6g}")
    else:
        print_warning("No certified sign at x_lo")
    print_info(f"Bracketed sign changes: {summary['sign_changes']}")
    return EXIT_OK


def cmd_goldfeld(config: RunConfig, args: argparse.Namespace) -> int:
    """L_T(E,1), C₁(T) and L_T·(log T)^r over a log ladder of T."""
    curve = config.load_curve()
    ladder = [float(t) for t in np.geomspace(args.t_min, args.t_max, args.steps)]
    frame = goldfeld_ladder(curve, ladder, args.r)
    writer = _writer("goldfeld", config, args, curve=curve.label, r=args.r)
    _emit(writer, writer.render_table(frame), config.out, len(frame))

    column = frame["L_T_logT_r"]
    print_info(f"L_T·(log T)^{args.r} ranges over [{column.min():.6g}, {column.max():.6g}]")
    return EXIT_OK


def cmd_omega(config: RunConfig, args: argparse.Namespace) -> int:
    """Batch sign study over seeded ω-samples; writes the summary."""
    excluded = parse_int_list(args.excluded, "excluded") if args.excluded else []
    summary = batch_sign_study(
        excluded,
        args.P,
        args.N,
        args.samples,
        config.grid,
        config.seed,
        R=config.R,
        workers=config.threads,
    )
    writer = _writer("omega", config, args)
    payload = summary.to_dict()
    _emit(writer, writer.render_summary(payload), config.out, len(payload))
    print_info(
        f"{summary.num_samples} samples, no sign change in "
        f"{payload['no_sign_change_fraction']} of them"
    )
    return EXIT_OK


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    """Run the acceptance battery; exit 1 naming every failed criterion."""
    if args.list:
        for name, entry in CRITERIA.items():
            print(f"{name:28s} {entry.description}")
        return EXIT_OK

    only: Optional[List[str]] = None
    if args.only:
        only = [name.strip() for item in args.only for name in item.split(",") if name.strip()]

    results = run_battery(only)
    for result in results:
        line = f"{result.name} ({result.elapsed:.1f}s): {result.detail}"
        if result.passed:
            print_success(line)
        else:
            print_error(line)

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise VerificationError(f"Failed criteria: {', '.join(failed)}")
    print_success(f"All {len(results)} criteria passed")
    return EXIT_OK


def _add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--curve", help='Builtin label ("11a", "37a"), "a1,a2,a3,a4,a6" or JSON')
    parser.add_argument("--conductor", type=int, help="Conductor of an inline curve")
    parser.add_argument("--variant", choices=VARIANTS, help="Sequence construction for Z_E")
    parser.add_argument("--x-lo", type=float, help="Left end of the grid")
    parser.add_argument("--x-hi", type=float, help="Right end of the grid")
    parser.add_argument("--points", type=int, help="Number of grid points")
    parser.add_argument("--T", type=float, dest="T", help="Truncation cutoff")
    parser.add_argument("--R", type=float, dest="R", help="Validity ratio (default 20)")


def _add_series_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=1, help="Exponent k of D_{1,k} and D_{χ,k}")
    parser.add_argument("--d", type=int, default=-4, help="Fundamental discriminant of χ")
    parser.add_argument("--P", type=int, default=1000, help="Sampling bound for ω")
    parser.add_argument("--excluded", help="Comma-separated excluded primes S")
    parser.add_argument("--cutoff", type=float, help="Euler-product cutoff of D_{E,T}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeta-boundary",
        description="Boundary-term functions of zeta integrals attached to elliptic curves",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--out", help="Output path (stdout if omitted)")
    parser.add_argument("--format", dest="fmt", choices=FORMATS, help="Output format")
    parser.add_argument("--threads", type=int, help="Worker threads")
    parser.add_argument("--seed", type=int, help="Seed of random components")
    parser.add_argument(
        "--rel-tol",
        type=float,
        help="Relative tolerance of the Z(x, nu) series (signscan --series xnu only)",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--verbose", "-v", action="store_true", default=None, help="Log progress")

    commands = parser.add_subparsers(dest="command", required=True)

    coeffs = commands.add_parser("coeffs", help="Export a coefficient series")
    _add_grid_arguments(coeffs)
    coeffs.add_argument("--what", dest="series", choices=SERIES_CHOICES, default="cE")
    coeffs.add_argument("--limit", type=int, required=True, help="Number of coefficients")
    _add_series_arguments(coeffs)
    coeffs.set_defaults(handler=cmd_coeffs)

    ztable = commands.add_parser("ztable", help="Tabulate Z_E(x)")
    _add_grid_arguments(ztable)
    ztable.set_defaults(handler=cmd_ztable)

    signscan = commands.add_parser("signscan", help="Certified sign scan")
    _add_grid_arguments(signscan)
    signscan.add_argument(
        "--series", choices=("cE", "xnu", "omega", "d1k", "dchik", "dT"), default="cE"
    )
    signscan.add_argument("--nu", type=float, default=1.0, help="ν for --series xnu")
    _add_series_arguments(signscan)
    signscan.set_defaults(handler=cmd_signscan)

    goldfeld = commands.add_parser("goldfeld", help="Partial Euler products over a T ladder")
    _add_grid_arguments(goldfeld)
    goldfeld.add_argument("--r", type=int, default=0, help="Analytic rank r")
    goldfeld.add_argument("--t-min", type=float, default=1e3)
    goldfeld.add_argument("--t-max", type=float, default=1e5)
    goldfeld.add_argument("--steps", type=int, default=3)
    goldfeld.set_defaults(handler=cmd_goldfeld)

    omega = commands.add_parser("omega", help="Batch sign study over random Euler products")
    _add_grid_arguments(omega)
    omega.add_argument("--samples", type=int, default=10, help="Number of ω-samples")
    omega.add_argument("--P", type=int, default=1000, help="Sampling bound")
    omega.add_argument("--N", type=int, default=1, help="Minimal coefficient limit")
    omega.add_argument("--excluded", help="Comma-separated excluded primes S")
    omega.set_defaults(handler=cmd_omega)

    verify = commands.add_parser("verify", help="Run the self-verification battery")
    verify.add_argument("--only", action="append", help="Criterion name (repeatable)")
    verify.add_argument("--list", action="store_true", help="List criteria and exit")
    verify.set_defaults(handler=cmd_verify)

    return parser


def _uses_budget(args: argparse.Namespace) -> bool:
    return args.command == "signscan" and args.series == "xnu"


def _overrides(args: argparse.Namespace, base_grid: Any) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        key: getattr(args, key, None)
        for key in ("curve", "conductor", "variant", "T", "R", "out", "fmt", "seed", "threads")
    }
    overrides["rel_tol"] = args.rel_tol
    overrides["verbose"] = args.verbose
    grid = [getattr(args, "x_lo", None), getattr(args, "x_hi", None), getattr(args, "points", None)]
    if any(v is not None for v in grid):
        overrides["grid"] = tuple(g if g is not None else b for g, b in zip(grid, base_grid))
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        base = resolve_config(args.config, {})
        config = resolve_config(args.config, _overrides(args, base.grid))
        logging.basicConfig(
            level=logging.INFO if config.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if args.rel_tol is not None and not _uses_budget(args):
            print_warning(f"--rel-tol is ignored by {args.command}; it applies to --series xnu")
        return int(args.handler(config, args))
    except NonnegativityError as e:
        print_error(f"Nonnegativity violated at ν={e.index} (prime {e.prime}): {e}")
        return EXIT_FAILURE
    except VerificationError as e:
        print_error(str(e))
        return EXIT_FAILURE
    except ValidationError as e:
        print_error(str(e))
        return EXIT_USAGE
    except ZetaBoundaryError as e:
        print_error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE
    except OSError as e:
        print_error(f"I/O error: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
