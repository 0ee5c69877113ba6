"""
Utility functions for zeta-boundary-terms.

This module provides validators for user-facing numeric input, the log-spaced
evaluation grid and list parsing shared by the library and the CLI.
"""

import math
from typing import Any, List, Tuple

import numpy as np
from sympy import isprime

from .exceptions import ValidationError


def validate_positive(value: Any, name: str = "value") -> float:
    """
    Validate a strictly positive finite real number.

    Args:
        value: The value to validate
        name: Name used in the error message

    Returns:
        The value as a float

    Raises:
        ValidationError: If the value is not a positive finite number
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Invalid {name}. Must be a real number, got: {value!r}")

    if not math.isfinite(number) or number <= 0:
        raise ValidationError(f"Invalid {name}. Must be positive and finite, got: {value}")

    return number


def validate_positive_int(value: Any, name: str = "value", minimum: int = 1) -> int:
    """
    Validate an integer not smaller than ``minimum``.

    Args:
        value: The value to validate
        name: Name used in the error message
        minimum: Smallest accepted value

    Returns:
        The value as an int

    Raises:
        ValidationError: If the value is not an integer or is too small
    """
    if isinstance(value, bool):
        raise ValidationError(f"Invalid {name}. Must be an integer, got: {value!r}")

    if isinstance(value, float) and value.is_integer():
        value = int(value)

    if not isinstance(value, (int, np.integer)):
        try:
            value = int(str(value).strip())
        except ValueError:
            raise ValidationError(f"Invalid {name}. Must be an integer, got: {value!r}")

    if value < minimum:
        raise ValidationError(f"Invalid {name}. Must be >= {minimum}, got: {value}")

    return int(value)


def validate_prime(p: Any) -> int:
    """
    Validate a rational prime.

    Raises:
        ValidationError: If p is not a prime
    """
    p = validate_positive_int(p, "prime", minimum=2)
    if not isprime(p):
        raise ValidationError(f"Invalid prime. Must be a prime number, got: {p}")
    return p


def validate_sign(epsilon: Any) -> int:
    """Validate a sign in {+1, -1}."""
    if epsilon not in (1, -1):
        raise ValidationError(f"Invalid epsilon. Must be one of: +1, -1, got: {epsilon}")
    return int(epsilon)


def validate_grid(x_lo: Any, x_hi: Any, points: Any) -> Tuple[float, float, int]:
    """
    Validate a log-spaced evaluation grid.

    Args:
        x_lo: Left end of the grid
        x_hi: Right end of the grid
        points: Number of grid points

    Returns:
        Tuple of (x_lo, x_hi, points)

    Raises:
        ValidationError: If the bounds are not positive and ordered or points < 2
    """
    lo = validate_positive(x_lo, "x_lo")
    hi = validate_positive(x_hi, "x_hi")
    if lo >= hi:
        raise ValidationError(f"Invalid grid. x_lo must be below x_hi, got: [{lo}, {hi}]")
    count = validate_positive_int(points, "points", minimum=2)
    return lo, hi, count


def log_grid(x_lo: float, x_hi: float, points: int) -> np.ndarray:
    """Return ``points`` log-spaced values from x_lo to x_hi inclusive."""
    lo, hi, count = validate_grid(x_lo, x_hi, points)
    grid = np.geomspace(lo, hi, count)
    grid[0], grid[-1] = lo, hi
    return grid


def parse_int_list(text: str, name: str = "list") -> List[int]:
    """
    Parse a comma-separated list of integers such as ``"0,-1,1,-10,-20"``.

    Raises:
        ValidationError: If an entry is not an integer
    """
    if text is None or not str(text).strip():
        raise ValidationError(f"Invalid {name}. Must be a comma-separated list of integers")

    values = []
    for item in str(text).split(","):
        item = item.strip()
        try:
            values.append(int(item))
        except ValueError:
            raise ValidationError(f"Invalid {name}. Entry is not an integer, got: {item!r}")
    return values
