"""
Pytest configuration and shared fixtures for zeta-boundary-terms tests.
"""

import os
from pathlib import Path

import numpy as np
import pytest
from dotenv import load_dotenv

from zeta_boundary.curves import get_builtin
from zeta_boundary.dirichlet import CoeffSeries
from zeta_boundary.zseries import TruncationPlan

# Load environment variables from .env file
# Find the .env file relative to this conftest.py file
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)
else:
    # Try current directory as fallback
    load_dotenv()


@pytest.fixture
def curve_11a():
    """The builtin curve 11a: y² + y = x³ - x² - 10x - 20."""
    return get_builtin("11a")


@pytest.fixture
def curve_37a():
    """The builtin curve 37a: y² + y = x³ - x."""
    return get_builtin("37a")


@pytest.fixture
def small_plan():
    """Truncation plan valid from x = 0.5 on."""
    return TruncationPlan.for_grid(0.5)


@pytest.fixture
def short_series():
    """A nonnegative series supported on ν <= 5."""
    return CoeffSeries(np.array([1.0, 0.0, 2.0, 1.0, 0.5] + [0.0] * 95), label="short")


@pytest.fixture
def clean_env(monkeypatch):
    """Remove ZETA_BOUNDARY_* variables so config defaults apply."""
    for key in list(os.environ):
        if key.startswith("ZETA_BOUNDARY_"):
            monkeypatch.delenv(key, raising=False)
    return monkeypatch


@pytest.fixture
def curve_file(tmp_path):
    """A JSON curve description of 37a on disk."""
    path = tmp_path / "curve.json"
    path.write_text(
        '{"a1": 0, "a2": 0, "a3": 1, "a4": -1, "a6": 0, "conductor": 37, '
        '"bad_ap": {"37": -1}, "label": "37a-file"}'
    )
    return path
