"""
Tests for utility functions.
"""

import math

import numpy as np
import pytest

from zeta_boundary.exceptions import ValidationError
from zeta_boundary.utils import (
    log_grid,
    parse_int_list,
    validate_grid,
    validate_positive,
    validate_positive_int,
    validate_prime,
    validate_sign,
)


class TestValidation:
    """Test validation functions."""

    def test_validate_positive_valid(self):
        """Test valid positive reals."""
        assert validate_positive(0.5) == 0.5
        assert validate_positive("2.5") == 2.5
        assert validate_positive(3) == 3.0

    def test_validate_positive_invalid(self):
        """Test invalid positive reals."""
        with pytest.raises(ValidationError):
            validate_positive(0)
        with pytest.raises(ValidationError):
            validate_positive(-1.0)
        with pytest.raises(ValidationError):
            validate_positive(math.inf)
        with pytest.raises(ValidationError):
            validate_positive(math.nan)
        with pytest.raises(ValidationError):
            validate_positive("abc")  # Non-numeric

    def test_validate_positive_names_value(self):
        """Test the error message names the argument."""
        with pytest.raises(ValidationError, match="Invalid x_lo"):
            validate_positive(-2, "x_lo")

    def test_validate_positive_int_valid(self):
        """Test valid integers."""
        assert validate_positive_int(5) == 5
        assert validate_positive_int("12") == 12
        assert validate_positive_int(4.0) == 4
        assert validate_positive_int(np.int64(7)) == 7
        assert validate_positive_int(0, minimum=0) == 0

    def test_validate_positive_int_invalid(self):
        """Test invalid integers."""
        with pytest.raises(ValidationError):
            validate_positive_int(0)
        with pytest.raises(ValidationError):
            validate_positive_int(2.5)
        with pytest.raises(ValidationError):
            validate_positive_int(True)
        with pytest.raises(ValidationError):
            validate_positive_int("ten")
        with pytest.raises(ValidationError):
            validate_positive_int(1, minimum=2)

    def test_validate_prime(self):
        """Test prime validation."""
        assert validate_prime(2) == 2
        assert validate_prime(37) == 37
        for value in (1, 4, 91, -3):
            with pytest.raises(ValidationError):
                validate_prime(value)

    def test_validate_sign(self):
        """Test functional-equation signs."""
        assert validate_sign(1) == 1
        assert validate_sign(-1) == -1
        with pytest.raises(ValidationError):
            validate_sign(0)
        with pytest.raises(ValidationError):
            validate_sign(2)


class TestGrid:
    """Test grid validation and construction."""

    def test_validate_grid(self):
        assert validate_grid(0.2, 1.0, 50) == (0.2, 1.0, 50)
        assert validate_grid("0.1", "2", "3") == (0.1, 2.0, 3)

    def test_validate_grid_invalid(self):
        with pytest.raises(ValidationError):
            validate_grid(1.0, 0.5, 10)  # Reversed
        with pytest.raises(ValidationError):
            validate_grid(0.5, 0.5, 10)  # Empty
        with pytest.raises(ValidationError):
            validate_grid(0.1, 1.0, 1)  # Too few points
        with pytest.raises(ValidationError):
            validate_grid(0.0, 1.0, 10)

    def test_log_grid_endpoints_exact(self):
        """Test endpoints are reproduced exactly."""
        grid = log_grid(0.05, 10.0, 100)
        assert grid.size == 100
        assert grid[0] == 0.05
        assert grid[-1] == 10.0

    def test_log_grid_log_spacing(self):
        """Test consecutive ratios are constant."""
        grid = log_grid(0.1, 10.0, 5)
        np.testing.assert_allclose(grid, [0.1, math.sqrt(0.1), 1.0, math.sqrt(10.0), 10.0])
        ratios = grid[1:] / grid[:-1]
        np.testing.assert_allclose(ratios, ratios[0])


class TestParsing:
    """Test list parsing."""

    def test_parse_int_list(self):
        assert parse_int_list("0,-1,1,-10,-20") == [0, -1, 1, -10, -20]
        assert parse_int_list(" 2, 3 ,5") == [2, 3, 5]
        assert parse_int_list("7") == [7]

    def test_parse_int_list_invalid(self):
        with pytest.raises(ValidationError):
            parse_int_list("")
        with pytest.raises(ValidationError):
            parse_int_list("1,x,3")
        with pytest.raises(ValidationError, match="Invalid curve"):
            parse_int_list("1,,3", "curve")
