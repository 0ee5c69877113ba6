"""
Tests for truncated Dirichlet-series arithmetic.
"""

import numpy as np
import pandas as pd
import pytest

from zeta_boundary.dirichlet import (
    CoeffSeries,
    EulerFactorMap,
    a_weights,
    convolve,
    delta_series,
    divisor_counts,
    euler_expand,
    growth_constant,
    identity_series,
    local_series,
    ones_series,
    prime_power_exponent,
    prime_sieve,
    shift_support,
    sigma0_series,
    smallest_prime_factors,
    square_support,
)
from zeta_boundary.exceptions import InvalidFactorError, UsageError, ValidationError


class TestSieves:
    """Test the cached number-theoretic tables."""

    def test_prime_sieve(self):
        np.testing.assert_array_equal(prime_sieve(30), [2, 3, 5, 7, 11, 13, 17, 19, 23, 29])
        assert prime_sieve(1).size == 0
        assert prime_sieve(10**4).size == 1229

    def test_prime_sieve_grows(self):
        """Test that a larger request extends the cached table."""
        small = prime_sieve(100)
        large = prime_sieve(5000)
        np.testing.assert_array_equal(large[: small.size], small)
        assert large[-1] == 4999

    def test_smallest_prime_factors(self):
        spf = smallest_prime_factors(100)
        assert spf[2] == 2
        assert spf[91] == 7
        assert spf[97] == 97
        assert spf[49] == 7

    def test_divisor_counts(self):
        sigma = divisor_counts(100)
        assert sigma[1] == 1
        assert sigma[12] == 6
        assert sigma[64] == 7
        assert sigma[97] == 2

    def test_prime_power_exponent(self):
        assert prime_power_exponent(100, 2) == 6
        assert prime_power_exponent(100, 11) == 1
        assert prime_power_exponent(100, 101) == 0


class TestCoeffSeries:
    """Test the CoeffSeries container."""

    def test_indexing_is_one_based(self):
        series = CoeffSeries([3.0, 1.0, 4.0], label="pi")
        assert len(series) == 3
        assert series[1] == 3.0
        assert series[3] == 4.0
        with pytest.raises(IndexError):
            series[0]
        with pytest.raises(IndexError):
            series[4]

    def test_padded_is_read_only(self):
        series = CoeffSeries([1.0, 2.0])
        assert series.padded[0] == 0.0
        with pytest.raises(ValueError):
            series.padded[1] = 5.0

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            CoeffSeries([])
        with pytest.raises(ValidationError):
            CoeffSeries([1.0, np.nan])

    def test_nonzero_and_minimum(self):
        series = CoeffSeries([0.0, 2.0, -1.0, 0.0, 5.0])
        np.testing.assert_array_equal(series.nonzero(), [2, 3, 5])
        assert series.first_nonzero() == 2
        assert series.minimum() == (3, -1.0)
        assert CoeffSeries([0.0, 0.0]).first_nonzero() is None

    def test_truncate(self):
        series = ones_series(10)
        assert series.truncate(4).limit == 4
        with pytest.raises(UsageError):
            series.truncate(20)

    def test_scale_keeps_integrality(self):
        series = ones_series(5)
        assert series.scale(3).integral
        assert not series.scale(0.5).integral
        assert series.scale(3)[5] == 3.0

    def test_to_frame(self):
        frame = CoeffSeries([0.0, 2.0, 0.0, 1.0]).to_frame()
        assert isinstance(frame, pd.DataFrame)
        assert list(frame.columns) == ["index", "value"]
        assert frame["index"].tolist() == [2, 4]
        assert frame["value"].tolist() == [2.0, 1.0]

    def test_is_multiplicative(self):
        assert sigma0_series(200).is_multiplicative()
        assert identity_series(100).is_multiplicative()
        assert not CoeffSeries(np.arange(1, 31, dtype=float) ** 0.5 + 1.0).is_multiplicative()


class TestConvolve:
    """Test Dirichlet convolution."""

    def test_ones_squared_is_sigma0(self):
        ones = ones_series(100)
        product = convolve(ones, ones)
        assert product[12] == 6.0
        np.testing.assert_array_equal(product.values, sigma0_series(100).values)
        assert product.integral

    def test_delta_is_identity(self):
        b = identity_series(50)
        np.testing.assert_array_equal(convolve(delta_series(50), b).values, b.values)

    def test_zeta_times_shifted_zeta(self):
        """Test c(6) = Σ_{d|6} 6/d = 12."""
        product = convolve(ones_series(20), identity_series(20))
        assert product[6] == 12.0

    def test_mismatched_limits(self):
        with pytest.raises(UsageError):
            convolve(ones_series(10), ones_series(11))

    def test_float_inputs(self):
        a = CoeffSeries([0.5, 0.25, 0.0, 1.0])
        product = convolve(a, ones_series(4))
        assert not product.integral
        assert product[4] == pytest.approx(0.5 + 0.25 + 1.0)


class TestEulerExpand:
    """Test Euler-product expansion."""

    def test_zeta_from_local_factors(self):
        """Test ∏(1 - p^{-s})^{-1} gives all ones."""
        zeta = euler_expand(EulerFactorMap(default=lambda p: (1, -1)), 100, invert=True)
        np.testing.assert_array_equal(zeta.values, np.ones(100))
        assert zeta.integral
        assert zeta.multiplicative

    def test_polynomial_read_off(self):
        """Test f_p without inversion contributes (1, -a_p, p) at p only."""
        series = euler_expand(EulerFactorMap(factors={2: (1, 2, 2)}), 16)
        assert series[1] == 1.0
        assert series[2] == 2.0
        assert series[4] == 2.0
        assert series[8] == 0.0
        assert series[3] == 0.0

    def test_local_reciprocal_recursion(self):
        """Test 1/(1 + 2u + 2u²) = 1, -2, 2, 0, -4, ..."""
        assert local_series((1, 2, 2), 4, invert=True) == [1.0, -2.0, 2.0, 0.0, -4.0]

    def test_local_series_with_denominator(self):
        """Test (1 - u²)/(1 - u) = 1 + u."""
        assert local_series((1, 0, -1), 3, denominator=(1, -1)) == [1.0, 1.0, 0.0, 0.0]

    def test_local_series_extended_precision(self):
        values = local_series((1, -1), 5, invert=True, dps=40)
        assert values == [1.0] * 6

    def test_invalid_constant_term(self):
        with pytest.raises(InvalidFactorError):
            euler_expand(EulerFactorMap(factors={3: (2, 1)}), 10)

    def test_degree_limit(self):
        factors = EulerFactorMap(factors={2: (1, 0, 0, 0, 0, 1)}, max_degree=4)
        with pytest.raises(InvalidFactorError):
            factors.local(2)

    def test_trailing_zeros_trimmed(self):
        assert EulerFactorMap(factors={2: (1, -1, 0, 0)}).local(2) == (1, -1)
        assert EulerFactorMap().local(7) == (1,)

    def test_multiplicativity(self):
        series = euler_expand(EulerFactorMap(default=lambda p: (1, -1, p)), 300, invert=True)
        assert series.is_multiplicative()
        assert series[6] == series[2] * series[3]


class TestSupportMaps:
    """Test s -> 2s and multiplication by q^{-2s}."""

    def test_square_support(self):
        squared = square_support(sigma0_series(10), 100)
        assert squared[9] == 2.0  # σ₀(3)
        assert squared[8] == 0.0
        assert squared[100] == 4.0  # σ₀(10)
        np.testing.assert_array_equal(
            square_support(delta_series(3), 9).values, delta_series(9).values
        )

    def test_square_support_too_short(self):
        with pytest.raises(UsageError):
            square_support(ones_series(3), 100)

    def test_shift_support(self):
        shifted = shift_support(delta_series(1), 11, 200)
        assert shifted.first_nonzero() == 121
        assert shifted[121] == 1.0
        assert len(shifted.nonzero()) == 1

    def test_shift_identity(self):
        series = sigma0_series(20)
        np.testing.assert_array_equal(shift_support(series, 1, 20).values, series.values)

    def test_shift_after_square(self):
        squares = square_support(sigma0_series(2), 4)
        assert shift_support(squares, 37, 1369 * 4).first_nonzero() == 1369

    def test_shift_too_short(self):
        with pytest.raises(UsageError):
            shift_support(ones_series(1), 2, 100)


class TestWeights:
    """Test divisor weights and the growth constant."""

    def test_delta_weights(self):
        weights = a_weights(delta_series(20))
        assert weights[6] == 4.0
        np.testing.assert_array_equal(weights.values, sigma0_series(20).values)

    def test_ones_weights(self):
        """Test a(4) = σ₀(1) + σ₀(2) + σ₀(4) = 6."""
        assert a_weights(ones_series(10))[4] == 6.0

    def test_growth_constant(self):
        weights = a_weights(delta_series(100))
        growth = growth_constant(weights, 0.5)
        n = np.arange(1, 101)
        assert np.all(weights.values <= growth * n**0.5 + 1e-12)
        assert growth == pytest.approx(np.max(weights.values / n**0.5))
