"""
Tests for ω-samples and the nonnegative Euler-product families.
"""

import math

import numpy as np
import pandas as pd
import pytest

from zeta_boundary.dirichlet import CoeffSeries
from zeta_boundary.exceptions import (
    BoundError,
    DomainError,
    NonnegativityError,
    ValidationError,
)
from zeta_boundary.stochastic import (
    BatchSummary,
    assert_nonnegative,
    batch_sign_study,
    d1k_coeffs,
    d_omega_coeffs,
    dchik_coeffs,
    is_fundamental_discriminant,
    kronecker_symbol,
    local_identity_coefficients,
    sample_omega,
    sample_seeds,
)


class TestSampleOmega:
    """Test Haar sampling on the torus."""

    def test_deterministic(self):
        first = sample_omega([], 50, seed=7)
        second = sample_omega([], 50, seed=7)
        np.testing.assert_array_equal(first.angles, second.angles)
        assert not np.array_equal(first.angles, sample_omega([], 50, seed=8).angles)

    def test_excluded_primes(self):
        sample = sample_omega({2, 5}, 30, seed=1)
        assert 2 not in sample.primes
        assert 5 not in sample.primes
        assert 3 in sample.primes
        with pytest.raises(KeyError):
            sample.omega(2)

    def test_unit_circle(self):
        sample = sample_omega([], 200, seed=3)
        for p in sample.primes:
            value = sample.omega(int(p))
            assert abs(value) == pytest.approx(1.0)
            assert -1.0 <= sample.re_omega(int(p)) <= 1.0
        assert np.all((sample.angles >= 0.0) & (sample.angles < 2 * math.pi))
        assert len(sample.as_dict()) == sample.primes.size

    def test_read_only(self):
        sample = sample_omega([], 20, seed=0)
        with pytest.raises(ValueError):
            sample.angles[0] = 1.0

    def test_invalid(self):
        with pytest.raises(ValidationError):
            sample_omega([], 1, seed=0)
        with pytest.raises(ValidationError):
            sample_omega([4], 20, seed=0)
        with pytest.raises(ValidationError):
            sample_omega([], 20, seed=-1)


class TestDOmega:
    """Test the coefficients c_ω."""

    def test_nonnegative_and_square_supported(self):
        c = d_omega_coeffs(sample_omega([], 100, seed=11), 10**4)
        assert_nonnegative(c)
        assert c[1] == 1.0
        nonzero = c.nonzero()
        assert all(math.isqrt(int(n)) ** 2 == n for n in nonzero)

    def test_local_identity(self):
        """Test the p-power coefficients against the squared closed form."""
        sample = sample_omega([], 10, seed=5)
        c = d_omega_coeffs(sample, 100)
        p = 2
        local = local_identity_coefficients(p, sample.re_omega(p), 3)
        for j in (1, 2, 3):
            expected = sum(local[i] * local[j - i] for i in range(j + 1))
            assert c[4**j] == pytest.approx(expected, rel=1e-12)

    def test_excluded_prime_keeps_zeta_factors(self):
        sample = sample_omega({2}, 10, seed=5)
        c = d_omega_coeffs(sample, 100)
        assert c[4] == pytest.approx(6.0)

    def test_sampling_bound(self):
        with pytest.raises(BoundError):
            d_omega_coeffs(sample_omega([], 5, seed=0), 100)


class TestLocalIdentity:
    """Test the closed-form local coefficients."""

    def test_values(self):
        coefficients = local_identity_coefficients(3, 0.0, 3)
        assert coefficients == pytest.approx([1.0, 4.0, 16.0, 52.0])

    @pytest.mark.parametrize("re_omega", [-1.0, 0.0, 0.3, 1.0])
    def test_nonnegative(self, re_omega):
        assert min(local_identity_coefficients(7, re_omega, 6)) >= 0.0

    def test_invalid_prime(self):
        with pytest.raises(ValidationError):
            local_identity_coefficients(6, 0.5, 3)


class TestCharacterFamilies:
    """Test D_{1,k} and D_{χ,k}."""

    def test_k_zero(self):
        c = d1k_coeffs(0, 100)
        assert c[1] == 1.0
        assert c[2] == 0.0
        assert c[4] == pytest.approx(6.0)

    def test_k_one_nonnegative(self):
        assert_nonnegative(d1k_coeffs(1, 2500))

    def test_k_two_nonnegative(self):
        assert_nonnegative(d1k_coeffs(2, 2500))

    def test_k_three_negative_at_small_primes(self):
        """The first local coefficient 2(p + 1 - 3√p) is negative for p <= 5."""
        c = d1k_coeffs(3, 100)
        assert c[4] == pytest.approx(2.0 * (3.0 - 3.0 * math.sqrt(2.0)))
        assert c[9] == pytest.approx(2.0 * (4.0 - 3.0 * math.sqrt(3.0)))
        with pytest.raises(NonnegativityError) as exc_info:
            assert_nonnegative(c)
        assert exc_info.value.index == 4
        assert exc_info.value.prime == 2

    def test_trivial_character(self):
        np.testing.assert_array_equal(dchik_coeffs(1, 2, 400).values, d1k_coeffs(2, 400).values)

    def test_kronecker(self):
        assert kronecker_symbol(-4, 3) == -1
        assert kronecker_symbol(-4, 5) == 1
        assert kronecker_symbol(-4, 2) == 0
        assert kronecker_symbol(5, 2) == -1
        assert kronecker_symbol(5, 4) == 1
        assert kronecker_symbol(-3, 7) == 1

    def test_fundamental_discriminants(self):
        for d in (1, -3, -4, 5, 8, -8, 12):
            assert is_fundamental_discriminant(d)
        for d in (0, 2, 4, 9, -12, 16):
            assert not is_fundamental_discriminant(d)

    def test_non_fundamental(self):
        with pytest.raises(DomainError):
            dchik_coeffs(9, 1, 100)

    def test_character_nonnegative(self):
        assert_nonnegative(dchik_coeffs(-4, 1, 2500))


class TestAssertNonnegative:
    """Test the nonnegativity guard."""

    def test_passes_through(self):
        series = CoeffSeries([1.0, 0.0, 2.0])
        assert assert_nonnegative(series) is series

    def test_names_first_offender(self):
        series = CoeffSeries([1.0, 0.0, -2.0, 0.0, 0.0, -1.0], label="bad")
        with pytest.raises(NonnegativityError) as exc_info:
            assert_nonnegative(series)
        error = exc_info.value
        assert error.index == 3
        assert error.prime == 3
        assert error.value == -2.0
        assert "bad" in str(error)

    def test_first_index(self):
        with pytest.raises(NonnegativityError) as exc_info:
            assert_nonnegative(CoeffSeries([-1.0, 1.0]))
        assert exc_info.value.prime is None

    def test_tolerance(self):
        series = CoeffSeries([1.0, -1e-15])
        assert assert_nonnegative(series, tolerance=1e-12) is series


class TestBatch:
    """Test batch sign studies."""

    def test_sample_seeds(self):
        seeds = sample_seeds(5, 3)
        assert seeds == sample_seeds(5, 3)
        assert len(set(seeds)) == 3
        assert all(0 <= s < 2**63 for s in seeds)

    def test_empty_batch(self):
        summary = batch_sign_study([], 10, 100, 0, (0.5, 1.0, 5), seed=1)
        assert isinstance(summary, BatchSummary)
        assert summary.outcomes == []
        assert summary.to_dict()["no_sign_change_fraction"] is None
        frame = summary.to_frame()
        assert isinstance(frame, pd.DataFrame)
        assert frame.empty
        assert "first_change" in frame.columns

    def test_sampling_bound(self):
        with pytest.raises(BoundError):
            batch_sign_study([], 3, 10, 1, (0.5, 1.0, 5), seed=1)

    @pytest.mark.slow
    def test_small_batch(self):
        first = batch_sign_study([], 10, 10, 2, (0.5, 1.0, 5), seed=1)
        second = batch_sign_study([], 10, 10, 2, (0.5, 1.0, 5), seed=1, workers=2)
        assert len(first.outcomes) == 2
        assert 0.0 <= first.no_sign_change_fraction <= 1.0
        assert [o.seed for o in first.outcomes] == [o.seed for o in second.outcomes]
        assert [o.sign_changes for o in first.outcomes] == [
            o.sign_changes for o in second.outcomes
        ]
        assert first.nonneg_violations == 0
        assert len(first.to_frame()) == 2
