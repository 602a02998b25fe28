"""Tests for finite-shot sampling and shot-budget allocation."""

import numpy as np
import pytest

from qembench.seeding import derive_seed, rng_for
from qembench.shots import (
    CDR,
    CGVD,
    UNITED,
    VD,
    VNCDR,
    ZNE,
    BudgetTooSmallError,
    ExactSampler,
    InsufficientShotsError,
    Sampler,
    allocate_budget,
    circuit_count,
    sample_expectation,
    sample_vd_estimate,
)


class TestSeeding:
    def test_derive_seed_deterministic(self):
        assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
        assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
        assert derive_seed(1, "a") != derive_seed(1, "b")

    def test_rng_streams_independent_of_order(self):
        a1 = rng_for(5, "x").normal()
        _ = rng_for(5, "y").normal()
        a2 = rng_for(5, "x").normal()
        assert a1 == a2

    def test_rejects_unhashable_parts(self):
        with pytest.raises(TypeError):
            derive_seed(1.5)


class TestSampleExpectation:
    @pytest.mark.parametrize("mu", [-0.9, 0.0, 0.5])
    def test_unbiased_and_variance(self, mu):
        shots = 100
        reps = 10**4
        rng = np.random.default_rng(42)
        draws = np.array([sample_expectation(mu, shots, rng) for _ in range(reps)])
        sigma = np.sqrt((1 - mu**2) / shots)
        assert abs(draws.mean() - mu) < 4 * sigma / np.sqrt(reps)
        if mu != 0.9:
            expected_var = (1 - mu**2) / shots
            assert abs(draws.var() - expected_var) < 0.1 * expected_var

    def test_extreme_values_exact(self):
        rng = np.random.default_rng(0)
        assert sample_expectation(1.0, 100, rng) == 1.0
        assert sample_expectation(-1.0, 100, rng) == -1.0

    def test_range(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            assert -1.0 <= sample_expectation(0.3, 7, rng) <= 1.0

    def test_validation(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            sample_expectation(1.5, 10, rng)
        with pytest.raises(ValueError):
            sample_expectation(0.5, 0, rng)


class TestSampleVdEstimate:
    def test_converges_to_ratio(self):
        rng = np.random.default_rng(3)
        draws = [
            sample_vd_estimate(0.4, 0.8, 10**6, rng) for _ in range(200)
        ]
        assert np.mean(draws) == pytest.approx(0.5, abs=5e-3)

    def test_clamped(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            est = sample_vd_estimate(0.9, 0.6, 50, rng)
            assert -1.0 <= est <= 1.0

    def test_insufficient_shots(self):
        rng = np.random.default_rng(5)
        with pytest.raises(InsufficientShotsError):
            for _ in range(2000):
                sample_vd_estimate(0.01, 0.02, 10, rng)

    def test_denominator_validation(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            sample_vd_estimate(0.1, 0.0, 10, rng)
        with pytest.raises(ValueError):
            sample_vd_estimate(0.1, 1.5, 10, rng)


class TestBudgetAllocation:
    @pytest.mark.parametrize("n_levels", [2, 3, 4])
    @pytest.mark.parametrize("n_training", [10, 50])
    @pytest.mark.parametrize("m_max", [1, 2, 3])
    def test_circuit_count_grid(self, n_levels, n_training, m_max):
        assert circuit_count(ZNE, n_levels=n_levels) == n_levels
        assert circuit_count(VD) == 2
        assert circuit_count(CDR, n_training=n_training) == n_training + 1
        assert (
            circuit_count(VNCDR, n_levels=n_levels, n_training=n_training)
            == n_levels * (n_training + 1)
        )
        assert circuit_count(
            UNITED, n_levels=n_levels, n_training=n_training, m_max=m_max
        ) == n_levels * (n_training + 1) * (2 * m_max - 1)
        assert circuit_count(
            CGVD, n_training=n_training, m_max=m_max
        ) == (n_training + 1) * (2 * m_max - 1)

    def test_united_reference_count(self):
        assert circuit_count(UNITED, n_levels=3, n_training=50, m_max=3) == 765

    def test_united_reference_allocation(self):
        budget = allocate_budget(UNITED, 10**6, n_levels=3, n_training=50, m_max=3)
        assert budget.circuit_count == 765
        assert budget.per_circuit == 1307

    def test_cdr_reference_allocation(self):
        budget = allocate_budget(CDR, 10**6, n_training=50)
        assert budget.circuit_count == 51
        assert budget.per_circuit == 19607

    def test_budget_too_small(self):
        with pytest.raises(BudgetTooSmallError):
            allocate_budget(UNITED, 500, n_levels=3, n_training=50, m_max=3)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            circuit_count("bogus")


class TestSampler:
    def test_reproducible_per_key(self):
        s1 = Sampler(1000, root_seed=7, stream=("a",))
        s2 = Sampler(1000, root_seed=7, stream=("a",))
        assert s1.direct(0.3, ("k", 1)) == s2.direct(0.3, ("k", 1))

    def test_keys_give_independent_draws(self):
        s = Sampler(1000, root_seed=7)
        assert s.direct(0.3, ("k", 1)) != s.direct(0.3, ("k", 2))

    def test_order_independent(self):
        s1 = Sampler(1000, root_seed=7)
        a_first = s1.direct(0.3, ("a",))
        s1.direct(0.3, ("b",))
        s2 = Sampler(1000, root_seed=7)
        s2.direct(0.3, ("b",))
        a_second = s2.direct(0.3, ("a",))
        assert a_first == a_second

    def test_consumed_accounting(self):
        s = Sampler(100, root_seed=1)
        s.direct(0.0, ("a",))
        s.vd_ratio(0.5, 0.9, ("b",))
        assert s.consumed == 300

    def test_exact_sampler_passthrough(self):
        s = ExactSampler()
        assert s.infinite
        assert s.direct(0.123, ("a",)) == 0.123
        assert s.vd_ratio(0.4, 0.8, ("b",)) == pytest.approx(0.5)
        assert s.consumed == 0

    def test_invalid_shots(self):
        with pytest.raises(ValueError):
            Sampler(0, root_seed=1)
