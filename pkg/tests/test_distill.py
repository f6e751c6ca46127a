import math

import numpy as np
import pytest

from secbit import (
    CanonicalParams,
    binary_entropy,
    block_error_rate,
    bob_uncertainty,
    canonical_distribution,
    eve_uncertainty,
    exact_block_statistics,
    minimal_block_length,
    protocol_report,
    satellite_scenario,
    secret_bit_fraction,
    simulate_advantage_distillation,
    string_filter,
)
from secbit.errors import (
    EmptyBlockError,
    InvalidParamsError,
    NotBinaryError,
    NotNormalizedError,
    OutOfRangeError,
)

UNIFORM = CanonicalParams(0.6, (0.25, 0.25, 0.25, 0.25))


def h2(r):
    if r in (0.0, 1.0):
        return 0.0
    return -r * math.log2(r) - (1 - r) * math.log2(1 - r)


class TestBinaryEntropy:
    def test_endpoints_and_maximum(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0

    def test_value_and_symmetry(self):
        assert binary_entropy(0.2) == pytest.approx(h2(0.2), abs=1e-15)
        assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8), abs=1e-15)
        assert binary_entropy(0.2) == pytest.approx(0.7219280948873623, abs=1e-12)

    def test_domain_guard(self):
        with pytest.raises(OutOfRangeError):
            binary_entropy(1.2)


class TestBlockErrorRate:
    def test_zero_disagreement(self):
        perfect = CanonicalParams(0.9, (0.5, 0.0, 0.0, 0.5))
        for n in (1, 5, 50):
            assert block_error_rate(perfect, n) == 0.0

    def test_single_sample_is_epsilon(self):
        assert block_error_rate(UNIFORM, 1) == pytest.approx(0.2, abs=1e-15)

    def test_strictly_decreasing_in_block_length(self):
        rates = [block_error_rate(UNIFORM, n) for n in range(1, 40)]
        assert all(b < a for a, b in zip(rates, rates[1:]))

    def test_log_space_stability_for_huge_blocks(self):
        value = block_error_rate(UNIFORM, 5000)
        assert value == 0.0 or (0.0 <= value < 1e-300)
        assert bob_uncertainty(UNIFORM, 5000) == 0.0
        assert eve_uncertainty(UNIFORM, 5000) == 0.0


class TestUncertainties:
    def test_values_at_one_sample(self):
        assert bob_uncertainty(UNIFORM, 1) == pytest.approx(h2(0.2), abs=1e-12)
        assert eve_uncertainty(UNIFORM, 1) == pytest.approx(h2(0.6), abs=1e-12)

    def test_bob_vanishes_for_large_blocks(self):
        values = [bob_uncertainty(UNIFORM, n) for n in (1, 5, 20, 80)]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-6

    def test_perfect_secrecy_degenerates(self):
        perfect = CanonicalParams(1.0, (0.5, 0.0, 0.0, 0.5))
        assert bob_uncertainty(perfect, 1) == 0.0
        assert eve_uncertainty(perfect, 1) == 0.0

    def test_complementary_family_keeps_parties_equal(self):
        # eta01 + eta10 = 1 makes the two ratios complementary fractions of
        # the same denominator, and h(p) = h(1-p).
        family = CanonicalParams(0.6, (0.0, 0.5, 0.5, 0.0))
        for n in (1, 2, 7, 33, 120):
            assert bob_uncertainty(family, n) == pytest.approx(
                eve_uncertainty(family, n), abs=1e-12
            )

    def test_large_block_first_order_approximation(self):
        # h of the block error approaches (rate) * N * log2((1-eps)/eps).
        eps = UNIFORM.epsilon
        for n in (50, 80, 120):
            rate = block_error_rate(UNIFORM, n)
            approx = rate * n * math.log2((1 - eps) / eps)
            exact = bob_uncertainty(UNIFORM, n)
            assert abs(approx - exact) / exact < 0.1


class TestMinimalBlockLength:
    def test_uniform_case_needs_one_sample(self):
        report = minimal_block_length(UNIFORM, 200)
        assert report is not None
        assert report.block_length == 1
        assert report.satisfied

    def test_complementary_family_never_succeeds(self):
        family = CanonicalParams(0.6, (0.0, 0.5, 0.5, 0.0))
        assert minimal_block_length(family, 200) is None

    def test_perfect_secrecy_returns_none(self):
        perfect = CanonicalParams(1.0, (0.5, 0.0, 0.0, 0.5))
        assert minimal_block_length(perfect, 50) is None

    def test_exists_on_a_parameter_grid(self):
        # Anywhere off the two degenerate families a feasible block length
        # exists well before 200.
        for mu in np.linspace(0.55, 0.95, 5):
            for cross in np.linspace(0.1, 0.9, 4):
                eta = ((1 - cross) / 2, cross / 2, cross / 2, (1 - cross) / 2)
                report = minimal_block_length(CanonicalParams(float(mu), eta), 200)
                assert report is not None, (mu, cross)


class TestStringFilter:
    def test_alternating_blocks(self):
        assert string_filter("0101") == (0, 1)
        assert string_filter("1010") == (1, 0)
        assert string_filter("010") == (0, 0)
        assert string_filter([1]) == (1, 1)

    def test_rejection(self):
        assert string_filter("0011") is None
        assert string_filter("0110") is None

    def test_empty_block(self):
        with pytest.raises(EmptyBlockError):
            string_filter("")


class TestSimulation:
    def test_agrees_with_analytics_at_three_sigma(self):
        p = canonical_distribution(UNIFORM)
        sim = simulate_advantage_distillation(p, 3, 60000, seed=424242)
        eps = UNIFORM.epsilon
        expected = eps**3 / (eps**3 + (1 - eps) ** 3)
        sigma = math.sqrt(expected * (1 - expected) / sim.accepted)
        assert abs(sim.disagreement_rate - expected) <= 3 * sigma
        blank = 0.6**3 / (eps**3 + (1 - eps) ** 3)
        sigma_blank = math.sqrt(blank * (1 - blank) / sim.accepted)
        assert abs(sim.eve_blank_rate - blank) <= 3 * sigma_blank

    def test_agrees_with_exact_products_for_asymmetric_parameters(self):
        params = CanonicalParams(0.7, (0.05, 0.25, 0.1, 0.6))
        p = canonical_distribution(params)
        sim = simulate_advantage_distillation(p, 2, 60000, seed=99)
        exact = exact_block_statistics(p, 2)
        sigma = math.sqrt(
            exact["acceptance_rate"] * (1 - exact["acceptance_rate"]) / sim.samples
        )
        assert abs(sim.acceptance_rate - exact["acceptance_rate"]) <= 3 * sigma
        sigma_d = math.sqrt(
            exact["disagreement_rate"] * (1 - exact["disagreement_rate"]) / sim.accepted
        )
        assert abs(sim.disagreement_rate - exact["disagreement_rate"]) <= 3 * sigma_d

    def test_perfect_shared_bit_blocks(self):
        from secbit import point_mass_eve, shared_bit

        p = point_mass_eve(shared_bit())
        for n in (2, 4):
            sim = simulate_advantage_distillation(p, n, 40000, seed=5)
            expected = 2 * 0.5**n
            sigma = math.sqrt(expected * (1 - expected) / sim.samples)
            assert abs(sim.acceptance_rate - expected) <= 3 * sigma
            assert sim.disagreements == 0

    def test_matches_string_filter_semantics(self):
        p = canonical_distribution(UNIFORM)
        sim = simulate_advantage_distillation(p, 4, 2000, seed=8)
        # re-derive the acceptance count with the scalar filter
        rng_draws = []
        chunk = 0
        remaining = 2000
        flat = p.table.ravel()
        while remaining > 0:
            take = min(1 << 16, remaining)
            rng = np.random.default_rng([8, chunk])
            rng_draws.append(rng.choice(flat.size, size=(take, 4), p=flat / flat.sum()))
            remaining -= take
            chunk += 1
        draws = np.concatenate(rng_draws)
        accepted = 0
        for row in draws:
            e = row % 5
            ab = row // 5
            a, b = ab // 2, ab % 2
            if string_filter(a.tolist()) is not None and string_filter(b.tolist()) is not None:
                accepted += 1
        assert accepted == sim.accepted

    def test_determinism(self):
        p = canonical_distribution(UNIFORM)
        one = simulate_advantage_distillation(p, 3, 30000, seed=13)
        two = simulate_advantage_distillation(p, 3, 30000, seed=13)
        assert one == two

    def test_guards(self):
        p = canonical_distribution(UNIFORM)
        with pytest.raises(InvalidParamsError):
            simulate_advantage_distillation(p, 3, 0, seed=1)
        from secbit import TripartiteDistribution

        with pytest.raises(NotNormalizedError):
            simulate_advantage_distillation(
                TripartiteDistribution(2.0 * p.table), 3, 10, seed=1
            )
        with pytest.raises(NotBinaryError):
            simulate_advantage_distillation(
                TripartiteDistribution(np.ones((3, 2, 2))), 3, 10, seed=1
            )


def test_satellite_scenario_report_roundtrip():
    p = satellite_scenario(0.2, 0.2, 0.15)
    assert secret_bit_fraction(p) == pytest.approx(0.26, abs=1e-12)
    stats = exact_block_statistics(p, 3)
    assert 0.0 < stats["acceptance_rate"] < 1.0
    sim = simulate_advantage_distillation(p, 3, 30000, seed=21)
    sigma = math.sqrt(stats["acceptance_rate"] * (1 - stats["acceptance_rate"]) / sim.samples)
    assert abs(sim.acceptance_rate - stats["acceptance_rate"]) <= 3 * sigma


def test_protocol_report_fields():
    report = protocol_report(UNIFORM, 3)
    assert report.epsilon == pytest.approx(0.2)
    assert report.block_error_rate == pytest.approx(0.2**3 / (0.2**3 + 0.8**3), abs=1e-12)
    assert report.satisfied
