"""Ewens sampling formula probabilities and psi-spec resolution."""

import math

import numpy as np
import pytest

from ewens import (
    Abundance,
    enumerate_partitions,
    esf_log_probability,
    esf_probability,
    log_rising_factorial,
    partition_abundance,
    resolve_psi,
)


def esf_direct(abund, psi):
    # Literal product form, no log-gamma: n! prod_j psi^a_j/(j^a_j a_j!) / (psi)_n.
    # Valid only while the factorials stay in float range.
    n = abund.n
    value = math.factorial(n)
    for j, a in abund.entries.items():
        value *= psi**a / (j**a * math.factorial(a))
    rising = 1.0
    for i in range(n):
        rising *= psi + i
    return value / rising


class TestResolvePsi:
    def test_absolute(self):
        assert resolve_psi("a") == 1.0

    def test_relative_needs_n(self):
        assert resolve_psi("r", n=50) == 50.0
        with pytest.raises(ValueError):
            resolve_psi("r")
        with pytest.raises(ValueError):
            resolve_psi("r", n=0)

    def test_explicit_passthrough(self):
        assert resolve_psi(2.5) == 2.5
        assert resolve_psi(np.float64(3)) == 3.0
        assert resolve_psi(7) == 7.0

    @pytest.mark.parametrize("bad", [0, -1.0, math.inf, math.nan, "x", None, True, [2]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            resolve_psi(bad)


class TestLogRisingFactorial:
    def test_hand_values(self):
        np.testing.assert_allclose(log_rising_factorial(1.0, 3), math.log(6))
        np.testing.assert_allclose(log_rising_factorial(2.0, 1), math.log(2))
        np.testing.assert_allclose(
            log_rising_factorial(0.5, 4), math.log(0.5 * 1.5 * 2.5 * 3.5)
        )

    def test_empty_product(self):
        assert log_rising_factorial(3.7, 0) == 0.0

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            psi = float(rng.uniform(0.1, 40))
            n = int(rng.integers(1, 60))
            direct = sum(math.log(psi + i) for i in range(n))
            np.testing.assert_allclose(log_rising_factorial(psi, n), direct, rtol=1e-12)


class TestEsfProbability:
    def test_single_observation_certain(self):
        assert esf_probability(Abundance({1: 1}), 5.0) == 1.0
        assert esf_log_probability(Abundance({1: 1}), 0.01) == 0.0

    def test_pair_closed_forms(self):
        # n=2: tied pair has probability 1/(psi+1), distinct pair psi/(psi+1)
        np.testing.assert_allclose(esf_probability(Abundance({2: 1}), 3.0), 0.25)
        np.testing.assert_allclose(esf_probability(Abundance({1: 2}), 3.0), 0.75)
        np.testing.assert_allclose(esf_probability(Abundance({2: 1}), 1.0), 0.5)
        np.testing.assert_allclose(esf_probability(Abundance({1: 2}), 1.0), 0.5)

    def test_matches_direct_product_form(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            n = int(rng.integers(1, 16))
            parts = enumerate_partitions(n)
            abund = partition_abundance(parts[int(rng.integers(len(parts)))])
            psi = float(rng.uniform(0.05, 20))
            np.testing.assert_allclose(
                esf_probability(abund, psi), esf_direct(abund, psi), rtol=1e-10
            )

    def test_normalization(self):
        for n in range(1, 9):
            parts = enumerate_partitions(n)
            for psi in (0.5, 1.0, 5.0):
                total = sum(
                    esf_probability(partition_abundance(p), psi) for p in parts
                )
                np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_all_distinct_monotone_in_psi(self):
        abund = Abundance({1: 6})
        grid = [0.1, 0.5, 1.0, 2.0, 8.0, 64.0, 1e4]
        values = [esf_probability(abund, psi) for psi in grid]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_log_space_never_underflows(self):
        # extreme shapes at extreme psi still give finite log-probabilities
        for abund, psi in [
            (Abundance({10**4: 1}), 1e6),
            (Abundance({1: 10**4}), 1e-3),
            (Abundance({1: 10**4}), 1e6),
            (Abundance({10**4: 1}), 1e-3),
        ]:
            assert math.isfinite(esf_log_probability(abund, psi))

    def test_relative_psi_spec(self):
        abund = Abundance({1: 1, 2: 2})  # n = 5
        assert esf_log_probability(abund, "r") == esf_log_probability(abund, 5.0)
        assert esf_log_probability(abund, "a") == esf_log_probability(abund, 1.0)

    def test_empty_abundance_rejected(self):
        with pytest.raises(ValueError):
            esf_log_probability(Abundance({}), 1.0)
