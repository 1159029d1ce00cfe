"""Score test, likelihood-ratio tests, the empirical shape test, and the
chi-square tail helper."""

import math

import numpy as np
import pytest

from ewens import (
    Abundance,
    MleBoundaryError,
    chisq_upper_tail,
    compute_abundance,
    fisher_information,
    log_rising_factorial,
    mle_psi,
    mle_psi_pooled,
    sample_hoppe_urn,
    score_function,
    score_test,
    lrt_samples,
    watterson_statistic,
    watterson_test,
)


def psi_log_likelihood(psi, abund):
    return abund.k * math.log(psi) - log_rising_factorial(psi, abund.n)


class TestScoreFunction:
    def test_hand_value(self):
        # K=2, n=3, psi=1: 2/1 - (1 + 1/2 + 1/3) = 1/6
        np.testing.assert_allclose(
            score_function(1.0, Abundance({1: 1, 2: 1})), 1 / 6, rtol=1e-12
        )

    def test_zero_at_mle(self):
        abund = compute_abundance(sample_hoppe_urn(400, 3.0, seed=17))
        est = mle_psi(abund)
        assert abs(score_function(est.psi_hat, abund)) <= 1e-8

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(5, 400))
            psi = float(np.exp(rng.uniform(math.log(0.05), math.log(50))))
            abund = compute_abundance(
                sample_hoppe_urn(n, max(psi, 0.2), seed=int(rng.integers(2**63)))
            )
            h = 1e-6 * psi
            fd = (
                psi_log_likelihood(psi + h, abund) - psi_log_likelihood(psi - h, abund)
            ) / (2 * h)
            u = score_function(psi, abund)
            assert abs(fd - u) <= 1e-6 * max(1.0, abs(u))


class TestFisherInformation:
    def test_single_observation_uninformative(self):
        assert fisher_information(5.0, 1) == 0.0

    def test_hand_value(self):
        # psi=1, n=2: single i=1 term, 1/(1*(1+1)^2) = 0.25
        np.testing.assert_allclose(fisher_information(1.0, 2), 0.25, rtol=1e-14)

    def test_positive_and_increasing_in_n(self):
        for psi in (0.3, 1.0, 12.0):
            values = [fisher_information(psi, n) for n in (2, 5, 20, 100, 1000)]
            assert all(v > 0 for v in values)
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_matches_variance_of_score(self):
        # I(psi) is exactly the variance of U: K is a sum of independent
        # new-species indicators, so a modest Monte Carlo run must agree
        draws, psi, n = 20000, 5.0, 50
        us = np.array(
            [
                score_function(psi, compute_abundance(sample_hoppe_urn(n, psi, seed=s)))
                for s in range(draws)
            ]
        )
        var_u = us.var()
        info = fisher_information(psi, n)
        m4 = np.mean((us - us.mean()) ** 4)
        se = math.sqrt((m4 - var_u**2) / draws)
        assert abs(var_u - info) < 3 * se


class TestChisqUpperTail:
    def test_at_zero(self):
        for df in (1, 2, 7, 100):
            assert chisq_upper_tail(0.0, df) == 1.0

    def test_df1_quantile(self):
        np.testing.assert_allclose(chisq_upper_tail(3.841459, 1), 0.05, atol=1e-5)

    def test_df2_quantile(self):
        np.testing.assert_allclose(chisq_upper_tail(5.991465, 2), 0.05, atol=1e-6)

    def test_df1_matches_normal_tail(self):
        # chi2(1) upper tail at x equals erfc(sqrt(x/2))
        for x in (0.1, 1.0, 2.5, 9.0, 30.0):
            np.testing.assert_allclose(
                chisq_upper_tail(x, 1), math.erfc(math.sqrt(x / 2)), rtol=1e-12
            )

    def test_df2_closed_form(self):
        for x in np.linspace(0.0, 50.0, 101):
            assert abs(chisq_upper_tail(float(x), 2) - math.exp(-x / 2)) <= 1e-12

    def test_df4_closed_form(self):
        # Q(2, y) = (1 + y) e^{-y} with y = x/2
        for x in (0.5, 2.0, 11.0, 40.0):
            y = x / 2
            np.testing.assert_allclose(
                chisq_upper_tail(x, 4), (1 + y) * math.exp(-y), rtol=1e-12
            )

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            chisq_upper_tail(-0.1, 1)
        with pytest.raises(ValueError):
            chisq_upper_tail(1.0, 0)


class TestScoreTest:
    def test_hand_values_pair(self):
        # K=2, n=2, psi0=1: U = 2 - 3/2 = 1/2, I = 1/4, S = 1
        result = score_test(Abundance({1: 2}), psi0=1.0)
        np.testing.assert_allclose(result.statistic, 1.0, rtol=1e-12)
        np.testing.assert_allclose(result.p_value, math.erfc(math.sqrt(0.5)), rtol=1e-12)
        assert result.df == 1
        assert result.statistic_name == "S"
        np.testing.assert_allclose(result.extras["score"], 0.5)
        np.testing.assert_allclose(result.extras["information"], 0.25)

    def test_vanishes_at_the_mle(self):
        abund = compute_abundance(sample_hoppe_urn(1000, 10.0, seed=1))
        est = mle_psi(abund)
        result = score_test(abund, psi0=est.psi_hat)
        assert result.statistic < 1e-12
        assert result.p_value > 1 - 1e-5

    def test_null_value_ordering(self):
        abund = compute_abundance(sample_hoppe_urn(1000, 10.0, seed=1))
        p = {psi0: score_test(abund, psi0=psi0).p_value for psi0 in (10, 15, 5, 1, "r")}
        assert p[10] > p[5]
        assert p[10] > p[15]
        assert all(0 <= v <= 1 for v in p.values())

    def test_depends_only_on_k_and_n(self):
        a = Abundance({1: 2, 3: 1})  # n=5, k=3
        b = Abundance({1: 1, 2: 2})  # n=5, k=3
        ra, rb = score_test(a, psi0=2.0), score_test(b, psi0=2.0)
        assert (ra.statistic, ra.p_value, dict(ra.extras)) == (
            rb.statistic,
            rb.p_value,
            dict(rb.extras),
        )

    def test_psi0_specs(self):
        abund = Abundance({1: 2, 2: 1})  # n=4
        assert score_test(abund).extras["psi0"] == 1.0
        assert score_test(abund, psi0="r").extras["psi0"] == 4.0

    def test_needs_two_observations(self):
        with pytest.raises(ValueError):
            score_test(Abundance({1: 1}), psi0=1.0)


class TestLrtSamples:
    def test_identical_samples_give_zero(self):
        abund = compute_abundance(sample_hoppe_urn(100, 3.0, seed=9))
        result = lrt_samples([abund, abund])
        assert result.statistic == 0.0
        assert result.p_value == 1.0
        assert result.df == 1
        assert result.statistic_name == "Lambda"

    def test_three_sample_shapes(self):
        abunds = [
            compute_abundance(sample_hoppe_urn(1200, 15.0, seed=61)),
            compute_abundance(sample_hoppe_urn(1000, 20.0, seed=62)),
            compute_abundance(sample_hoppe_urn(800, 30.0, seed=63)),
        ]
        result = lrt_samples(abunds)
        assert result.statistic > 0
        assert result.df == 2
        assert 0 < result.p_value < 1
        assert set(result.extras) == {"psi_shared", "psi_1", "psi_2", "psi_3"}
        assert result.extras["psi_shared"] == pytest.approx(
            mle_psi_pooled(abunds).psi_hat
        )

    def test_statistic_never_negative(self):
        rng = np.random.default_rng(404)
        for _ in range(50):
            seeds = rng.integers(0, 2**63, size=2).tolist()
            a = compute_abundance(sample_hoppe_urn(60, 2.0, seed=seeds[0]))
            b = compute_abundance(sample_hoppe_urn(90, 2.0, seed=seeds[1]))
            assert lrt_samples([a, b]).statistic >= 0.0

    def test_statistic_is_minus_two_log_ratio(self):
        a = compute_abundance(sample_hoppe_urn(200, 2.0, seed=5))
        b = compute_abundance(sample_hoppe_urn(150, 9.0, seed=6))
        result = lrt_samples([a, b])
        shared = result.extras["psi_shared"]
        separate = [result.extras["psi_1"], result.extras["psi_2"]]
        direct = -2.0 * (
            psi_log_likelihood(shared, a)
            + psi_log_likelihood(shared, b)
            - psi_log_likelihood(separate[0], a)
            - psi_log_likelihood(separate[1], b)
        )
        np.testing.assert_allclose(result.statistic, direct, rtol=1e-9)

    def test_boundary_sample_named(self):
        good = compute_abundance(sample_hoppe_urn(50, 2.0, seed=3))
        with pytest.raises(MleBoundaryError, match="sample 1"):
            lrt_samples([good, Abundance({1: 10})])

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            lrt_samples([Abundance({1: 1, 2: 1})])


class TestWattersonStatistic:
    def test_extremes(self):
        assert watterson_statistic(list(range(10))) == 1.0
        assert watterson_statistic([7] * 10) == 10.0

    def test_uniform_five_species(self):
        sample = [t for t in "abcde" for _ in range(200)]
        assert watterson_statistic(sample) == 200.0

    def test_hand_value(self):
        # counts (2, 1): (4 + 1) / 3
        np.testing.assert_allclose(watterson_statistic(["a", "a", "b"]), 5 / 3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            watterson_statistic([])


class TestWattersonTest:
    def test_deterministic(self):
        sample = sample_hoppe_urn(80, 4.0, seed=12)
        a = watterson_test(sample, rounds=60, seed=2)
        b = watterson_test(sample, rounds=60, seed=2)
        assert a == b
        assert a.df is None
        assert a.statistic_name == "W"

    def test_uniform_sample_flagged(self):
        sample = [t for t in "abcde" for _ in range(200)]
        result = watterson_test(sample, rounds=50, seed=123)
        assert result.statistic == 200.0
        assert result.p_value <= 0.1

    def test_typical_samples_seldom_rejected(self):
        seeds = np.random.SeedSequence(9090).generate_state(200, dtype=np.uint64)
        rejections = 0
        for s in seeds.tolist():
            sample = sample_hoppe_urn(100, 10.0, seed=s)
            rejections += watterson_test(sample, rounds=50, seed=s).p_value < 0.05
        assert rejections <= 0.2 * 200

    def test_minimum_resolution(self):
        # add-one smoothing keeps p at or above 2/(rounds+1)
        for seed in range(5):
            result = watterson_test(sample_hoppe_urn(50, 3.0, seed=seed), rounds=10, seed=seed)
            assert result.p_value >= 2 / 11 - 1e-12

    def test_rounds_floor(self):
        with pytest.raises(ValueError, match="rounds"):
            watterson_test(sample_hoppe_urn(50, 3.0, seed=1), rounds=9)

    def test_boundary_sample_rejected(self):
        with pytest.raises(MleBoundaryError, match="shape test"):
            watterson_test(["a", "b", "c"], rounds=20)

    def test_reports_fitted_psi(self):
        sample = sample_hoppe_urn(120, 6.0, seed=44)
        result = watterson_test(sample, rounds=30, seed=1)
        est = mle_psi(compute_abundance(sample))
        assert result.extras["psi_hat"] == est.psi_hat
