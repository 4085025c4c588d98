"""Monte Carlo engine: fading laws, strategies, reproducibility, calibration."""
import math

import numpy as np
import pytest
from scipy import special, stats

from crancap import (
    Deployment,
    FadingDraw,
    ParameterError,
    TrialConfig,
    build_params,
    capacity_single_numeric,
    compare_strategies,
    draw_fading,
    estimate_capacity,
    estimate_outage,
    estimate_outage_grid,
    n_best,
    n_nearest,
    outage_single,
    simulate_snr,
    simulate_strategy_snrs,
    single_nearest,
    snr_sample,
)


class TestDrawFading:
    def test_moments(self):
        rng = np.random.default_rng(0)
        g = draw_fading(1_000_000, 4, rng).gains
        # mean and variance of Gamma(4, 1) are both 4
        assert np.mean(g) == pytest.approx(4.0, abs=3 * 2e-3)
        assert np.var(g) == pytest.approx(4.0, abs=0.05)

    def test_distribution(self):
        rng = np.random.default_rng(1)
        g = draw_fading(100_000, 4, rng).gains
        assert stats.kstest(g, lambda x: special.gammainc(4, x)).pvalue > 0.01

    def test_single_antenna_is_exponential(self):
        rng = np.random.default_rng(2)
        g = draw_fading(100_000, 1, rng).gains
        assert stats.kstest(g, "expon").pvalue > 0.01

    def test_negative_gain_rejected(self):
        with pytest.raises(ParameterError):
            FadingDraw(gains=np.array([1.0, -0.1]))


def _two_rrh_setup():
    # rho = 1 W / (1e-18 W/Hz * 1e8 Hz) = 1e10
    params = build_params(tx_power_w=1.0, noise_psd_w_hz=1e-18, bandwidth_hz=1e8)
    deployment = Deployment(distances=np.array([100.0, 200.0]), n_rrh=2)
    fading = FadingDraw(gains=np.array([4.0, 4.0]))
    return params, deployment, fading


class TestSnrSample:
    def test_hand_computed_two_rrh_value(self):
        params, deployment, fading = _two_rrh_setup()
        got = snr_sample(deployment, fading, n_nearest(2), params)
        # 1e10 * 4 * (100^-4 + 200^-4) = 400 + 25
        assert got.gamma == pytest.approx(425.0, rel=1e-12)

    def test_single_equals_one_nearest(self):
        params, deployment, fading = _two_rrh_setup()
        a = snr_sample(deployment, fading, single_nearest(), params)
        b = snr_sample(deployment, fading, n_nearest(1), params)
        assert a.gamma == b.gamma == pytest.approx(400.0, rel=1e-12)

    def test_n_best_dominates_n_nearest(self, baseline):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d = Deployment(distances=np.sort(rng.uniform(20, 600, size=12)), n_rrh=12)
            h = FadingDraw(gains=rng.gamma(4.0, 1.0, size=12))
            for n in (1, 2, 4):
                best = snr_sample(d, h, n_best(n), baseline).gamma
                near = snr_sample(d, h, n_nearest(n), baseline).gamma
                # equality up to summation-order rounding when the sets coincide
                assert best >= near * (1.0 - 1e-12)

    def test_insufficient_rrhs(self, baseline):
        d = Deployment(distances=np.array([50.0]), n_rrh=1)
        h = FadingDraw(gains=np.array([1.0]))
        with pytest.raises(ParameterError, match="resample"):
            snr_sample(d, h, n_nearest(2), baseline)


class TestTrialConfig:
    def test_minimum_trials(self):
        with pytest.raises(ParameterError):
            TrialConfig(n_trials=999, seed=0, strategy=single_nearest())

    def test_mode_validation(self):
        with pytest.raises(ParameterError):
            TrialConfig(n_trials=1000, seed=0, strategy=single_nearest(), fading_mode="x")
        with pytest.raises(ParameterError):
            TrialConfig(n_trials=1000, seed=0, strategy=single_nearest(), sampling="x")


class TestEstimators:
    def test_outage_limits_exact(self, baseline):
        config = TrialConfig(n_trials=2000, seed=5, strategy=single_nearest())
        assert estimate_outage(config, 0.0, baseline).mean == 0.0
        assert estimate_outage(config, math.inf, baseline).mean == 1.0

    def test_reproducibility(self, baseline):
        config = TrialConfig(n_trials=5000, seed=123, strategy=n_nearest(2))
        a = estimate_capacity(config, baseline)
        b = estimate_capacity(config, baseline)
        assert a == b

    def test_seed_changes_output(self, baseline):
        c1 = TrialConfig(n_trials=5000, seed=1, strategy=single_nearest())
        c2 = TrialConfig(n_trials=5000, seed=2, strategy=single_nearest())
        assert estimate_capacity(c1, baseline) != estimate_capacity(c2, baseline)

    def test_std_error_shrinks_with_trials(self, baseline):
        small = TrialConfig(n_trials=10_000, seed=7, strategy=single_nearest())
        large = TrialConfig(n_trials=40_000, seed=7, strategy=single_nearest())
        ratio = estimate_capacity(large, baseline).std_error / estimate_capacity(
            small, baseline
        ).std_error
        assert ratio == pytest.approx(0.5, abs=0.1)

    def test_vanishing_power_gives_zero_capacity(self, baseline):
        p = baseline.replace(tx_power_w=1e-30)
        config = TrialConfig(n_trials=2000, seed=9, strategy=n_nearest(2))
        assert estimate_capacity(config, p).mean == pytest.approx(0.0, abs=1e-12)

    def test_capacity_matches_analytic(self, baseline):
        config = TrialConfig(n_trials=200_000, seed=11, strategy=single_nearest())
        est = estimate_capacity(config, baseline)
        assert abs(est.mean - capacity_single_numeric(baseline)) < 0.1

    def test_outage_grid_shares_draws(self, baseline):
        config = TrialConfig(
            n_trials=50_000,
            seed=13,
            strategy=single_nearest(),
            threshold_grid=(1e3, 1e4, 1e5),
        )
        grid = estimate_outage_grid(config, baseline)
        assert [t for t, _ in grid] == [1e3, 1e4, 1e5]
        # monotone in T exactly, because the same SNR draws are thresholded
        assert grid[0][1].mean <= grid[1][1].mean <= grid[2][1].mean
        single = estimate_outage(config, 1e4, baseline)
        assert single.mean == grid[1][1].mean

    def test_plane_and_disc_sampling_agree(self, baseline):
        plane = TrialConfig(
            n_trials=100_000, seed=17, strategy=n_nearest(2), sampling="plane"
        )
        disc = TrialConfig(
            n_trials=100_000, seed=18, strategy=n_nearest(2), sampling="disc"
        )
        a = estimate_capacity(plane, baseline)
        b = estimate_capacity(disc, baseline)
        assert abs(a.mean - b.mean) < 4 * math.hypot(a.std_error, b.std_error)

    def test_ci_calibration(self, baseline):
        """The analytic value must land inside the 95% interval ~95 times in 100."""
        T = 1e4
        truth = outage_single(T, baseline)
        hits = 0
        for seed in range(100):
            config = TrialConfig(
                n_trials=20_000, seed=1000 + seed, strategy=single_nearest(), sampling="plane"
            )
            if estimate_outage(config, T, baseline).contains(truth):
                hits += 1
        assert 90 <= hits <= 99


class TestDiscResampling:
    def test_resampled_trials_counted(self):
        # disc mean ~5 RRHs, strategy needs 6: many trials resample
        p = build_params(lam=5.0 / (math.pi * 600.0**2))
        config = TrialConfig(n_trials=2000, seed=19, strategy=n_nearest(6))
        sim = simulate_snr(config, p)
        assert sim.resampled_trials > 0
        assert sim.snr.shape == (2000,)
        assert np.all(sim.snr > 0)

    def test_infeasible_disc_request(self):
        p = build_params(lam=1e-5)  # disc mean 11.3
        config = TrialConfig(n_trials=1000, seed=20, strategy=n_nearest(64))
        with pytest.raises(ParameterError, match="plane"):
            simulate_snr(config, p)

    def test_n_best_needs_disc(self, baseline):
        config = TrialConfig(
            n_trials=1000, seed=21, strategy=n_best(2), sampling="plane"
        )
        with pytest.raises(ParameterError, match="disc"):
            simulate_snr(config, baseline)


class TestCommonRandomNumbers:
    def test_per_realization_orderings(self, baseline):
        strategies = [single_nearest(), n_nearest(2), n_nearest(3), n_best(2), n_best(3)]
        snrs = simulate_strategy_snrs(baseline, strategies, n_trials=5000, seed=23)
        slack = 1.0 - 1e-12  # summation-order rounding when the sets coincide
        # nested nearest sums grow with n, trial by trial
        assert np.all(snrs["nearest"] <= snrs["2-nearest"] / slack)
        assert np.all(snrs["2-nearest"] <= snrs["3-nearest"] / slack)
        # best-n dominates nearest-n, trial by trial
        assert np.all(snrs["2-best"] >= snrs["2-nearest"] * slack)
        assert np.all(snrs["3-best"] >= snrs["3-nearest"] * slack)

    def test_compare_strategies_table(self, baseline):
        table = compare_strategies(baseline, [2, 4], trials=20_000, seed=29)
        assert set(table) == {"nearest", "2-nearest", "2-best", "4-nearest", "4-best"}
        assert table["2-best"].mean >= table["2-nearest"].mean
        assert table["4-best"].mean >= table["4-nearest"].mean
        assert table["nearest"].mean <= table["2-nearest"].mean <= table["4-nearest"].mean

    def test_empty_n_list_rejected(self, baseline):
        with pytest.raises(ParameterError):
            compare_strategies(baseline, [], trials=2000)
