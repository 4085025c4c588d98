"""Deployment sampling and ordered-distance laws against statistical oracles."""
import math

import numpy as np
import pytest
from scipy import special, stats

from crancap import (
    Deployment,
    ParameterError,
    QuadratureSpec,
    build_params,
    integrate,
    joint_two_nearest_pdf,
    mean_inverse_pow_distance,
    nearest_distance_pdf,
    residual_mean_power,
    sample_deployment,
    sample_nearest_distances,
)


class TestSampleDeployment:
    def test_count_and_ordering_contract(self, baseline):
        rng = np.random.default_rng(1)
        d = sample_deployment(baseline, rng)
        assert d.n_rrh == d.distances.size
        assert np.all(d.distances > 0)
        assert np.all(d.distances <= baseline.disc_radius_m)
        assert np.all(np.diff(d.distances) >= 0)

    def test_mean_count_matches_poisson_mean(self, baseline):
        rng = np.random.default_rng(2)
        counts = [sample_deployment(baseline, rng).n_rrh for _ in range(20_000)]
        # SE of the mean is sqrt(113.1 / 2e4) ~ 0.075
        assert np.mean(counts) == pytest.approx(113.09733552923255, abs=0.4)

    def test_nearly_empty_regime(self):
        p = build_params(lam=0.01 / (math.pi * 600.0**2))  # disc mean 0.01
        rng = np.random.default_rng(3)
        empty = sum(sample_deployment(p, rng).n_rrh == 0 for _ in range(10_000))
        assert empty / 10_000 == pytest.approx(math.exp(-0.01), abs=0.005)

    def test_nearest_distance_law(self, baseline):
        """pi*lam*r_1^2 from disc sampling must follow Exp(1)."""
        rng = np.random.default_rng(4)
        r1 = np.array(
            [sample_deployment(baseline, rng).distances[0] for _ in range(20_000)]
        )
        x = math.pi * baseline.lam * r1**2
        assert stats.kstest(x, "expon").pvalue > 0.01

    def test_deployment_validation(self):
        with pytest.raises(ParameterError):
            Deployment(distances=np.array([2.0, 1.0]), n_rrh=2)
        with pytest.raises(ParameterError):
            Deployment(distances=np.array([1.0]), n_rrh=2)
        assert Deployment(distances=np.array([]), n_rrh=0).n_rrh == 0


class TestPlaneSampler:
    @pytest.mark.parametrize("i", [1, 2, 3, 5])
    def test_rank_i_law(self, baseline, i):
        rng = np.random.default_rng(10 + i)
        r = sample_nearest_distances(baseline, i, rng, size=100_000)[:, i - 1]
        x = math.pi * baseline.lam * r**2
        assert stats.kstest(x, lambda q: special.gammainc(i, q)).pvalue > 0.01

    def test_disc_and_plane_agree(self, baseline):
        """Second-nearest distances from both samplers share one distribution."""
        rng = np.random.default_rng(20)
        disc = np.array(
            [sample_deployment(baseline, rng).distances[1] for _ in range(10_000)]
        )
        plane = sample_nearest_distances(baseline, 2, rng, size=10_000)[:, 1]
        assert stats.ks_2samp(disc, plane).pvalue > 0.01

    def test_shapes(self, baseline):
        rng = np.random.default_rng(21)
        assert sample_nearest_distances(baseline, 3, rng).shape == (3,)
        assert sample_nearest_distances(baseline, 3, rng, size=7).shape == (7, 3)


class TestNearestDistancePdf:
    def test_vanishes_at_origin(self):
        assert nearest_distance_pdf(0.0, 1e-4) == 0.0

    def test_normalization(self):
        lam = 1e-4
        spec = QuadratureSpec(tail_scale=1.0 / math.sqrt(math.pi * lam))
        value, _ = integrate(lambda r: nearest_distance_pdf(r, lam), 0.0, math.inf, spec)
        assert value == pytest.approx(1.0, abs=1e-6)

    def test_mode_location(self):
        lam = 1e-4
        mode = 1.0 / math.sqrt(2 * math.pi * lam)
        assert nearest_distance_pdf(mode, lam) > nearest_distance_pdf(mode * 1.01, lam)
        assert nearest_distance_pdf(mode, lam) > nearest_distance_pdf(mode * 0.99, lam)


class TestJointTwoNearestPdf:
    def test_zero_outside_ordered_wedge(self):
        assert joint_two_nearest_pdf(2.0, 1.0, 1e-4) == 0.0

    def test_normalization(self):
        lam = 1e-4
        scale = 1.0 / math.sqrt(math.pi * lam)

        def inner(r2):
            v, _ = integrate(lambda r1: joint_two_nearest_pdf(r1, r2, lam), 0.0, r2)
            return v

        value, _ = integrate(inner, 0.0, math.inf, QuadratureSpec(rel_tol=1e-9, tail_scale=scale))
        assert value == pytest.approx(1.0, abs=1e-6)

    def test_marginal_recovers_nearest_pdf(self):
        lam = 1e-4
        scale = 1.0 / math.sqrt(math.pi * lam)
        for r1 in (10.0, 50.0, 120.0):
            marginal, _ = integrate(
                lambda r2: joint_two_nearest_pdf(r1, r2, lam),
                r1,
                math.inf,
                QuadratureSpec(rel_tol=1e-10, tail_scale=scale),
            )
            assert marginal == pytest.approx(nearest_distance_pdf(r1, lam), rel=1e-8)


class TestInverseDistanceMoments:
    def test_rank3_closed_form(self, baseline):
        expect = (math.pi * baseline.lam) ** 2 / 2.0
        assert mean_inverse_pow_distance(3, baseline) == pytest.approx(expect, rel=1e-12)

    def test_rank_at_pole_rejected(self, baseline):
        with pytest.raises(ParameterError, match="divergent moment"):
            mean_inverse_pow_distance(2, baseline)
        with pytest.raises(ParameterError, match="divergent moment"):
            mean_inverse_pow_distance(1, baseline)

    def test_rank5_against_simulation(self, baseline):
        rng = np.random.default_rng(42)
        r5 = sample_nearest_distances(baseline, 5, rng, size=1_000_000)[:, 4]
        mc = np.mean(r5**-4.0)
        assert mc == pytest.approx(mean_inverse_pow_distance(5, baseline), rel=0.01)

    def test_general_alpha_threshold(self):
        p = build_params(path_loss_exp=3.0)
        with pytest.raises(ParameterError):
            mean_inverse_pow_distance(1, p)
        assert mean_inverse_pow_distance(2, p) > 0


class TestResidualMeanPower:
    def test_empty_sum(self, baseline):
        assert residual_mean_power(2, baseline) == 0.0

    def test_first_term(self, baseline):
        expect = (
            baseline.snr_scale
            * baseline.num_antennas
            * (math.pi * baseline.lam) ** 2
            / 2.0
        )
        assert residual_mean_power(3, baseline) == pytest.approx(expect, rel=1e-12)

    def test_matches_rank_moment_sum(self, baseline):
        lead = baseline.snr_scale * baseline.num_antennas
        total = lead * sum(mean_inverse_pow_distance(i, baseline) for i in range(3, 11))
        assert residual_mean_power(10, baseline) == pytest.approx(total, rel=1e-12)

    def test_telescoping_identity(self):
        for n in (3, 10, 37, 100):
            partial = sum(1.0 / ((i - 1) * (i - 2)) for i in range(3, n + 1))
            assert partial == pytest.approx((n - 2) / (n - 1), rel=1e-14)

    def test_monotone_and_bounded(self, baseline):
        values = [residual_mean_power(n, baseline) for n in (2, 3, 4, 8, 16, 64)]
        assert all(a < b for a, b in zip(values, values[1:]))
        bound = baseline.snr_scale * baseline.num_antennas * (math.pi * baseline.lam) ** 2
        assert values[-1] < bound

    def test_alpha_gate(self):
        p = build_params(path_loss_exp=3.5)
        with pytest.raises(ParameterError):
            residual_mean_power(4, p)
