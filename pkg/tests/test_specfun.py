"""Special functions and the quadrature wrapper against independent oracles."""
import math

import numpy as np
import pytest
from scipy import special

from crancap import (
    QuadratureError,
    QuadratureSpec,
    capacity_series,
    euler_gamma,
    harmonic_number,
    integrate,
    lower_incomplete_gamma,
)


def _lower_gamma_series(a: float, b: float, terms: int = 200) -> float:
    """Independent series oracle: eps(a, b) = b^a e^-b sum_k b^k / (a (a+1) ... (a+k))."""
    total = 0.0
    coef = 1.0 / a
    for k in range(terms):
        total += coef
        coef *= b / (a + k + 1)
    return b**a * math.exp(-b) * total


class TestLowerIncompleteGamma:
    def test_at_zero(self):
        assert lower_incomplete_gamma(4.0, 0.0) == 0.0

    def test_shape_one_closed_form(self):
        for b in (0.1, 1.0, 5.0):
            assert lower_incomplete_gamma(1.0, b) == pytest.approx(1 - math.exp(-b), rel=1e-14)

    def test_against_series_oracle(self):
        val = lower_incomplete_gamma(4.0, 5.0) / math.gamma(4.0)
        assert val == pytest.approx(_lower_gamma_series(4.0, 5.0) / math.gamma(4.0), abs=1e-12)

    def test_monotone_and_saturating(self):
        vals = [lower_incomplete_gamma(3.0, b) for b in (0.5, 1.0, 2.0, 10.0, 50.0)]
        assert all(x < y for x, y in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(math.gamma(3.0), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lower_incomplete_gamma(0.0, 1.0)
        with pytest.raises(ValueError):
            lower_incomplete_gamma(1.0, -0.1)

    @pytest.mark.parametrize("a", [1.0, 2.0, 4.0, 8.0])
    @pytest.mark.parametrize("b", [0.1, 1.0, 10.0])
    def test_lower_plus_upper_tail_is_gamma(self, a, b):
        """The upper tail is evaluated by quadrature, independent of the cdf route."""
        upper, _ = integrate(lambda u: u ** (a - 1) * math.exp(-u), b, math.inf)
        assert lower_incomplete_gamma(a, b) + upper == pytest.approx(
            math.gamma(a), rel=1e-10
        )


class TestHarmonicAndEulerGamma:
    def test_harmonic_values(self):
        assert harmonic_number(0) == 0.0
        assert harmonic_number(1) == 1.0
        assert harmonic_number(3) == pytest.approx(11.0 / 6.0, rel=1e-15)

    def test_harmonic_rejects_negative(self):
        with pytest.raises(ValueError):
            harmonic_number(-1)

    def test_euler_gamma_limit_oracle(self):
        n = 10**6
        assert euler_gamma() == pytest.approx(harmonic_number(n) - math.log(n), abs=1e-6)

    def test_euler_gamma_range(self):
        assert 0.0 < euler_gamma() < 1.0
        assert euler_gamma() == pytest.approx(0.5772156649015329, abs=1e-15)


class TestCapacitySeries:
    def test_leading_terms(self):
        term = lambda j: 1.0 / ((j + 1) * (2 * j + 1))
        assert term(0) == 1.0
        assert term(0) + term(1) == pytest.approx(7.0 / 6.0, rel=1e-15)

    def test_equals_two_ln_two(self):
        assert capacity_series() == pytest.approx(2.0 * math.log(2.0), abs=1e-10)

    def test_telescoped_form_matches(self):
        """Each term equals 2/(2j+1) - 2/(2j+2); partial sums must agree."""
        j = np.arange(5000)
        direct = np.sum(1.0 / ((j + 1) * (2 * j + 1)))
        telescoped = np.sum(2.0 / (2 * j + 1) - 2.0 / (2 * j + 2))
        assert direct == pytest.approx(telescoped, rel=1e-13)


class TestIntegrate:
    def test_exponential_to_infinity(self):
        value, err = integrate(lambda x: math.exp(-x), 0.0, math.inf)
        assert value == pytest.approx(1.0, abs=1e-10)
        assert err <= 1e-7

    def test_endpoint_singularity(self):
        value, _ = integrate(lambda x: x**-0.5, 0.0, 1.0)
        assert value == pytest.approx(2.0, rel=1e-10)

    def test_nearest_distance_normalization(self):
        lam = 1e-4
        f = lambda r: 2 * math.pi * lam * r * math.exp(-math.pi * lam * r * r)
        spec = QuadratureSpec(tail_scale=1.0 / math.sqrt(math.pi * lam))
        value, _ = integrate(f, 0.0, math.inf, spec)
        assert value == pytest.approx(1.0, rel=1e-9)

    def test_algebraic_tail_with_scale_hint(self):
        """Half-Cauchy mass sits near s = 1e6; the tail transform must find it."""
        s = 1e6
        f = lambda x: (2.0 / math.pi) * s / (s * s + x * x)
        value, _ = integrate(f, 0.0, math.inf, QuadratureSpec(tail_scale=s))
        assert value == pytest.approx(1.0, rel=1e-9)

    def test_far_algebraic_tail(self):
        value, _ = integrate(lambda x: x**-1.5, 1e6, math.inf)
        assert value == pytest.approx(0.002, rel=1e-9)

    def test_divergent_integral_raises(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: 1.0 / x, 0.0, 1.0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(tail_scale=-1.0)
        with pytest.raises(ValueError):
            integrate(lambda x: x, -math.inf, 0.0)
