"""Closed-form and semi-analytic outage/capacity expressions.

Conventions used throughout:

* rho = tx power / noise power, L = antennas per RRH, lam = RRH intensity.
* The combined fading gain per RRH is Gamma(L, 1); "mean fading" replaces
  it by its expectation L.
* x = pi*lam*r^2 maps the i-th nearest distance to a Gamma(i, 1) arrival,
  so most integrals below are written in that dimensionless variable.
* Capacities are in bps/Hz.  Closed forms rely on the high-SNR step
  log2(1 + g) ~ log2(g) and are flagged with a LowSnrWarning when the
  result falls below 3 bps/Hz, where that step is no longer trustworthy;
  the numeric modes keep the exact logarithm.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import special as _sci_special

from .geometry import residual_mean_power
from .params import ParameterError, SystemParams
from .specfun import (
    EULER_GAMMA,
    QuadratureSpec,
    capacity_series,
    harmonic_number,
    integrate,
)

LN2 = math.log(2.0)

_OUTER = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-11)
_INNER = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13)
_NESTED_OUTER = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10)

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(96)


class LowSnrWarning(UserWarning):
    """A high-SNR closed form was evaluated outside its validity range."""


def _warn_if_low(value: float, name: str) -> float:
    if value < 3.0:
        warnings.warn(
            f"{name} = {value:.3f} bps/Hz is below the ~3 bps/Hz validity floor of the "
            "high-SNR approximation; prefer the numeric-integral mode here",
            LowSnrWarning,
            stacklevel=3,
        )
    return value


# ---------------------------------------------------------------------------
# single nearest RRH
# ---------------------------------------------------------------------------

def outage_single(T: float, params: SystemParams) -> float:
    """Outage probability of nearest-RRH association with exact fading.

    Averages the Gamma(L, 1) fading cdf over the nearest-distance law:
    integral over x of P(L, (x/(pi lam))^(alpha/2) T / rho) e^(-x) dx.
    Nondecreasing in T, mapping (0, inf) onto (0, 1).
    """
    if T < 0:
        raise ParameterError(f"threshold must be non-negative, got {T!r}")
    if T == 0:
        return 0.0
    if math.isinf(T):
        return 1.0
    L = params.num_antennas
    pil = math.pi * params.lam
    t_over_rho = T / params.snr_scale
    half_alpha = params.path_loss_exp / 2.0

    def f(x: float) -> float:
        return _sci_special.gammainc(L, (x / pil) ** half_alpha * t_over_rho) * math.exp(-x)

    value, _ = integrate(f, 0.0, math.inf, _OUTER)
    return min(max(value, 0.0), 1.0)


def capacity_single_closed(params: SystemParams) -> float:
    """High-SNR closed-form ergodic capacity of nearest-RRH association.

    [H_(L-1) + (alpha/2)(ln(pi lam) + C) - C + ln rho] / ln 2 with C
    Euler's constant; exact for E[log2(SNR)] at any alpha > 2.  Valid
    once rho*(pi lam)^(alpha/2) is large; see LowSnrWarning.
    """
    value = (
        harmonic_number(params.num_antennas - 1)
        + (params.path_loss_exp / 2.0) * (math.log(math.pi * params.lam) + EULER_GAMMA)
        - EULER_GAMMA
        + math.log(params.snr_scale)
    ) / LN2
    return _warn_if_low(value, "capacity_single_closed")


def _gamma_log2_mean(a: float, L: int) -> float:
    """E[log2(1 + X/a)] for X ~ Gamma(L, 1), by quadrature."""
    def f(x: float) -> float:
        return math.exp((L - 1) * math.log(x) - x - _sci_special.gammaln(L)) * math.log2(1.0 + x / a)

    # rel_tol stays above the QUADPACK roundoff floor of the log-singular
    # integrand at small a (large SNR); consumers compare at >= 1e-3
    spec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12, tail_scale=L + 10.0 * math.sqrt(L) + 10.0)
    value, _ = integrate(f, 0.0, math.inf, spec)
    return value


def capacity_single_numeric(params: SystemParams) -> float:
    """Ergodic capacity of nearest-RRH association with the exact logarithm.

    Double integral of the SNR density against log2(1 + g): the inner
    average is over Gamma(L, 1) fading at fixed distance, the outer over
    the nearest-distance law.  No high-SNR approximation.
    """
    L = params.num_antennas
    pil = math.pi * params.lam
    rho = params.snr_scale
    half_alpha = params.path_loss_exp / 2.0

    def f(x: float) -> float:
        a = (x / pil) ** half_alpha / rho
        return math.exp(-x) * _gamma_log2_mean(a, L)

    value, _ = integrate(f, 0.0, math.inf, _NESTED_OUTER)
    return value


# ---------------------------------------------------------------------------
# two nearest RRHs
# ---------------------------------------------------------------------------

def _sum_gamma_cdf(T: float, w1: float, w2: float, L: int) -> float:
    """P(w1*H1 + w2*H2 < T) for independent H ~ Gamma(L, 1), w1 >= w2 > 0.

    Conditions on the gain of the second term and integrates the first
    term's cdf with a fixed Gauss-Legendre rule; the gain's upper range is
    cut where its survival probability drops below ~1e-12.
    """
    if T <= 0:
        return 0.0
    h_hi = min(T / w2, L + 40.0 + 10.0 * math.sqrt(L))
    h = 0.5 * h_hi * (_GAUSS_X + 1.0)
    wq = 0.5 * h_hi * _GAUSS_W
    log_pdf = (L - 1) * np.log(h) - h - _sci_special.gammaln(L)
    first_cdf = _sci_special.gammainc(L, np.maximum(T - w2 * h, 0.0) / w1)
    return float(np.sum(wq * np.exp(log_pdf) * first_cdf))


def _mean_fading_two_outage(T: float, params: SystemParams) -> float:
    """Mean-fading outage of the 2-nearest sum, single integral in x = pi lam r2^2."""
    if T <= 0:
        return 0.0
    if math.isinf(T):
        return 1.0
    c = params.snr_scale * params.num_antennas * (math.pi * params.lam) ** 2
    x0 = math.sqrt(2.0 * c / T)

    def f(x: float) -> float:
        return x * math.exp(-x) * (1.0 - math.sqrt(c / (T * x * x - c)))

    spec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, tail_scale=max(1.0, x0))
    value, _ = integrate(f, x0, math.inf, spec)
    return min(max(value, 0.0), 1.0)


def outage_two(T: float, params: SystemParams, mode: str = "exact_double") -> float:
    """Outage probability of 2-nearest association.

    mode "exact_double" keeps the Gamma(L, 1) fading of both RRHs and
    integrates the conditional outage against the joint law of the two
    nearest distances (any alpha > 2).  mode "mean_fading_single"
    replaces each gain by its mean L, which collapses the double integral
    to a single one supported on r2 > (2 rho L / T)^(1/alpha); it requires
    alpha = 4 and carries the approximation error of that mean
    substitution (quantified against the simulator in validation).
    """
    if T < 0:
        raise ParameterError(f"threshold must be non-negative, got {T!r}")
    if mode == "mean_fading_single":
        params.require_alpha4("outage_two(mode='mean_fading_single')")
        return _mean_fading_two_outage(T, params)
    if mode != "exact_double":
        raise ParameterError(f"unknown outage_two mode {mode!r}")
    if T == 0:
        return 0.0
    if math.isinf(T):
        return 1.0

    L = params.num_antennas
    pil = math.pi * params.lam
    rho = params.snr_scale
    half_alpha = params.path_loss_exp / 2.0

    def weight(x: float) -> float:
        return rho * (x / pil) ** (-half_alpha)

    def inner(v: float) -> float:
        wv = weight(v)
        val, _ = integrate(lambda u: _sum_gamma_cdf(T, weight(u), wv, L), 0.0, v, _INNER)
        return val

    value, _ = integrate(lambda v: math.exp(-v) * inner(v), 0.0, math.inf, _NESTED_OUTER)
    return min(max(value, 0.0), 1.0)


def snr_pdf_two(gamma: float, params: SystemParams) -> float:
    """Mean-fading SNR density of 2-nearest association (any alpha > 2).

    Single integral over x = pi*lam*r2^2 from x0 = (2 L rho / gamma)^(2/alpha)
    * (pi lam); the integrand is bounded at x0, where the bracket equals
    gamma/2, and the Gaussian factor kills the far tail.  The density has
    a gamma^(-3/2)-type heavy tail at alpha = 4 (index alpha/2 generally),
    so tail-aware quadrature is used for its moments.
    """
    if gamma <= 0:
        raise ParameterError(f"gamma must be positive, got {gamma!r}")
    L = params.num_antennas
    alpha = params.path_loss_exp
    pil = math.pi * params.lam
    rho = params.snr_scale
    lrho = L * rho
    # integrate in x = pi*lam*t; the 1/pil factor is the Jacobian dt/dx
    x0 = (2.0 * lrho / gamma) ** (2.0 / alpha) * pil
    amp = 2.0 * math.pi**2 * params.lam**2 * lrho ** (2.0 / alpha) / (alpha * pil)

    def f(x: float) -> float:
        t = x / pil
        return (
            amp
            * (gamma - lrho * t ** (-alpha / 2.0)) ** (-2.0 / alpha - 1.0)
            * math.exp(-x)
        )

    near, _ = integrate(f, x0, 2.0 * x0, _INNER)
    far_spec = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14, tail_scale=max(2.0 * x0, 1.0))
    far, _ = integrate(f, 2.0 * x0, math.inf, far_spec)
    return max(near + far, 0.0)


def _snr_two_scale(params: SystemParams) -> float:
    """Typical mean-fading 2-nearest SNR, used to place quadrature splits."""
    return 2.0 * params.snr_scale * params.num_antennas * (math.pi * params.lam) ** 2


def _capacity_from_two_pdf(params: SystemParams, shift: float) -> float:
    """E[log2(1 + shift + g)] with g drawn from snr_pdf_two, by quadrature."""
    med = _snr_two_scale(params)
    split = 100.0 * med

    def f(g: float) -> float:
        return snr_pdf_two(g, params) * math.log2(1.0 + shift + g)

    head, _ = integrate(f, 0.0, split, QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10))
    tail_spec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10, tail_scale=1e3 * split)
    tail, _ = integrate(f, split, math.inf, tail_spec)
    return head + tail


def capacity_two(params: SystemParams, mode: str = "closed_alpha4") -> float:
    """Ergodic capacity of 2-nearest association under mean fading.

    mode "closed_alpha4" is the high-SNR closed form
    [ln(2 rho L) + pi/2 - 2 + 2C + 2 ln(pi lam)] / ln 2 (alpha = 4 only);
    doubling L adds exactly 1 bps/Hz and quadrupling lam adds exactly 4.
    mode "numeric_integral" integrates log2(1 + g) against snr_pdf_two
    with no high-SNR step (any alpha > 2).
    """
    if mode == "closed_alpha4":
        params.require_alpha4("capacity_two(mode='closed_alpha4')")
        value = (
            math.log(2.0 * params.snr_scale * params.num_antennas)
            + math.pi / 2.0
            - 2.0
            + 2.0 * EULER_GAMMA
            + 2.0 * math.log(math.pi * params.lam)
        ) / LN2
        return _warn_if_low(value, "capacity_two(closed_alpha4)")
    if mode != "numeric_integral":
        raise ParameterError(f"unknown capacity_two mode {mode!r}")
    return _capacity_from_two_pdf(params, shift=0.0)


# ---------------------------------------------------------------------------
# n nearest RRHs (alpha = 4)
# ---------------------------------------------------------------------------

def outage_n(T: float, n: int, params: SystemParams) -> float:
    """Outage probability of n-nearest association, alpha = 4 approximation.

    RRHs of rank 3..n are replaced by their mean contribution
    S = residual_mean_power(n), after which the mean-fading 2-nearest
    integral applies at the reduced threshold T - S; thresholds T <= S
    cannot be in outage.  n = 2 reduces exactly to
    outage_two(mode="mean_fading_single").
    """
    params.require_alpha4("outage_n")
    if T < 0:
        raise ParameterError(f"threshold must be non-negative, got {T!r}")
    s = residual_mean_power(n, params)
    if T <= s:
        return 0.0
    return _mean_fading_two_outage(T - s, params)


def capacity_n(n: int, params: SystemParams) -> float:
    """High-SNR semi-analytic capacity of n-nearest association, alpha = 4.

    Single integral in x = pi*lam*r2^2 of
    x e^(-x) [ln(2 L rho + s x^2) - 2 ln(x / (pi lam))
              + 2 sqrt(L rho / q) arctan(sqrt(q / (L rho)))],
    q = L rho + s x^2, s = rho L (n-2)/(n-1), divided by ln 2.  The inner
    SNR average uses log2(g) (high SNR), and ranks 3..n enter through
    their mean power only; at n = 2 the integral reproduces the
    closed_alpha4 form exactly.  The mean-power substitution biases the
    value upward at the default densities (the residual power is
    dominated by rare close-in ranks), which validation reports against
    the simulator.
    """
    params.require_alpha4("capacity_n")
    if n < 2 or int(n) != n:
        raise ParameterError(f"association order n must be an integer >= 2, got {n!r}")
    lrho = params.snr_scale * params.num_antennas
    s_hat = params.snr_scale * params.num_antennas * (n - 2) / (n - 1)
    pil = math.pi * params.lam

    def f(x: float) -> float:
        q = lrho + s_hat * x * x
        bracket = (
            math.log(2.0 * lrho + s_hat * x * x)
            - 2.0 * math.log(x / pil)
            + 2.0 * math.sqrt(lrho / q) * math.atan(math.sqrt(q / lrho))
        )
        return x * math.exp(-x) * bracket

    value, _ = integrate(f, 0.0, math.inf, _OUTER)
    return _warn_if_low(value / LN2, "capacity_n")


def capacity_n_exact(n: int, params: SystemParams) -> float:
    """Exact-logarithm counterpart of capacity_n (still the mean-power model).

    Integrates log2(1 + S + g) against the 2-nearest mean-fading density,
    S = residual_mean_power(n); authoritative below the high-SNR floor.
    """
    params.require_alpha4("capacity_n_exact")
    if n < 2 or int(n) != n:
        raise ParameterError(f"association order n must be an integer >= 2, got {n!r}")
    return _capacity_from_two_pdf(params, shift=residual_mean_power(n, params))


# ---------------------------------------------------------------------------
# limiting law for n -> infinity (alpha = 4)
# ---------------------------------------------------------------------------

def _limit_scale(params: SystemParams, lam_exponent: int) -> float:
    if lam_exponent not in (2, 4):
        raise ParameterError(f"lam_exponent must be 2 or 4, got {lam_exponent!r}")
    return (
        params.num_antennas
        * params.snr_scale
        * math.pi**3
        * params.lam**lam_exponent
        / 4.0
    )


def snr_pdf_limit(gamma, params: SystemParams, lam_exponent: int = 2):
    """Limiting mean-fading SNR density for many-RRH association, alpha = 4.

    pi*lam*sqrt(L rho) / (2 g^(3/2)) * exp(-L rho pi^3 lam^k / (4 g)), a
    one-sided stable density of index 1/2.  Only lam_exponent k = 2
    normalizes to 1 (it is the exact scale of the aggregated inverse
    fourth-power distances); k = 4 integrates to 1/lam and is kept for
    cross-checking that convention.
    """
    params.require_alpha4("snr_pdf_limit")
    c2 = _limit_scale(params, lam_exponent)
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise ParameterError("gamma must be positive")
    amp = math.pi * params.lam * math.sqrt(params.num_antennas * params.snr_scale) / 2.0
    out = amp * g ** (-1.5) * np.exp(-c2 / g)
    return out if out.ndim else float(out)


def snr_cdf_limit(gamma, params: SystemParams, lam_exponent: int = 2):
    """Closed-form cdf of snr_pdf_limit: erfc(sqrt(c/g)) up to the k = 4 scale.

    For lam_exponent = 2 this is an exact distribution function; for
    k = 4 it is the same shape scaled by 1/lam, matching the unnormalized
    density.
    """
    params.require_alpha4("snr_cdf_limit")
    c2 = _limit_scale(params, lam_exponent)
    g = np.asarray(gamma, dtype=float)
    scale = 1.0 if lam_exponent == 2 else 1.0 / params.lam
    out = scale * _sci_special.erfc(np.sqrt(c2 / g))
    return out if out.ndim else float(out)


def capacity_upper(
    params: SystemParams,
    mode: str = "closed_form",
    lam_exponent: int = 2,
) -> float:
    """Many-RRH upper bound on the mean-fading ergodic capacity, alpha = 4.

    mode "numeric_integral" integrates log2(1 + g) against snr_pdf_limit.
    mode "closed_form" uses the exact log-moment of the limit law: with
    c = L rho pi^3 lam^k / 4, E[ln g] = ln c - psi(1/2) = ln c + C + 2 ln 2,
    where the 2 ln 2 is the value of capacity_series(); hence
    [C + capacity_series() + ln(L rho pi^3 lam^k / 4)] / ln 2.
    The bound dominates the true (all-ranks random) mean-fading capacity
    at any finite n; note the mean-power model of capacity_n can exceed
    it, since that substitution is itself upward-biased.
    """
    params.require_alpha4("capacity_upper")
    c2 = _limit_scale(params, lam_exponent)
    if mode == "closed_form":
        value = (EULER_GAMMA + capacity_series() + math.log(c2)) / LN2
        return _warn_if_low(value, "capacity_upper(closed_form)")
    if mode != "numeric_integral":
        raise ParameterError(f"unknown capacity_upper mode {mode!r}")

    def f(g: float) -> float:
        return float(snr_pdf_limit(g, params, lam_exponent)) * math.log2(1.0 + g)

    split = 100.0 * c2
    head, _ = integrate(f, 0.0, split, QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12))
    tail, _ = integrate(
        f, split, math.inf, QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12, tail_scale=100.0 * split)
    )
    return head + tail
