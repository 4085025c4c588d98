"""Analytic-vs-simulation cross-check matrix and parameter-reading calibration.

validate_run exercises every formula/simulator pair at one parameter
point and reports the measured gap per check.  Checks with a tolerance
pass or fail; checks marked informational quantify a documented
approximation (for example the mean-fading substitution) and are always
reported, never hidden.

calibrate_reading resolves the baseline-scenario ambiguity between the
printed intensity (1e-4 /m^2) and the printed expected disc count (11.3,
which implies 1e-5 /m^2 at a 600 m radius) by scoring both readings
against the reference operating points and recording which one matches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, montecarlo
from .params import SystemParams, n_nearest, single_nearest
from .specfun import QuadratureSpec, integrate


@dataclass(frozen=True)
class ValidationCheck:
    """One comparison: value vs reference, |gap| <= tol to pass.

    tol None marks an informational check (gap reported, no verdict).
    """

    name: str
    value: float
    reference: float
    tol: float | None

    @property
    def gap(self) -> float:
        return self.value - self.reference

    @property
    def passed(self) -> bool | None:
        if self.tol is None:
            return None
        return abs(self.gap) <= self.tol

    def format_line(self) -> str:
        verdict = "INFO" if self.tol is None else ("PASS" if self.passed else "FAIL")
        tol = "" if self.tol is None else f" tol={self.tol:.3g}"
        return (
            f"[{verdict}] {self.name}: value={self.value:.6g} "
            f"ref={self.reference:.6g} gap={self.gap:+.3g}{tol}"
        )


@dataclass(frozen=True)
class ValidationReport:
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def format_table(self) -> str:
        lines = [c.format_line() for c in self.checks]
        n_fail = sum(1 for c in self.checks if c.passed is False)
        lines.append(f"{'ALL PASS' if self.all_pass else f'{n_fail} FAILURES'} "
                     f"({len(self.checks)} checks)")
        return "\n".join(lines)


def _outage_thresholds(params: SystemParams) -> list[float]:
    """A 5-point grid spanning the outage curve of nearest association."""
    scale = params.snr_scale * params.num_antennas * (math.pi * params.lam) ** 2
    return [scale * 10.0**k for k in (-2, -1, 0, 1, 2)]


def validate_run(params: SystemParams, trials: int, seed: int) -> ValidationReport:
    """Run the full analytic-vs-Monte-Carlo cross-check matrix."""
    checks: list[ValidationCheck] = []
    mc = montecarlo

    def cfg(strategy, fading="exact", sampling="disc", thresholds=()):
        return mc.TrialConfig(
            n_trials=trials,
            seed=seed,
            strategy=strategy,
            fading_mode=fading,
            sampling=sampling,
            threshold_grid=tuple(thresholds),
        )

    grid = _outage_thresholds(params)

    # nearest association: outage, exact fading
    for T, est in mc.estimate_outage_grid(cfg(single_nearest(), thresholds=grid), params):
        ana = analytic.outage_single(T, params)
        checks.append(
            ValidationCheck(
                name=f"outage nearest vs simulator @T={T:.3g}",
                value=est.mean,
                reference=ana,
                tol=3.0 * max(est.std_error, 1e-12),
            )
        )

    # nearest association: capacity closed/numeric/simulated
    c1_closed = analytic.capacity_single_closed(params)
    c1_numeric = analytic.capacity_single_numeric(params)
    c1_mc = mc.estimate_capacity(cfg(single_nearest()), params)
    checks.append(
        ValidationCheck("capacity nearest closed vs numeric", c1_closed, c1_numeric, 0.05)
    )
    checks.append(
        ValidationCheck("capacity nearest numeric vs simulator", c1_numeric, c1_mc.mean, 0.1)
    )

    # 2-nearest association: outage, both modes
    two_grid = grid[1:4]
    for T, est in mc.estimate_outage_grid(cfg(n_nearest(2), thresholds=two_grid), params):
        exact = analytic.outage_two(T, params, mode="exact_double")
        checks.append(
            ValidationCheck(
                name=f"outage 2-nearest exact-double vs simulator @T={T:.3g}",
                value=exact,
                reference=est.mean,
                tol=3.0 * max(est.std_error, 1e-12),
            )
        )
        approx = analytic.outage_two(T, params, mode="mean_fading_single")
        checks.append(
            ValidationCheck(
                name=f"outage 2-nearest mean-fading gap @T={T:.3g}",
                value=approx,
                reference=est.mean,
                tol=None,
            )
        )

    # 2-nearest: density normalization and cdf-derivative consistency
    norm = _two_pdf_normalization(params)
    checks.append(ValidationCheck("2-nearest SNR density normalization", norm, 1.0, 1e-4))
    checks.append(
        ValidationCheck(
            "2-nearest density vs outage derivative (max rel gap)",
            _two_pdf_derivative_gap(params),
            0.0,
            1e-3,
        )
    )

    # 2-nearest: capacity closed/numeric/simulated
    c2_closed = analytic.capacity_two(params, mode="closed_alpha4")
    c2_numeric = analytic.capacity_two(params, mode="numeric_integral")
    c2_mc_mean = mc.estimate_capacity(cfg(n_nearest(2), fading="mean"), params)
    c2_mc_exact = mc.estimate_capacity(cfg(n_nearest(2)), params)
    checks.append(
        ValidationCheck("capacity 2-nearest closed vs numeric", c2_closed, c2_numeric, 0.05)
    )
    checks.append(
        ValidationCheck(
            "capacity 2-nearest numeric vs simulator (mean fading)",
            c2_numeric,
            c2_mc_mean.mean,
            tol=max(0.02, 4.0 * c2_mc_mean.std_error),
        )
    )
    checks.append(
        ValidationCheck(
            "capacity 2-nearest mean-fading model vs exact-fading simulator (gap)",
            c2_numeric,
            c2_mc_exact.mean,
            tol=None,
        )
    )

    # n-nearest (alpha = 4 approximation chain)
    t_mid = grid[2]
    checks.append(
        ValidationCheck(
            "outage n=2 reduces to 2-nearest mean-fading",
            analytic.outage_n(t_mid, 2, params),
            analytic.outage_two(t_mid, params, mode="mean_fading_single"),
            1e-14,
        )
    )
    est4 = mc.estimate_outage(cfg(n_nearest(4)), 4.0 * t_mid, params)
    checks.append(
        ValidationCheck(
            "outage n=4 mean-power model vs exact-fading simulator (gap)",
            analytic.outage_n(4.0 * t_mid, 4, params),
            est4.mean,
            tol=None,
        )
    )
    checks.append(
        ValidationCheck(
            "capacity_n(2) vs closed 2-nearest",
            analytic.capacity_n(2, params),
            c2_closed,
            0.05,
        )
    )
    c4_mc_full = mc.estimate_capacity(cfg(n_nearest(4), fading="mean", sampling="plane"), params)
    checks.append(
        ValidationCheck(
            "capacity_n(4) mean-power model vs all-ranks simulator (bias)",
            analytic.capacity_n(4, params),
            c4_mc_full.mean,
            tol=None,
        )
    )

    # limiting law
    checks.append(
        ValidationCheck(
            "limit density normalization (lam^2 exponent)",
            _limit_pdf_normalization(params, lam_exponent=2),
            1.0,
            1e-6,
        )
    )
    checks.append(
        ValidationCheck(
            "limit density with lam^4 exponent integrates to 1/lam (rel)",
            _limit_pdf_normalization(params, lam_exponent=4) * params.lam,
            1.0,
            1e-4,
        )
    )
    cu_closed = analytic.capacity_upper(params, mode="closed_form")
    cu_numeric = analytic.capacity_upper(params, mode="numeric_integral")
    checks.append(
        ValidationCheck("capacity upper bound closed vs numeric", cu_closed, cu_numeric, 0.1)
    )
    c8_mc_full = mc.estimate_capacity(cfg(n_nearest(8), fading="mean", sampling="plane"), params)
    checks.append(
        ValidationCheck(
            "upper bound minus 8-nearest simulator capacity (must be >= 0)",
            max(0.0, c8_mc_full.mean - cu_closed),
            0.0,
            1e-9,
        )
    )
    checks.append(
        ValidationCheck(
            "KS distance, limit law vs 64-nearest simulator",
            _limit_ks_distance(params, trials=min(trials, 100_000), seed=seed),
            0.0,
            0.02,
        )
    )
    return ValidationReport(checks=checks)


def _two_pdf_normalization(params: SystemParams) -> float:
    med = 2.0 * params.snr_scale * params.num_antennas * (math.pi * params.lam) ** 2
    split = 100.0 * med
    head, _ = integrate(
        lambda g: analytic.snr_pdf_two(g, params), 0.0, split,
        QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10),
    )
    tail, _ = integrate(
        lambda g: analytic.snr_pdf_two(g, params), split, math.inf,
        QuadratureSpec(rel_tol=1e-7, abs_tol=1e-10, tail_scale=1e3 * split),
    )
    return head + tail


def _two_pdf_derivative_gap(params: SystemParams) -> float:
    """Max relative gap between snr_pdf_two and the outage finite difference."""
    scale = params.snr_scale * params.num_antennas * (math.pi * params.lam) ** 2
    worst = 0.0
    for g in (0.5 * scale, 2.0 * scale, 10.0 * scale):
        h = 1e-4 * g
        hi = analytic.outage_two(g + h, params, mode="mean_fading_single")
        lo = analytic.outage_two(g - h, params, mode="mean_fading_single")
        diff = (hi - lo) / (2.0 * h)
        pdf = analytic.snr_pdf_two(g, params)
        worst = max(worst, abs(diff - pdf) / pdf)
    return worst


def _limit_pdf_normalization(params: SystemParams, lam_exponent: int) -> float:
    c2 = (
        params.num_antennas * params.snr_scale * math.pi**3
        * params.lam**lam_exponent / 4.0
    )
    f = lambda g: float(analytic.snr_pdf_limit(g, params, lam_exponent))
    head, _ = integrate(f, 0.0, c2, QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13))
    tail, _ = integrate(
        f, c2, math.inf, QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, tail_scale=100.0 * c2)
    )
    return head + tail


def _limit_ks_distance(params: SystemParams, trials: int, seed: int) -> float:
    """KS distance between 64-nearest mean-fading SNR draws and the limit cdf."""
    config = montecarlo.TrialConfig(
        n_trials=trials,
        seed=seed,
        strategy=n_nearest(64),
        fading_mode="mean",
        sampling="plane",
    )
    sim = montecarlo.simulate_snr(config, params)
    x = np.sort(sim.snr)
    cdf = analytic.snr_cdf_limit(x, params, lam_exponent=2)
    n = x.size
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


# ---------------------------------------------------------------------------
# parameter-reading calibration
# ---------------------------------------------------------------------------

REFERENCE_POINTS = {
    "gain nearest to 2-nearest at L=4 (bps/Hz)": 0.58,
    "gain 4-nearest to upper bound at L=4 (bps/Hz)": 0.28,
    "capacity at L=8, 2-nearest (bps/Hz)": 9.21,
    "capacity at L=2, 8-nearest (bps/Hz)": 8.06,
}


@dataclass(frozen=True)
class ReadingEvaluation:
    lam: float
    mean_disc_count: float
    measured: dict
    total_abs_error: float


@dataclass(frozen=True)
class CalibrationResult:
    readings: list[ReadingEvaluation]
    chosen: ReadingEvaluation

    def format_table(self) -> str:
        lines = []
        for r in self.readings:
            mark = " <- selected" if r is self.chosen else ""
            lines.append(
                f"reading lam={r.lam:g} (disc mean {r.mean_disc_count:.1f}): "
                f"total |error| = {r.total_abs_error:.3f}{mark}"
            )
            for name, target in REFERENCE_POINTS.items():
                lines.append(f"    {name}: measured {r.measured[name]:.3f} target {target}")
        return "\n".join(lines)


def _evaluate_reading(params: SystemParams, trials: int, seed: int) -> ReadingEvaluation:
    """Score one intensity reading against the reference operating points.

    Capacities follow the published methodology: high-SNR closed forms
    for the nearest/2-nearest curves and mean-fading simulation (all
    ranks kept) for n-nearest points; the many-RRH curve is the closed
    upper bound.
    """
    def mean_cap(n: int, L: int) -> float:
        config = montecarlo.TrialConfig(
            n_trials=trials,
            seed=seed,
            strategy=n_nearest(n),
            fading_mode="mean",
            sampling="plane",
        )
        return montecarlo.estimate_capacity(config, params.replace(num_antennas=L)).mean

    p4 = params.replace(num_antennas=4)
    measured = {
        "gain nearest to 2-nearest at L=4 (bps/Hz)": (
            analytic.capacity_two(p4, mode="closed_alpha4")
            - analytic.capacity_single_closed(p4)
        ),
        "gain 4-nearest to upper bound at L=4 (bps/Hz)": (
            analytic.capacity_upper(p4, mode="closed_form") - mean_cap(4, 4)
        ),
        "capacity at L=8, 2-nearest (bps/Hz)": mean_cap(2, 8),
        "capacity at L=2, 8-nearest (bps/Hz)": mean_cap(8, 2),
    }
    total = sum(abs(measured[k] - v) for k, v in REFERENCE_POINTS.items())
    return ReadingEvaluation(
        lam=params.lam,
        mean_disc_count=params.mean_rrh_count,
        measured=measured,
        total_abs_error=total,
    )


def calibrate_reading(
    base_params: SystemParams,
    trials: int = 400_000,
    seed: int = 2024,
) -> CalibrationResult:
    """Pick the intensity reading that best reproduces the reference points.

    Tests the intensity as printed (1e-4 /m^2) against the value implied
    by the printed expected disc count (1e-5 /m^2); everything else in
    base_params is kept.  The selection, and the per-point errors of both
    readings, are recorded in the result.
    """
    readings = [
        _evaluate_reading(base_params.replace(lam=lam), trials, seed)
        for lam in (1e-4, 1e-5)
    ]
    chosen = min(readings, key=lambda r: r.total_abs_error)
    return CalibrationResult(readings=readings, chosen=chosen)
