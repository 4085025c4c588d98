"""Stochastic-geometry analysis of RRH association in C-RAN uplinks.

Analytic outage and ergodic-capacity expressions for single-nearest and
n-nearest association under a planar Poisson deployment, cross-validated
by a first-principles Monte Carlo simulator.
"""

__version__ = "0.1.0"

from .params import (
    AssociationStrategy,
    EstimateWithCI,
    ParameterError,
    SnrSample,
    SystemParams,
    build_params,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    n_best,
    n_nearest,
    single_nearest,
    watts_to_dbm,
)
from .specfun import (
    EULER_GAMMA,
    IntegralResult,
    QuadratureError,
    QuadratureSpec,
    capacity_series,
    euler_gamma,
    harmonic_number,
    integrate,
    lower_incomplete_gamma,
)
from .geometry import (
    Deployment,
    joint_two_nearest_pdf,
    mean_inverse_pow_distance,
    nearest_distance_pdf,
    residual_mean_power,
    sample_deployment,
    sample_nearest_distances,
)
from .analytic import (
    LowSnrWarning,
    capacity_n,
    capacity_n_exact,
    capacity_single_closed,
    capacity_single_numeric,
    capacity_two,
    capacity_upper,
    outage_n,
    outage_single,
    outage_two,
    snr_cdf_limit,
    snr_pdf_limit,
    snr_pdf_two,
)
from .montecarlo import (
    FadingDraw,
    SimulationResult,
    TrialConfig,
    compare_strategies,
    draw_fading,
    estimate_capacity,
    estimate_outage,
    estimate_outage_grid,
    simulate_snr,
    simulate_strategy_snrs,
    snr_sample,
)
from .validation import (
    CalibrationResult,
    ValidationCheck,
    ValidationReport,
    calibrate_reading,
    validate_run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
