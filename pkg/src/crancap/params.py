"""Scenario parameters, unit conversions, and shared result types.

All quantities are stored in SI linear units (meters, watts, Hz); dB and
dBm appear only at the construction boundary.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

Z95 = 1.959963984540054  # two-sided 95% normal quantile


class ParameterError(ValueError):
    """Raised when a scenario parameter violates its domain."""


def db_to_linear(x_db: float) -> float:
    """Convert a dB ratio to linear scale."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear ratio to dB."""
    if x <= 0:
        raise ParameterError(f"linear_to_db requires a positive input, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_watts(x_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    """Convert a positive power in watts to dBm."""
    if p_w <= 0:
        raise ParameterError(f"watts_to_dbm requires a positive power, got {p_w!r}")
    return 10.0 * math.log10(p_w) + 30.0


@dataclass(frozen=True)
class SystemParams:
    """Physical scenario shared by the analytic formulas and the simulator.

    Attributes
    ----------
    lam : float
        RRH intensity of the planar Poisson process, points per m^2.
    num_antennas : int
        Antennas per RRH (L); the combined fading gain is Gamma(L, 1).
    path_loss_exp : float
        Path-loss exponent (alpha); must exceed 2 or the inverse-distance
        moments of the point process diverge.
    tx_power_w : float
        User transmit power in watts.
    noise_psd_w_hz : float
        Noise power spectral density in W/Hz.
    bandwidth_hz : float
        Signal bandwidth in Hz.
    disc_radius_m : float
        Radius of the deployment disc used by the simulator, meters.
    """

    lam: float
    num_antennas: int
    path_loss_exp: float
    tx_power_w: float
    noise_psd_w_hz: float
    bandwidth_hz: float
    disc_radius_m: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam!r}")
        if not (isinstance(self.num_antennas, (int, np.integer)) and self.num_antennas >= 1):
            raise ParameterError(f"num_antennas must be an integer >= 1, got {self.num_antennas!r}")
        if not self.path_loss_exp > 2:
            raise ParameterError(
                f"path_loss_exp must exceed 2, got {self.path_loss_exp!r}: "
                "the moment Gamma(i - alpha/2) of the ordered-distance law diverges "
                "for every rank i when alpha <= 2"
            )
        if not self.tx_power_w > 0:
            raise ParameterError(f"tx_power_w must be positive, got {self.tx_power_w!r}")
        if not self.noise_psd_w_hz > 0:
            raise ParameterError(f"noise_psd_w_hz must be positive, got {self.noise_psd_w_hz!r}")
        if not self.bandwidth_hz > 0:
            raise ParameterError(f"bandwidth_hz must be positive, got {self.bandwidth_hz!r}")
        if not self.disc_radius_m > 0:
            raise ParameterError(f"disc_radius_m must be positive, got {self.disc_radius_m!r}")

    @property
    def noise_power_w(self) -> float:
        """Total thermal noise power over the bandwidth, watts."""
        return self.noise_psd_w_hz * self.bandwidth_hz

    @property
    def snr_scale(self) -> float:
        """Transmit power over noise power (rho), dimensionless."""
        return self.tx_power_w / self.noise_power_w

    @property
    def mean_rrh_count(self) -> float:
        """Expected number of RRHs on the disc, pi * R^2 * lam.

        Always derived from (lam, disc_radius_m); never configured directly.
        """
        return math.pi * self.disc_radius_m**2 * self.lam

    def require_alpha4(self, operation: str) -> None:
        """Reject path-loss exponents other than 4 for alpha-specific closed forms."""
        if self.path_loss_exp != 4.0:
            raise ParameterError(
                f"{operation} is only available for path_loss_exp == 4, "
                f"got {self.path_loss_exp!r}"
            )

    def replace(self, **changes) -> "SystemParams":
        """Return a copy with the given fields replaced (re-validated)."""
        return dataclasses.replace(self, **changes)


def build_params(
    *,
    lam: float = 1e-4,
    num_antennas: int = 4,
    path_loss_exp: float = 4.0,
    tx_power_w: float | None = None,
    tx_power_dbm: float | None = None,
    noise_psd_w_hz: float | None = None,
    noise_psd_dbm_hz: float | None = None,
    bandwidth_hz: float = 100e6,
    disc_radius_m: float = 600.0,
) -> SystemParams:
    """Validate raw inputs and return a SystemParams.

    Power and noise density accept either linear (watts, W/Hz) or dB form
    (dBm, dBm/Hz), but not both at once.  Defaults reproduce the baseline
    scenario: lam = 1e-4 /m^2, L = 4, alpha = 4, P = 10 mW, -174 dBm/Hz
    noise density, 100 MHz bandwidth, 600 m disc.
    """
    if tx_power_w is not None and tx_power_dbm is not None:
        raise ParameterError("give tx_power_w or tx_power_dbm, not both")
    if noise_psd_w_hz is not None and noise_psd_dbm_hz is not None:
        raise ParameterError("give noise_psd_w_hz or noise_psd_dbm_hz, not both")
    if tx_power_w is None:
        tx_power_w = dbm_to_watts(10.0 if tx_power_dbm is None else tx_power_dbm)
    if noise_psd_w_hz is None:
        noise_psd_w_hz = dbm_to_watts(-174.0 if noise_psd_dbm_hz is None else noise_psd_dbm_hz)
    return SystemParams(
        lam=lam,
        num_antennas=int(num_antennas),
        path_loss_exp=float(path_loss_exp),
        tx_power_w=float(tx_power_w),
        noise_psd_w_hz=float(noise_psd_w_hz),
        bandwidth_hz=float(bandwidth_hz),
        disc_radius_m=float(disc_radius_m),
    )


@dataclass(frozen=True)
class AssociationStrategy:
    """Which RRHs serve the user.

    kind is one of "single_nearest", "n_nearest" (the n closest RRHs) or
    "n_best" (the n RRHs with the largest instantaneous received power,
    fading included).  "n_nearest" with n = 1 is statistically identical to
    "single_nearest".
    """

    kind: str
    n: int = 1

    _KINDS = ("single_nearest", "n_nearest", "n_best")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ParameterError(f"unknown association kind {self.kind!r}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ParameterError(f"association size n must be an integer >= 1, got {self.n!r}")
        if self.kind == "single_nearest" and self.n != 1:
            raise ParameterError("single_nearest has n == 1 by definition")

    @property
    def label(self) -> str:
        if self.kind == "single_nearest":
            return "nearest"
        return f"{self.n}-{'nearest' if self.kind == 'n_nearest' else 'best'}"


def single_nearest() -> AssociationStrategy:
    """Serve the user from the closest RRH only."""
    return AssociationStrategy("single_nearest", 1)


def n_nearest(n: int) -> AssociationStrategy:
    """Serve the user jointly from the n closest RRHs."""
    return AssociationStrategy("n_nearest", n)


def n_best(n: int) -> AssociationStrategy:
    """Serve the user from the n RRHs with the largest instantaneous power.

    Requires instantaneous CSI for every RRH, so it is simulation-only;
    n_best(1) is the fading-aware variant of the nearest-RRH rule.
    """
    return AssociationStrategy("n_best", n)


@dataclass(frozen=True)
class SnrSample:
    """A single received-SNR realization (dimensionless, >= 0)."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma >= 0:
            raise ParameterError(f"SNR must be non-negative, got {self.gamma!r}")


@dataclass(frozen=True)
class EstimateWithCI:
    """A Monte Carlo estimate with a 95% normal-approximation interval."""

    mean: float
    std_error: float
    n_trials: int
    ci_low: float
    ci_high: float

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ParameterError("std_error must be non-negative")
        if not (self.ci_low <= self.mean <= self.ci_high):
            raise ParameterError("confidence interval must contain the mean")

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "EstimateWithCI":
        """Mean and standard error of i.i.d. samples."""
        x = np.asarray(samples, dtype=float)
        n = x.size
        m = float(np.mean(x))
        se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean=m, std_error=se, n_trials=n, ci_low=m - Z95 * se, ci_high=m + Z95 * se)

    @classmethod
    def from_binomial(cls, successes: int, n_trials: int) -> "EstimateWithCI":
        """Proportion estimate with the binomial standard error."""
        p = successes / n_trials
        se = math.sqrt(p * (1.0 - p) / n_trials)
        return cls(
            mean=p,
            std_error=se,
            n_trials=n_trials,
            ci_low=max(0.0, p - Z95 * se),
            ci_high=min(1.0, p + Z95 * se),
        )

    def contains(self, value: float) -> bool:
        """Whether the 95% interval covers the given value."""
        return self.ci_low <= value <= self.ci_high
