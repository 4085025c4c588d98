"""Planar Poisson deployment sampling and ordered-distance laws.

The user sits at the origin; RRH locations form a homogeneous Poisson
process of intensity lam.  Mapping r -> pi*lam*r^2 turns the ordered
distances into arrival times of a unit-rate one-dimensional Poisson
process, which gives every distribution law in this module and a fast
sampler for the first few distances on the infinite plane.
"""
from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np
from scipy import special as _sci_special

from .params import ParameterError, SystemParams


@dataclass(frozen=True)
class Deployment:
    """One realization of RRH distances from the origin, sorted ascending."""

    distances: np.ndarray
    n_rrh: int

    def __post_init__(self) -> None:
        d = np.asarray(self.distances, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)
        if d.ndim != 1 or d.size != self.n_rrh:
            raise ParameterError("n_rrh must match the number of distances")
        if d.size and (np.any(d <= 0) or np.any(np.diff(d) < 0)):
            raise ParameterError("distances must be positive and sorted ascending")


def sample_deployment(params: SystemParams, rng: np.random.Generator) -> Deployment:
    """Draw one Poisson deployment on the disc of radius disc_radius_m.

    The RRH count is Poisson(pi*R^2*lam) and positions are i.i.d. uniform
    on the disc, so squared distances are uniform on (0, R^2).  An empty
    deployment is valid.
    """
    n = int(rng.poisson(params.mean_rrh_count))
    # squared radii are uniform on (0, R^2]; 1 - U keeps them strictly positive
    r_sq = params.disc_radius_m**2 * (1.0 - rng.random(n))
    return Deployment(distances=np.sqrt(np.sort(r_sq)), n_rrh=n)


def sample_nearest_distances(
    params: SystemParams,
    n: int,
    rng: np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """Sample the n smallest RRH distances on the infinite plane.

    Uses the one-dimensional mapping: pi*lam*r_i^2 is the i-th arrival of
    a unit-rate Poisson stream, i.e. a cumulative sum of Exp(1) gaps.
    Returns shape (n,) or (size, n).  Faster than disc sampling when only
    the leading distances matter, and free of disc truncation.
    """
    if n < 1:
        raise ParameterError(f"need n >= 1 distances, got {n!r}")
    shape = (n,) if size is None else (size, n)
    arrivals = np.cumsum(rng.exponential(size=shape), axis=-1)
    return np.sqrt(arrivals / (math.pi * params.lam))


def nearest_distance_pdf(r, lam: float):
    """Density of the distance to the closest RRH: 2*pi*lam*r*exp(-pi*lam*r^2)."""
    r = np.asarray(r, dtype=float)
    out = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r * r)
    return out if out.ndim else float(out)


def joint_two_nearest_pdf(r1, r2, lam: float):
    """Joint density of the two closest distances on 0 < r1 <= r2.

    Equals 4*pi^2*lam^2*r1*r2*exp(-pi*lam*r2^2) on the ordered wedge and
    0 elsewhere; marginalizing out r2 recovers nearest_distance_pdf.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    val = 4.0 * math.pi**2 * lam**2 * r1 * r2 * np.exp(-math.pi * lam * r2 * r2)
    out = np.where(r1 <= r2, val, 0.0)
    return out if out.ndim else float(out)


def mean_inverse_pow_distance(i: int, params: SystemParams) -> float:
    """Expected r_i^(-alpha) over the i-th nearest distance, units m^-alpha.

    Equals (pi*lam)^(alpha/2) * Gamma(i - alpha/2) / Gamma(i) and is
    finite only for ranks i > alpha/2; closer ranks put too much mass
    near the origin and the moment diverges.
    """
    alpha = params.path_loss_exp
    if i < 1 or int(i) != i:
        raise ParameterError(f"rank i must be a positive integer, got {i!r}")
    if i <= alpha / 2.0:
        raise ParameterError(
            f"divergent moment: E[r_{i}^(-{alpha:g})] requires rank i > alpha/2 = {alpha / 2:g}"
        )
    log_ratio = _sci_special.gammaln(i - alpha / 2.0) - _sci_special.gammaln(i)
    return float((math.pi * params.lam) ** (alpha / 2.0) * math.exp(log_ratio))


def residual_mean_power(n: int, params: SystemParams) -> float:
    """Mean SNR contributed by RRHs of rank 3..n at alpha = 4 (dimensionless).

    rho * L * sum_i E[r_i^(-4)] telescopes to rho*L*(pi*lam)^2*(n-2)/(n-1);
    the n = 2 case is the empty sum.  Increasing in n with supremum
    rho*L*(pi*lam)^2.
    """
    params.require_alpha4("residual_mean_power")
    if n < 2 or int(n) != n:
        raise ParameterError(f"association order n must be an integer >= 2, got {n!r}")
    rho = params.snr_scale
    lead = rho * params.num_antennas * (math.pi * params.lam) ** 2
    return lead * (n - 2) / (n - 1)
