"""Binary detection with signal-dependent Gaussian noise.

ML threshold for two Gaussians of unequal variance, the resulting bit error
probability, the closed-form optimal intensity and a Brownian-mobility
baseline that ignores the propulsion term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import (ChannelStatistics, LinkConfig, ValidityReport, channel_stats,
                      mobility_for, validity_report)
from .mobility import g_of_T
from .physics import DerivedCoefficients, ParameterError, check_intensity

EQUAL_VARIANCE_RTOL = 1e-9
BEP_FLOOR = 1e-300

PROPOSED = "proposed"
BASELINE = "baseline"


class UnboundedOptimumError(ValueError):
    """SNR grows monotonically in I, so no finite optimal intensity exists."""


class ThresholdOutOfRangeWarning(UserWarning):
    pass


def q_function(x):
    """Standard normal tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    if np.ndim(x):
        return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class DetectorSpec:
    mu0: float
    sigma0: float
    mu1: float
    sigma1: float
    gamma: float

    def __post_init__(self):
        if not self.mu1 > self.mu0:
            raise ParameterError("mu1", "must exceed mu0")
        if not self.sigma0 > 0:
            raise ParameterError("sigma0", "must be > 0")
        if self.sigma1 < self.sigma0 * (1 - EQUAL_VARIANCE_RTOL):
            raise ParameterError("sigma1", "must be >= sigma0")

    @classmethod
    def ml(cls, mu0: float, sigma0: float, mu1: float, sigma1: float) -> "DetectorSpec":
        return cls(mu0, sigma0, mu1, sigma1, ml_threshold(mu0, sigma0, mu1, sigma1))


def log_likelihood_ratio(y, mu0, sigma0, mu1, sigma1):
    """``ln p1(y) - ln p0(y)``; positive values favour bit 1."""
    return (-math.log(sigma1 / sigma0)
            + (y - mu0) ** 2 / (2 * sigma0**2)
            - (y - mu1) ** 2 / (2 * sigma1**2))


def ml_threshold(mu0: float, sigma0: float, mu1: float, sigma1: float) -> float:
    """Upper root of the log-likelihood-ratio quadratic.

    For ``sigma1 > sigma0`` the likelihood ratio crosses one twice; the lower
    crossing sits below ``mu0`` where there is hardly any probability mass, so
    the rule keeps the root between the means. Equal variances fall back to the
    midpoint.
    """
    if not (sigma0 > 0 and sigma1 > 0):
        raise ParameterError("sigma", "standard deviations must be > 0")
    if not mu1 > mu0:
        raise ParameterError("mu1", f"must exceed mu0 (got mu0={mu0!r}, mu1={mu1!r})")
    if abs(sigma1 - sigma0) < EQUAL_VARIANCE_RTOL * sigma0:
        return 0.5 * (mu0 + mu1)

    s0, s1 = sigma0 * sigma0, sigma1 * sigma1
    log_ratio = math.log(sigma1 / sigma0)
    # (s1 - s0) y^2 - 2 B y + C = 0
    A = s1 - s0
    B = mu0 * s1 - mu1 * s0
    C = mu0 * mu0 * s1 - mu1 * mu1 * s0 - 2 * s0 * s1 * log_ratio
    root_disc = sigma0 * sigma1 * math.sqrt((mu1 - mu0) ** 2 + 2 * A * log_ratio)
    # (B + root_disc) / A == C / (B - root_disc); pick the form without cancellation
    gamma = (B + root_disc) / A if B >= 0 else C / (B - root_disc)

    # one Newton step polishes the residual
    llr = log_likelihood_ratio(gamma, mu0, sigma0, mu1, sigma1)
    slope = (gamma - mu0) / s0 - (gamma - mu1) / s1
    if slope != 0 and math.isfinite(llr):
        gamma -= llr / slope

    if not mu0 <= gamma <= mu1:
        warnings.warn(f"ML threshold {gamma:.6g} lies outside [{mu0:.6g}, {mu1:.6g}]; "
                      "parameters are outside the single-threshold regime",
                      ThresholdOutOfRangeWarning, stacklevel=2)
    return gamma


def bep(spec: DetectorSpec) -> float:
    """Average bit error probability of the threshold rule for equiprobable bits."""
    return 0.5 * q_function((spec.gamma - spec.mu0) / spec.sigma0) \
        + 0.5 * q_function((spec.mu1 - spec.gamma) / spec.sigma1)


def optimal_intensity(coef: DerivedCoefficients, link: LinkConfig) -> float:
    """Intensity that maximises the OOK SNR, ``(sigma_m^2 d^4 / (H0^2 K^2 g(T)))^(1/4)``."""
    g = g_of_T(coef.D_r, link.T)
    if coef.K_control == 0 or g <= 0:
        raise UnboundedOptimumError("K_control = 0: no active noise, SNR increases without bound")
    return (link.sigma_m**2 * link.d**4 / (coef.H0**2 * coef.K_control**2 * g)) ** 0.25


def baseline_stats(coef: DerivedCoefficients, link: LinkConfig, I: float) -> ChannelStatistics:
    """Channel statistics with the transmitter treated as a passive Brownian particle."""
    I = check_intensity(I)
    mu = coef.H0 / link.d * I
    alpha_b = coef.H0 / link.d**2 * I
    sigma_x_sq = 2.0 * coef.D_t * link.T
    return ChannelStatistics(mu=mu, sigma_x_sq=sigma_x_sq,
                             sigma_Y_sq=link.sigma_m**2 + alpha_b**2 * sigma_x_sq, alpha_b=alpha_b)


def symbol_stats(coef: DerivedCoefficients, link: LinkConfig, I: float,
                 model: str = PROPOSED) -> ChannelStatistics:
    if model == PROPOSED:
        return channel_stats(coef, link, mobility_for(coef, link.T, I), I)
    if model == BASELINE:
        return baseline_stats(coef, link, I)
    raise ParameterError("model", f"unknown mobility model {model!r}")


@dataclass(frozen=True)
class LinkPerformance:
    model: str
    intensity: float
    snr: float  # proxy mu1^2 / sigma1^2
    gamma: float
    bep: float
    validity: ValidityReport
    off: ChannelStatistics
    on: ChannelStatistics

    @property
    def detector(self) -> DetectorSpec:
        return DetectorSpec(self.off.mu, math.sqrt(self.off.sigma_Y_sq),
                            self.on.mu, math.sqrt(self.on.sigma_Y_sq), self.gamma)


def ook_link_performance(coef: DerivedCoefficients, link: LinkConfig, I: float,
                         model: str = PROPOSED) -> LinkPerformance:
    """On-off keying with ``I0 = 0`` and ``I1 = I`` under the chosen mobility model."""
    I = check_intensity(I)
    if I <= 0:
        raise ParameterError("I", "OOK needs I > 0")
    off = symbol_stats(coef, link, 0.0, model)
    on = symbol_stats(coef, link, I, model)
    sigma0, sigma1 = math.sqrt(off.sigma_Y_sq), math.sqrt(on.sigma_Y_sq)
    spec = DetectorSpec.ml(off.mu, sigma0, on.mu, sigma1)
    return LinkPerformance(model=model, intensity=I, snr=on.mu**2 / on.sigma_Y_sq,
                           gamma=spec.gamma, bep=bep(spec),
                           validity=validity_report(coef, link, I), off=off, on=on)


def estimation_gap(coef: DerivedCoefficients, link: LinkConfig, I: float) -> tuple[float, bool]:
    """``log10(BEP_proposed / BEP_baseline)`` and whether either BEP hit the 1e-300 floor."""
    p = ook_link_performance(coef, link, I, PROPOSED).bep
    b = ook_link_performance(coef, link, I, BASELINE).bep
    clamped = p < BEP_FLOOR or b < BEP_FLOOR
    return math.log10(max(p, BEP_FLOOR)) - math.log10(max(b, BEP_FLOOR)), clamped


def snr_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf

