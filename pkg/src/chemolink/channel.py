"""Received-signal statistics of the quasi-steady molecular link.

The receiver sits at ``x = d`` and samples ``Y = H0 I / (d - x) + Z`` at the end
of the symbol. Linearizing in ``x/d`` gives a Gaussian observation whose
variance carries a measurement, a passive-diffusion and an active-propulsion
term (the last one quartic in intensity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mobility import MobilityParams, g_of_T, position_variance
from .physics import DerivedCoefficients, ParameterError, check_intensity

SIGMA_X_OVER_D_MAX = 0.1
PECLET_MAX = 0.1
QUASI_STEADY_MIN = 1.0


class WallContactError(ValueError):
    """The transmitter reached the receiver plane; the wall should have prevented it."""


@dataclass(frozen=True)
class LinkConfig:
    d: float  # link distance, m
    T: float  # symbol duration, s
    sigma_m: float  # measurement noise std, observation units
    I0: float = 0.0
    I1: float = 50.0

    def __post_init__(self):
        for name in ("d", "T", "sigma_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(name, f"must be finite and > 0, got {value!r}")
        check_intensity(self.I0, "I0")
        check_intensity(self.I1, "I1")
        if not self.I1 > self.I0:
            raise ParameterError("I1", f"must exceed I0 ({self.I1!r} <= {self.I0!r})")

    def with_(self, **changes) -> "LinkConfig":
        values = dict(d=self.d, T=self.T, sigma_m=self.sigma_m, I0=self.I0, I1=self.I1)
        values.update(changes)
        return LinkConfig(**values)


@dataclass(frozen=True)
class ChannelStatistics:
    mu: float
    sigma_x_sq: float
    sigma_Y_sq: float
    alpha_b: float


@dataclass(frozen=True)
class ValidityReport:
    ratio_sigma_x_over_d: float
    peclet: float
    quasi_steady_margin: float
    sigma_x_ok: bool
    peclet_ok: bool
    quasi_steady_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.sigma_x_ok and self.peclet_ok and self.quasi_steady_ok

    def flags(self) -> str:
        """Compact flag string for CSV rows, e.g. ``sx:1 pe:1 qs:0``."""
        return f"sx:{int(self.sigma_x_ok)} pe:{int(self.peclet_ok)} qs:{int(self.quasi_steady_ok)}"


def mobility_for(coef: DerivedCoefficients, T: float, I: float) -> MobilityParams:
    return MobilityParams(D_t=coef.D_t, D_r=coef.D_r, U=abs(coef.K_control) * check_intensity(I), T=T)


def channel_stats(coef: DerivedCoefficients, link: LinkConfig, mob: MobilityParams,
                  I: float) -> ChannelStatistics:
    I = check_intensity(I)
    U = abs(coef.K_control) * I
    if abs(mob.U - U) > 1e-12 * max(U, mob.U):
        raise ParameterError("U", f"mobility speed {mob.U!r} does not match K_control*I = {U!r}")
    mu = coef.H0 / link.d * I
    alpha_b = coef.H0 / link.d**2 * I
    sigma_x_sq = position_variance(mob)
    return ChannelStatistics(mu=mu, sigma_x_sq=sigma_x_sq,
                             sigma_Y_sq=link.sigma_m**2 + alpha_b**2 * sigma_x_sq, alpha_b=alpha_b)


def snr_coefficients(coef: DerivedCoefficients, link: LinkConfig) -> tuple[float, float, float]:
    """``(c1, c2, c3)`` of ``SNR(I) = (c1 I)^2 / (sigma_m^2 + c2 I^2 + c3 I^4)``."""
    h = coef.H0 / link.d**2
    return (coef.H0 / link.d,
            2.0 * h * h * coef.D_t * link.T,
            h * h * coef.K_control**2 * g_of_T(coef.D_r, link.T))


def variance_terms(coef: DerivedCoefficients, link: LinkConfig, I: float) -> tuple[float, float, float]:
    """Measurement, passive-diffusion and active-propulsion parts of sigma_Y^2."""
    _, c2, c3 = snr_coefficients(coef, link)
    return link.sigma_m**2, c2 * I**2, c3 * I**4


def snr(coef: DerivedCoefficients, link: LinkConfig, I: float) -> float:
    I = check_intensity(I)
    c1, c2, c3 = snr_coefficients(coef, link)
    return (c1 * I) ** 2 / (link.sigma_m**2 + c2 * I**2 + c3 * I**4)


def observe_nonlinear(coef: DerivedCoefficients, link: LinkConfig, I: float, x: float,
                      z: float = 0.0) -> float:
    if not x < link.d:
        raise WallContactError(f"x = {x!r} m is at or beyond the receiver at d = {link.d!r} m")
    return coef.H0 * I / (link.d - x) + z


def observe_linear(coef: DerivedCoefficients, link: LinkConfig, I: float, x: float,
                   z: float = 0.0) -> float:
    return coef.H0 * I / link.d * (1.0 + x / link.d) + z


def validity_report(coef: DerivedCoefficients, link: LinkConfig, I: float) -> ValidityReport:
    """Check the far-field, low-Peclet and quasi-steady assumptions at intensity ``I``."""
    I = check_intensity(I)
    D_B = coef.D_B
    mob = mobility_for(coef, link.T, I)
    ratio = math.sqrt(position_variance(mob)) / link.d
    peclet = mob.U * link.d / D_B
    margin = link.T * D_B / link.d**2
    return ValidityReport(
        ratio_sigma_x_over_d=ratio,
        peclet=peclet,
        quasi_steady_margin=margin,
        sigma_x_ok=ratio <= SIGMA_X_OVER_D_MAX,
        peclet_ok=peclet <= PECLET_MAX,
        quasi_steady_ok=margin >= QUASI_STEADY_MIN,
    )


def calibrate_sigma_m(coef: DerivedCoefficients, ref_distance: float, ref_intensity: float,
                      snr_ref_db: float) -> float:
    """Measurement noise that puts the propulsion-free SNR at ``snr_ref_db``.

    ``sigma_m = (H0 I_ref / d_ref) / 10**(snr_ref_db / 20)``; passive jitter is
    ignored (it is ~1e-4 of the signal power at the defaults).
    """
    if not (ref_distance > 0 and ref_intensity > 0):
        raise ParameterError("ref_intensity", "reference distance and intensity must be > 0")
    if not coef.H0 > 0:
        raise ParameterError("snr_ref_db", "no emission (H0 = 0), so a reference SNR cannot fix sigma_m; "
                             "give sigma_m directly")
    return coef.H0 * ref_intensity / ref_distance / 10 ** (snr_ref_db / 20)
