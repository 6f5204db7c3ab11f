"""Physical parameters of the Janus transceiver and the coefficients derived from them.

All quantities are SI. Chemical amounts are molecule counts (multiply a molar
flux by Avogadro's number before passing it in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

K_BOLTZMANN = 1.380649e-23  # J/K, exact SI value


class ParameterError(ValueError):
    """An input violates a documented bound. ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ParameterError(field, message)


def check_intensity(I: float, field: str = "I") -> float:
    _require(math.isfinite(I), field, f"must be finite, got {I!r}")
    _require(I >= 0, field, f"must be >= 0, got {I!r}")
    return float(I)


@dataclass(frozen=True)
class PhysicalParams:
    a: float  # particle radius, m
    eta: float  # dynamic viscosity, Pa s
    T_env: float  # temperature, K
    alpha: float  # catalytic cap half-angle, rad
    kappa_base: float  # surface flux amplitude at unit intensity, molecules m^-2 s^-1
    b_dp: float  # diffusiophoretic mobility, m^5 s^-1 molecule^-1 (signed)
    D_fuel: float  # fuel diffusivity, m^2/s
    D_B: float  # information-molecule diffusivity, m^2/s
    beta_R: float  # receiver gain, observation units per (molecules m^-3)
    k_B: float = K_BOLTZMANN

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            _require(isinstance(value, (int, float)) and math.isfinite(value),
                     f.name, f"must be a finite number, got {value!r}")
        for name in ("a", "eta", "T_env", "D_fuel", "D_B", "k_B"):
            _require(getattr(self, name) > 0, name, f"must be > 0, got {getattr(self, name)!r}")
        _require(self.kappa_base >= 0, "kappa_base", f"must be >= 0, got {self.kappa_base!r}")
        _require(0 <= self.alpha <= math.pi, "alpha", f"must lie in [0, pi], got {self.alpha!r}")

    def replace(self, **changes) -> "PhysicalParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PhysicalParams(**values)


@dataclass(frozen=True)
class DerivedCoefficients:
    D_t: float  # m^2/s
    D_r: float  # 1/s
    tau_r: float  # s
    A_cap: float  # m^2
    K_control: float  # m/s per unit intensity
    kappa_em: float  # molecules/s per unit intensity
    G_ch: float  # molecules/m^2 per unit intensity
    H0: float  # observation units * m per unit intensity
    D_B: float  # information-molecule diffusivity, carried for validity checks


def default_params() -> PhysicalParams:
    """Polystyrene sphere in water at room temperature.

    ``b_dp`` and ``kappa_base`` are calibrated so that ``K_control`` is
    5e-8 m/s per unit intensity, i.e. 5 um/s at I = 100.
    """
    return PhysicalParams(
        a=1e-6,
        eta=1e-3,
        T_env=293.0,
        alpha=math.pi / 2,
        kappa_base=1e20,
        b_dp=-4e-36,
        D_fuel=2e-9,
        D_B=2e-9,
        beta_R=1.0,
    )


def stokes_einstein(k_B: float, T_env: float, eta: float, a: float) -> tuple[float, float]:
    """Translational and rotational diffusivities of a sphere."""
    kT = k_B * T_env
    return kT / (6 * math.pi * eta * a), kT / (8 * math.pi * eta * a**3)


def derive_coefficients(p: PhysicalParams) -> DerivedCoefficients:
    D_t, D_r = stokes_einstein(p.k_B, p.T_env, p.eta, p.a)
    A_cap = 2 * math.pi * p.a**2 * (1 - math.cos(p.alpha))
    K_control = -p.b_dp * p.kappa_base * math.sin(p.alpha) ** 2 / (4 * p.D_fuel)
    kappa_em = p.kappa_base * A_cap
    G_ch = kappa_em / (4 * math.pi * p.D_B)
    return DerivedCoefficients(
        D_t=D_t,
        D_r=D_r,
        tau_r=1.0 / D_r,
        A_cap=A_cap,
        K_control=K_control,
        kappa_em=kappa_em,
        G_ch=G_ch,
        H0=p.beta_R * G_ch,
        D_B=p.D_B,
    )


def propulsion_speed(c: DerivedCoefficients, I: float) -> float:
    return c.K_control * check_intensity(I)


def emission_rate(c: DerivedCoefficients, I: float) -> float:
    return c.kappa_em * check_intensity(I)


def appendix_chain(p: PhysicalParams, I: float) -> tuple[float, float, float]:
    """Propulsion speed by way of the surface-mode projection.

    Projects the cap flux onto the first Legendre mode of the fuel field
    (``A1``), converts it to the slip dipole ``B1 = (b_dp/a) A1`` and returns
    ``(A1, B1, U)`` with ``U = 2 B1 / 3``. This path never touches
    ``K_control`` and serves as a cross-check of :func:`derive_coefficients`.
    """
    I = check_intensity(I)
    # int_{cos alpha}^{1} mu dmu = (1 - cos alpha)(1 + cos alpha) / 2; the
    # half-angle forms keep both factors accurate near alpha = 0 and alpha = pi
    one_minus_cos = 2.0 * math.sin(0.5 * p.alpha) ** 2
    one_plus_cos = 2.0 * math.cos(0.5 * p.alpha) ** 2
    cap_moment = 0.5 * one_minus_cos * one_plus_cos
    A1 = -(p.a * p.kappa_base * I / p.D_fuel) * 0.75 * cap_moment
    B1 = (p.b_dp / p.a) * A1
    return A1, B1, 2.0 * B1 / 3.0
