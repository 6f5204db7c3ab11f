import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chemolink.physics import (ParameterError, appendix_chain, default_params, derive_coefficients,
                               emission_rate, propulsion_speed, stokes_einstein)

# 50-digit mpmath evaluation of the Stokes-Einstein relations at a=1 um, eta=1 mPa s, 293 K
D_T_ORACLE = 2.1460991372096829e-13
D_R_ORACLE = 0.16095743529072621
TAU_R_ORACLE = 6.2128226521115324


def test_stokes_einstein_matches_oracle(coef):
    assert coef.D_t == pytest.approx(D_T_ORACLE, rel=1e-14)
    assert coef.D_r == pytest.approx(D_R_ORACLE, rel=1e-14)
    assert coef.tau_r == pytest.approx(TAU_R_ORACLE, rel=1e-14)


def test_rotational_relaxation_time_about_six_seconds(coef):
    assert 5.5 <= coef.tau_r <= 6.5


def test_rounded_diffusivities(coef):
    assert coef.D_t == pytest.approx(2.146e-13, rel=1e-3)
    assert coef.D_r == pytest.approx(0.1610, rel=1e-3)


def test_no_cap_means_no_propulsion_and_no_emission(params):
    c = derive_coefficients(params.replace(alpha=0.0))
    assert c.A_cap == 0 and c.K_control == 0 and c.kappa_em == 0


def test_calibrated_speeds(coef):
    assert coef.K_control == pytest.approx(5e-8, rel=1e-12)
    assert propulsion_speed(coef, 0.0) == 0.0
    assert propulsion_speed(coef, 100.0) == pytest.approx(5e-6, rel=1e-12)
    assert propulsion_speed(coef, 10.0) == pytest.approx(0.5e-6, rel=1e-12)


def test_hemispherical_cap_emission(params, coef):
    assert emission_rate(coef, 0.0) == 0.0
    assert emission_rate(coef, 3.0) == pytest.approx(params.kappa_base * 2 * math.pi * 1e-12 * 3.0, rel=1e-14)


NORMAL_INTENSITY = st.one_of(st.just(0.0), st.floats(1e-100, 1e4))


@given(NORMAL_INTENSITY)
def test_emission_linear(I):
    c = derive_coefficients(default_params())
    assert emission_rate(c, 2 * I) == 2 * emission_rate(c, I)


@given(a=st.floats(1e-7, 1e-5), eta=st.floats(1e-4, 1e-1), T_env=st.floats(250, 400),
       alpha=st.floats(0, math.pi), kappa=st.floats(0, 1e24),
       b=st.one_of(st.just(0.0), st.floats(1e-45, 1e-33), st.floats(-1e-33, -1e-45)),
       I=NORMAL_INTENSITY)
def test_surface_mode_chain_reproduces_control_gain(a, eta, T_env, alpha, kappa, b, I):
    p = default_params().replace(a=a, eta=eta, T_env=T_env, alpha=alpha, kappa_base=kappa, b_dp=b)
    c = derive_coefficients(p)
    A1, B1, U = appendix_chain(p, I)
    assert (2 / 3) * (b / a) * A1 == pytest.approx(c.K_control * I, rel=1e-12, abs=1e-300)
    assert U == pytest.approx(c.K_control * I, rel=1e-12, abs=1e-300)


def test_surface_mode_chain_hemisphere(params):
    A1, _, _ = appendix_chain(params, 7.0)
    assert A1 == pytest.approx(-(3 * params.a / (8 * params.D_fuel)) * params.kappa_base * 7.0, rel=1e-14)
    assert appendix_chain(params.replace(alpha=0.0), 7.0) == (pytest.approx(0.0), pytest.approx(0.0),
                                                              pytest.approx(0.0))


@given(a=st.floats(1e-8, 1e-4), eta=st.floats(1e-5, 10.0))
def test_stokes_einstein_ratio(a, eta):
    # D_t / D_r = 4 a^2 / 3 independently of fluid and temperature
    D_t, D_r = stokes_einstein(1.380649e-23, 300.0, eta, a)
    assert D_t / D_r == pytest.approx(4 * a * a / 3, rel=1e-12)


@pytest.mark.parametrize("field,value", [("a", 0.0), ("eta", -1.0), ("T_env", math.nan), ("alpha", 4.0),
                                         ("kappa_base", -1.0), ("D_B", math.inf)])
def test_invalid_parameters_name_the_field(params, field, value):
    with pytest.raises(ParameterError) as info:
        params.replace(**{field: value})
    assert info.value.field == field


@pytest.mark.parametrize("I", [-1.0, math.nan, math.inf])
def test_invalid_intensity(coef, I):
    with pytest.raises(ParameterError):
        propulsion_speed(coef, I)
