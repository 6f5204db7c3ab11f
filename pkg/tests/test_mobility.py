import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemolink.mobility import (IntegratorConfig, MobilityParams, g_of_T, position_variance,
                                sample_positions, simulate_trajectory, trial_seed)
from chemolink.montecarlo import variance_standard_error
from chemolink.physics import ParameterError

from conftest import default_positions

# 50-digit mpmath evaluations of (exp(-u) + u - 1) / D_r^2
G_ORACLE = {
    (0.16096, 1.0): 0.4742189982247948,
    (0.16095743529072621, 1.0): 0.47421939287870826,
    (1e-6, 1.0): 0.49999983333337499999,
    (1e-5, 1.0): 0.49999833333749999167,
    (1e-4, 1.0): 0.49998333374999166681,
    (2e-4, 1.0): 0.49996666833326666889,
    (1e-2, 1.0): 0.49833749168053573906,
}
SIGMA_X_SQ_ORACLE = 1.2284704649409643e-11  # defaults, U = 5 um/s, T = 1 s


@pytest.mark.parametrize("key", list(G_ORACLE))
def test_g_matches_high_precision_oracle(key):
    assert g_of_T(*key) == pytest.approx(G_ORACLE[key], rel=1e-10)


def test_g_rounded_value():
    assert g_of_T(0.16096, 1.0) == pytest.approx(0.47427, abs=1e-3)


def test_g_zero_duration():
    assert g_of_T(0.16, 0.0) == 0.0


def test_g_long_time_limit():
    D_r = 10.0
    T = 1000 / D_r
    assert g_of_T(D_r, T) == pytest.approx(T / D_r, rel=2e-3)


@given(st.floats(1e-9, 1e3), st.floats(1e-6, 1e3))
def test_g_bounds(D_r, T):
    g = g_of_T(D_r, T)
    # 0 < g <= T^2 / 2 and g <= T / D_r
    assert 0 < g <= 0.5 * T * T * (1 + 1e-12)
    assert g <= T / D_r * (1 + 1e-12)


@given(st.floats(1e-3, 1e2), st.floats(1e-3, 1e2))
def test_g_continuous_across_series_switch(D_r, T):
    # both branches agree near the switch point
    u = 1e-4
    lo = g_of_T(u * (1 - 1e-9) / T, T)
    hi = g_of_T(u * (1 + 1e-9) / T, T)
    assert lo == pytest.approx(hi, rel=1e-8)


def test_position_variance_values(coef):
    assert position_variance(MobilityParams(coef.D_t, coef.D_r, 0.0, 1.0)) == pytest.approx(2 * coef.D_t)
    m = MobilityParams(coef.D_t, coef.D_r, 5e-6, 1.0)
    assert position_variance(m) == pytest.approx(SIGMA_X_SQ_ORACLE, rel=1e-12)
    assert position_variance(MobilityParams(2.146e-13, 0.16096, 5e-6, 1.0)) == pytest.approx(1.229e-11, rel=1e-3)
    assert math.sqrt(position_variance(m)) == pytest.approx(3.51e-6, rel=2e-3)


def test_long_time_effective_diffusion(coef):
    D_r = 100.0
    m = MobilityParams(coef.D_t, D_r, 5e-6, 1.0)
    assert position_variance(m) == pytest.approx(2 * (coef.D_t + m.U**2 / (2 * D_r)) * m.T, rel=0.01)


def test_fast_rotation_surrogate(coef):
    m = MobilityParams(coef.D_t, 1e3, 5e-6, 1.0)
    excess = position_variance(m) - 2 * coef.D_t * m.T
    assert 0 <= excess <= 2 * m.U**2 / m.D_r * m.T


def test_frozen_dynamics_stay_put():
    m = MobilityParams(D_t=1e-300, D_r=1.0, U=0.0, T=0.01)
    for seed in range(5):
        x = simulate_trajectory(m, IntegratorConfig.for_duration(0.01, 1e-4, seed, x0=1e-6))
        assert x == pytest.approx(1e-6, abs=1e-150)


def test_resolution_guard():
    m = MobilityParams(1e-13, 1e3, 0.0, 1.0)
    with pytest.raises(ParameterError) as info:
        simulate_trajectory(m, IntegratorConfig.for_duration(1.0, 1e-4, 0))
    assert info.value.field == "dt"


def test_duration_mismatch_rejected(coef):
    m = MobilityParams(coef.D_t, coef.D_r, 0.0, 1.0)
    with pytest.raises(ParameterError):
        simulate_trajectory(m, IntegratorConfig(dt=1e-4, n_steps=5000, seed=0))


def test_wall_reflects(coef):
    m = MobilityParams(coef.D_t, coef.D_r, 5e-5, 1.0)
    cfg = IntegratorConfig.for_duration(1.0, 1e-4, 3, wall_position=2e-6)
    xs = sample_positions(m, cfg, 200)
    assert np.all(xs <= 2e-6)


def test_singleton_matches_single_trajectory(coef):
    m = MobilityParams(coef.D_t, coef.D_r, 1e-6, 0.1)
    cfg = IntegratorConfig.for_duration(0.1, 1e-4, 11)
    first = sample_positions(m, cfg, 1)
    direct = simulate_trajectory(m, IntegratorConfig.for_duration(0.1, 1e-4, trial_seed(11, 0)))
    assert first.shape == (1,) and first[0] == direct


def test_sampling_is_deterministic_and_order_independent(coef):
    m = MobilityParams(coef.D_t, coef.D_r, 5e-6, 0.1)
    cfg = IntegratorConfig.for_duration(0.1, 1e-4, 5)
    a = sample_positions(m, cfg, 2500)
    b = sample_positions(m, cfg, 2500)
    c = sample_positions(m, cfg, 2500, threads=2)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    # a prefix run reproduces the first trials exactly
    assert np.array_equal(sample_positions(m, cfg, 10), a[:10])


def test_trial_keys_separate_streams(coef):
    m = MobilityParams(coef.D_t, coef.D_r, 5e-6, 0.1)
    cfg = IntegratorConfig.for_duration(0.1, 1e-4, 5)
    assert not np.array_equal(sample_positions(m, cfg, 20, key=(0,)), sample_positions(m, cfg, 20, key=(1,)))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 1e-5), st.integers(0, 2**32))
def test_short_run_moments(U, seed):
    # 400 trajectories over 0.05 s: variance within a loose 5-sigma band
    from chemolink.physics import default_params, derive_coefficients
    c = derive_coefficients(default_params())
    m = MobilityParams(c.D_t, c.D_r, U, 0.05)
    xs = sample_positions(m, IntegratorConfig.for_duration(0.05, 1e-4, seed), 400)
    assert abs(xs.var() - position_variance(m)) < 5 * position_variance(m) * math.sqrt(2 / 400)


@pytest.mark.slow
def test_passive_variance_ratio():
    m, xs, _ = default_positions(0.0)
    ratio = xs.var(ddof=1) / (2 * m.D_t * m.T)
    assert 0.985 <= ratio <= 1.015


@pytest.mark.slow
def test_active_variance_within_three_standard_errors():
    m, xs, _ = default_positions(5e-6)
    assert abs(xs.var(ddof=1) - position_variance(m)) < 3 * variance_standard_error(xs)


@pytest.mark.slow
def test_time_step_halving_is_consistent(coef):
    # the same physical setting at dt and dt/2 gives statistically equal variances
    m = MobilityParams(coef.D_t, coef.D_r, 5e-6, 1.0)
    coarse = sample_positions(m, IntegratorConfig.for_duration(1.0, 2e-4, 91), 20_000)
    fine = sample_positions(m, IntegratorConfig.for_duration(1.0, 1e-4, 92), 20_000)
    se = math.hypot(variance_standard_error(coarse), variance_standard_error(fine))
    assert abs(coarse.var(ddof=1) - fine.var(ddof=1)) < 4 * se
    assert abs(fine.var(ddof=1) - position_variance(m)) < 4 * variance_standard_error(fine)
