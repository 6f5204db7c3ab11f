import functools
import time

import numpy as np
import pytest

from chemolink.channel import LinkConfig, calibrate_sigma_m
from chemolink.mobility import IntegratorConfig, MobilityParams, sample_positions
from chemolink.physics import default_params, derive_coefficients

MC_SEED = 20240611
MC_TRIALS = 100_000


@pytest.fixture(scope="session")
def params():
    return default_params()


@pytest.fixture(scope="session")
def coef(params):
    return derive_coefficients(params)


@pytest.fixture(scope="session")
def link(coef):
    # 20 dB propulsion-free SNR at I = 50, d = 50 um
    return LinkConfig(d=50e-6, T=1.0, sigma_m=calibrate_sigma_m(coef, 50e-6, 50.0, 20.0))


@functools.lru_cache(maxsize=None)
def default_positions(U: float, n: int = MC_TRIALS,
                      seed: int = MC_SEED) -> tuple[MobilityParams, np.ndarray, float]:
    """x(T) of ``n`` free trajectories at the default particle and the wall time it took.

    Cached so the acceptance module and the mobility tests share one run.
    """
    c = derive_coefficients(default_params())
    m = MobilityParams(D_t=c.D_t, D_r=c.D_r, U=U, T=1.0)
    cfg = IntegratorConfig.for_duration(1.0, 1e-4, seed)
    start = time.perf_counter()
    xs = sample_positions(m, cfg, n)
    return m, xs, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
