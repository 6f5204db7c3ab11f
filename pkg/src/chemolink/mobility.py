"""Decision-time position statistics of a controlled active Brownian particle.

Closed forms for the axial position variance plus an Euler-Maruyama
integrator of the planar Langevin equations that serves as ground truth.

Random streams: trial ``k`` of a run seeded with ``seed`` draws from
``numpy.random.PCG64(SeedSequence(seed, spawn_key=key + (k,)))``. This is the
same stream ``SeedSequence(seed).spawn(n)[k]`` yields, so the value of a trial
depends only on ``(seed, key, k)`` and never on batching or worker order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .physics import ParameterError

SERIES_SWITCH = 1e-4  # D_r*T below which g(T) uses its Taylor series


class IntegratorDivergence(RuntimeError):
    pass


@dataclass(frozen=True)
class MobilityParams:
    D_t: float
    D_r: float
    U: float  # propulsion speed, m/s (constant over the symbol)
    T: float  # symbol duration, s

    def __post_init__(self):
        for name in ("D_t", "D_r", "T"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(name, f"must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.U) and self.U >= 0):
            raise ParameterError("U", f"must be finite and >= 0, got {self.U!r}")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    n_steps: int
    seed: int | np.random.SeedSequence
    x0: float = 0.0
    wall_position: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError("dt", f"must be finite and > 0, got {self.dt!r}")
        if self.n_steps < 1:
            raise ParameterError("n_steps", f"must be >= 1, got {self.n_steps!r}")
        if self.wall_position is not None and not self.x0 < self.wall_position:
            raise ParameterError("x0", "initial position must lie below the wall")

    @classmethod
    def for_duration(cls, T: float, dt: float, seed, x0: float = 0.0,
                     wall_position: float | None = None) -> "IntegratorConfig":
        return cls(dt=dt, n_steps=max(1, round(T / dt)), seed=seed, x0=x0,
                   wall_position=wall_position)

    def check_against(self, m: MobilityParams) -> None:
        """Resolution guard (dt <= tau_r/100) and duration consistency."""
        if self.dt > 0.01 / m.D_r:
            raise ParameterError(
                "dt", f"{self.dt:g} s exceeds tau_r/100 = {0.01 / m.D_r:g} s")
        if abs(self.n_steps * self.dt - m.T) > self.dt * (1 + 1e-9):
            raise ParameterError(
                "n_steps", f"n_steps*dt = {self.n_steps * self.dt:g} s does not match T = {m.T:g} s")


def g_of_T(D_r: float, T: float) -> float:
    """Active-variance kernel ``(exp(-D_r T) + D_r T - 1) / D_r**2`` in s^2."""
    if not (math.isfinite(D_r) and D_r > 0):
        raise ParameterError("D_r", f"must be finite and > 0, got {D_r!r}")
    if not (math.isfinite(T) and T >= 0):
        raise ParameterError("T", f"must be finite and >= 0, got {T!r}")
    u = D_r * T
    if u < SERIES_SWITCH:
        # exp(-u) + u - 1 = u^2/2 - u^3/6 + u^4/24 - ...
        return T * T * (0.5 - u / 6.0 + u * u / 24.0)
    return (math.expm1(-u) + u) / (D_r * D_r)


def position_variance(m: MobilityParams) -> float:
    """Variance of the axial position at t = T, passive plus active part."""
    return 2.0 * m.D_t * m.T + m.U**2 * g_of_T(m.D_r, m.T)


def trial_seed(seed, k: int, key: tuple[int, ...] = ()) -> np.random.SeedSequence:
    """Sub-seed of trial ``k``; ``key`` namespaces independent batches (e.g. grid points)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key) + (k,))
    return np.random.SeedSequence(int(seed), spawn_key=tuple(key) + (k,))


def make_rng(seed) -> np.random.Generator:
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seed))


@numba.njit(cache=True)
def _euler_maruyama(rng, U, D_t, D_r, dt, n_steps, x0, wall, has_wall):
    phi = rng.uniform(0.0, 2.0 * np.pi)
    s_rot = np.sqrt(2.0 * D_r * dt)
    s_tr = np.sqrt(2.0 * D_t * dt)
    drift = U * dt
    x = x0
    for _ in range(n_steps):
        x = x + drift * np.cos(phi) + s_tr * rng.standard_normal()
        if has_wall and x > wall:
            x = 2.0 * wall - x
        phi = phi + s_rot * rng.standard_normal()
    return x


def integrate(m: MobilityParams, cfg: IntegratorConfig, rng: np.random.Generator) -> float:
    """Advance one symbol with an existing generator and return x(T).

    The initial orientation is the first draw, so callers can keep drawing
    from ``rng`` afterwards (e.g. measurement noise) without overlap.
    """
    has_wall = cfg.wall_position is not None
    wall = cfg.wall_position if has_wall else 0.0
    x = _euler_maruyama(rng, m.U, m.D_t, m.D_r, cfg.dt, cfg.n_steps, cfg.x0, wall, has_wall)
    if not math.isfinite(x):
        raise IntegratorDivergence(f"non-finite position after {cfg.n_steps} steps (dt={cfg.dt:g})")
    return x


def simulate_trajectory(m: MobilityParams, cfg: IntegratorConfig) -> float:
    """Final axial position of one Euler-Maruyama trajectory.

    Orientation starts uniform on [0, 2 pi). With ``cfg.wall_position`` set, a
    step that lands beyond the wall is mirrored back (``x <- 2 wall - x``).
    """
    cfg.check_against(m)
    return integrate(m, cfg, make_rng(cfg.seed))


def _sample_chunk(m, cfg, ks, key):
    return [integrate(m, cfg, make_rng(trial_seed(cfg.seed, k, key))) for k in ks]


def sample_positions(m: MobilityParams, cfg: IntegratorConfig, n_trials: int,
                     threads: int = 1, key: tuple[int, ...] = ()) -> np.ndarray:
    """x(T) for ``n_trials`` independent trajectories.

    Trial ``k`` is ``simulate_trajectory`` run with ``trial_seed(cfg.seed, k)``,
    so the output is bit-identical for any ``threads``.
    """
    if n_trials < 1:
        raise ParameterError("n_trials", f"must be >= 1, got {n_trials!r}")
    cfg.check_against(m)
    out = np.empty(n_trials)
    if threads <= 1 or n_trials < 1000:
        out[:] = _sample_chunk(m, cfg, range(n_trials), key)
        return out
    bounds = np.linspace(0, n_trials, threads * 4 + 1).astype(int)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [(lo, pool.submit(_sample_chunk, m, cfg, range(lo, hi), key))
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        for lo, fut in futures:
            chunk = fut.result()
            out[lo:lo + len(chunk)] = chunk
    return out
