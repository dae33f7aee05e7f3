"""Fixed-step simulation of the 1-DOF plant m*x'' + f(x') = u.

Integration is semi-implicit Euler: the velocity is updated first with the
friction force returned by ``step_friction`` for the current step, then the
position is updated with the new velocity. The sample grid is exactly
k * dt for k = 0 .. floor(t_end/dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .friction import DEFAULT_DEADBAND, FrictionParams, FrictionState, step_friction


class SimulationDiverged(RuntimeError):
    """Velocity exceeded the divergence bound; carries the offending time."""

    def __init__(self, t: float, v: float, bound: float):
        super().__init__(f"|v| = {abs(v):g} exceeded bound {bound:g} at t = {t:g} s")
        self.t = t
        self.v = v


@dataclass(frozen=True)
class PlantParams:
    """Moving mass m [kg], > 0."""

    m: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValueError(f"m must be finite and > 0, got {self.m!r}")


@dataclass(frozen=True)
class ImpulseTrain:
    """Input force as a train of rectangular pulses (t_start, duration, amplitude).

    Pulses must be sorted by start time, strictly positive in duration and
    non-overlapping. A pulse is active on [t_start, t_start + duration).
    """

    pulses: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self) -> None:
        prev_end = -math.inf
        for i, (t0, dur, amp) in enumerate(self.pulses):
            if not all(math.isfinite(v) for v in (t0, dur, amp)):
                raise ValueError(f"pulse {i} has non-finite fields")
            if dur <= 0.0:
                raise ValueError(f"pulse {i} duration must be > 0, got {dur!r}")
            if t0 < prev_end:
                raise ValueError(f"pulse {i} overlaps or precedes the previous one")
            prev_end = t0 + dur

    def sample(self, t: np.ndarray) -> np.ndarray:
        """Input force u at each time in t [N]."""
        u = np.zeros_like(t, dtype=float)
        for t0, dur, amp in self.pulses:
            # half-step guard so grid points landing on edges bin predictably
            u[(t >= t0 - 1e-12) & (t < t0 + dur - 1e-12)] = amp
        return u


@dataclass(frozen=True)
class SimConfig:
    """Grid, measurement and guard settings for a run.

    dt and t_end define the sample grid; noise_std and quant shape the
    displacement measurement (Gaussian noise, then floor-to-grid
    quantization); seed fixes the noise stream; v_max is the divergence
    guard on |v|.
    """

    dt: float
    t_end: float
    noise_std: float = 0.0
    quant: float = 0.0
    seed: int = 0
    v_max: float = 1e3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        if self.noise_std < 0 or self.quant < 0:
            raise ValueError("noise_std and quant must be >= 0")
        if not (math.isfinite(self.v_max) and self.v_max > 0):
            raise ValueError(f"v_max must be finite and > 0, got {self.v_max!r}")

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9)) + 1


def _uniform_grid_ok(t: np.ndarray) -> bool:
    if len(t) < 2:
        return True
    dt0 = t[1] - t[0]
    if dt0 <= 0:
        return False
    return bool(np.all(np.abs(np.diff(t) - dt0) <= max(1e-12, 1e-6 * dt0)))


@dataclass(frozen=True)
class Trajectory:
    """Simulated run on a uniform grid: t, x [m], v [m/s], f [N], u [N]."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    f: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.t)
        for name in ("x", "v", "f", "u"):
            if len(getattr(self, name)) != n:
                raise ValueError("trajectory columns must have equal length")
        if n and not np.all(np.isfinite(self.t)):
            raise ValueError("non-finite timestamps")
        if not _uniform_grid_ok(self.t):
            raise ValueError("trajectory grid is not uniform")

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class Measured:
    """Measured sequence: t, noisy/quantized displacement x [m], input u [N]."""

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.t) == len(self.x) == len(self.u)):
            raise ValueError("measured columns must have equal length")

    def __len__(self) -> int:
        return len(self.t)


def _integrate(
    pp: PlantParams,
    fp: FrictionParams,
    u: np.ndarray,
    dt: float,
    v_max: float,
    deadband: float,
) -> Trajectory:
    n = len(u)
    t = np.arange(n) * dt
    u_list = u.tolist()
    xs = [0.0] * n
    vs = [0.0] * n
    fs = [0.0] * n
    x = 0.0
    v = 0.0
    st = FrictionState()
    m = pp.m
    for k in range(n):
        tk = k * dt
        st, f_k = step_friction(st, v, dt, fp, tk, deadband)
        xs[k] = x
        vs[k] = v
        fs[k] = f_k
        if k < n - 1:
            v += dt * (u_list[k] - f_k) / m
            if abs(v) > v_max:
                raise SimulationDiverged((k + 1) * dt, v, v_max)
            x += dt * v
    return Trajectory(t, np.array(xs), np.array(vs), np.array(fs), np.asarray(u, dtype=float))


def simulate(
    pp: PlantParams,
    fp: FrictionParams,
    train: ImpulseTrain,
    cfg: SimConfig,
    deadband: float = DEFAULT_DEADBAND,
) -> Trajectory:
    """Run the plant from rest under an impulse train.

    Returns a Trajectory with exactly floor(t_end/dt)+1 samples at k*dt.
    Raises SimulationDiverged if |v| exceeds cfg.v_max.
    """
    n = cfg.n_samples
    t = np.arange(n) * cfg.dt
    u = train.sample(t)
    return _integrate(pp, fp, u, cfg.dt, cfg.v_max, deadband)


def simulate_forced(
    pp: PlantParams,
    fp: FrictionParams,
    u: np.ndarray,
    dt: float,
    v_max: float = 1e3,
    deadband: float = DEFAULT_DEADBAND,
) -> Trajectory:
    """Run the plant from rest under an arbitrary per-sample input sequence."""
    if dt <= 0 or not math.isfinite(dt):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    return _integrate(pp, fp, np.asarray(u, dtype=float), dt, v_max, deadband)


def measure(traj: Trajectory, cfg: SimConfig) -> Measured:
    """Displacement measurement: x + Gaussian noise, floor-quantized to a grid.

    Quantization maps x to floor(x/quant)*quant (toward minus infinity);
    quant = 0 disables it. The noise stream is drawn from
    numpy.random.default_rng(cfg.seed), so a fixed seed reproduces the
    sequence bit-identically.
    """
    x = traj.x.copy()
    if cfg.noise_std > 0:
        rng = np.random.default_rng(cfg.seed)
        x = x + rng.normal(0.0, cfg.noise_std, size=len(x))
    if cfg.quant > 0:
        x = np.floor(x / cfg.quant) * cfg.quant
    return Measured(traj.t.copy(), x, traj.u.copy())
