"""Parameter identification from a measured displacement response.

Fits theta = (sigma, beta, s_scale, amplitude, width) of a single-impulse
scenario by minimizing the RMS displacement residual between the measured
sequence and a forward simulation. The Coulomb level c_f and mass m are
treated as known. The optimizer is a derivative-free Nelder-Mead simplex
with every candidate projected onto the box bounds; it stops when the
relative simplex diameter drops below 1e-8 or after 2000 iterations and
always returns the best point seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .friction import DEFAULT_Z_FLOOR, FrictionParams
from .plant import ImpulseTrain, PlantParams, SimConfig, SimulationDiverged, simulate

THETA_NAMES = ("sigma", "beta", "s_scale", "amplitude", "width")

DIAMETER_TOL = 1e-8
MAX_ITERATIONS = 2000


@dataclass(frozen=True)
class FitProblem:
    """Measured data plus the knowns and the search box.

    t, x: uniform-grid displacement record. plant/c_f/z_floor: fixed model
    constants. impulse_start: known onset of the excitation pulse whose
    amplitude and width are co-fitted. bounds: per-parameter (lo, hi) in
    THETA_NAMES order, finite and positive. weights: optional per-sample
    residual weights.
    """

    t: np.ndarray
    x: np.ndarray
    plant: PlantParams
    c_f: float
    impulse_start: float
    bounds: tuple[tuple[float, float], ...]
    weights: np.ndarray | None = None
    z_floor: float = DEFAULT_Z_FLOOR

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if len(t) != len(x) or len(t) < 2:
            raise ValueError("need matching t/x columns with at least 2 samples")
        dt = t[1] - t[0]
        if dt <= 0 or np.any(np.abs(np.diff(t) - dt) > max(1e-12, 1e-6 * dt)):
            raise ValueError("measured grid is not uniform")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x", x)
        if len(self.bounds) != len(THETA_NAMES):
            raise ValueError(f"bounds must cover {THETA_NAMES}")
        for name, (lo, hi) in zip(THETA_NAMES, self.bounds):
            if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
                raise ValueError(f"bounds for {name} must be finite, positive, lo < hi")
        if self.c_f <= 0:
            raise ValueError(f"c_f must be > 0, got {self.c_f!r}")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if len(w) != len(t) or np.any(w < 0):
                raise ValueError("weights must match the grid and be >= 0")
            object.__setattr__(self, "weights", w)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])


@dataclass(frozen=True)
class FitResult:
    """Best parameters found, their residual and convergence bookkeeping.

    beta_insensitive flags a residual that moves by less than 1% when beta
    is swept across its whole bound range at the fitted point, i.e. the
    record does not constrain the lag constant.
    """

    theta: tuple[float, ...]
    rms_residual: float
    iterations: int
    converged: bool
    beta_insensitive: bool


def residual(theta: Sequence[float], problem: FitProblem) -> float:
    """Weighted RMS displacement error of a forward run at theta.

    Diverging or non-finite simulations score +inf, never NaN. theta must
    lie inside the bounds.
    """
    theta = [float(v) for v in theta]
    if len(theta) != len(THETA_NAMES):
        raise ValueError(f"theta must have {len(THETA_NAMES)} entries")
    for name, v, (lo, hi) in zip(THETA_NAMES, theta, problem.bounds):
        if math.isnan(v):
            raise ValueError(f"{name} is NaN")
        if not (lo <= v <= hi):
            raise ValueError(f"{name} = {v!r} outside bounds [{lo}, {hi}]")
    sigma, beta, s_scale, amp, width = theta
    try:
        fp = FrictionParams(
            c_f=problem.c_f, sigma=sigma, beta=beta, s_scale=s_scale, z_floor=problem.z_floor
        )
        train = ImpulseTrain(((problem.impulse_start, width, amp),))
        cfg = SimConfig(dt=problem.dt, t_end=float(problem.t[-1]))
        traj = simulate(problem.plant, fp, train, cfg)
    except (SimulationDiverged, OverflowError):
        return math.inf
    if len(traj) != len(problem.x) or not np.all(np.isfinite(traj.x)):
        return math.inf
    err = traj.x - problem.x
    if problem.weights is not None:
        sq = np.sum(problem.weights * err * err) / np.sum(problem.weights)
    else:
        sq = np.mean(err * err)
    return float(np.sqrt(sq))


def _project(theta: np.ndarray, bounds: tuple[tuple[float, float], ...]) -> np.ndarray:
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.minimum(np.maximum(theta, lo), hi)


def _simplex_diameter(simplex: list[np.ndarray]) -> float:
    # relative infinity-norm spread around the best vertex
    best = simplex[0]
    scale = np.maximum(1.0, np.abs(best))
    return max(float(np.max(np.abs(v - best) / scale)) for v in simplex[1:])


def _nelder_mead(
    fun: Callable[[np.ndarray], float],
    x0: np.ndarray,
    bounds: tuple[tuple[float, float], ...],
    max_iter: int = MAX_ITERATIONS,
    diam_tol: float = DIAMETER_TOL,
) -> tuple[np.ndarray, float, int, bool]:
    """Projected Nelder-Mead; returns (best x, best f, iterations, converged)."""
    n = len(x0)
    x0 = _project(np.asarray(x0, dtype=float), bounds)
    simplex = [x0]
    for i in range(n):
        step = 0.05 * (bounds[i][1] - bounds[i][0])
        v = x0.copy()
        v[i] = v[i] + step if v[i] + step <= bounds[i][1] else v[i] - step
        simplex.append(_project(v, bounds))
    fvals = [fun(v) for v in simplex]

    def order() -> None:
        idx = np.argsort(fvals, kind="stable")
        simplex[:] = [simplex[i] for i in idx]
        fvals[:] = [fvals[i] for i in idx]

    order()
    best_x, best_f = simplex[0].copy(), fvals[0]
    iterations = 0
    converged = False
    while iterations < max_iter:
        if _simplex_diameter(simplex) < diam_tol:
            converged = True
            break
        iterations += 1
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        refl = _project(centroid + (centroid - worst), bounds)
        f_refl = fun(refl)
        if f_refl < fvals[0]:
            exp = _project(centroid + 2.0 * (centroid - worst), bounds)
            f_exp = fun(exp)
            if f_exp < f_refl:
                simplex[-1], fvals[-1] = exp, f_exp
            else:
                simplex[-1], fvals[-1] = refl, f_refl
        elif f_refl < fvals[-2]:
            simplex[-1], fvals[-1] = refl, f_refl
        else:
            if f_refl < fvals[-1]:
                cand = _project(centroid + 0.5 * (refl - centroid), bounds)
            else:
                cand = _project(centroid - 0.5 * (centroid - worst), bounds)
            f_cand = fun(cand)
            if f_cand < min(f_refl, fvals[-1]):
                simplex[-1], fvals[-1] = cand, f_cand
            else:
                # shrink toward the best vertex
                for i in range(1, len(simplex)):
                    simplex[i] = _project(simplex[0] + 0.5 * (simplex[i] - simplex[0]), bounds)
                    fvals[i] = fun(simplex[i])
        order()
        if fvals[0] < best_f:
            best_x, best_f = simplex[0].copy(), fvals[0]
    return best_x, best_f, iterations, converged


def fit(problem: FitProblem, theta0: Sequence[float]) -> FitResult:
    """Minimize the residual from theta0; deterministic for identical inputs."""
    theta0 = np.asarray([float(v) for v in theta0], dtype=float)
    if len(theta0) != len(THETA_NAMES):
        raise ValueError(f"theta0 must have {len(THETA_NAMES)} entries")

    def fun(v: np.ndarray) -> float:
        return residual(v, problem)

    best, f_best, iters, converged = _nelder_mead(fun, theta0, problem.bounds)

    # beta sensitivity probe across its whole bound range at the solution
    lo, hi = problem.bounds[1]
    probe = best.copy()
    worst_change = 0.0
    for b in (lo, hi):
        probe[1] = b
        r = residual(probe, problem)
        denom = max(f_best, 1e-300)
        worst_change = max(worst_change, abs(r - f_best) / denom)
    beta_insensitive = worst_change < 0.01

    return FitResult(
        theta=tuple(float(v) for v in best),
        rms_residual=float(f_best),
        iterations=iters,
        converged=converged,
        beta_insensitive=beta_insensitive,
    )
