"""Reduced-order observer for velocity and friction force from displacement.

The plant state w = (x, v, f) is split into the measured part (x) and the
estimated part z = (v, f). In regular form the estimated block evolves as

    z' = a22 z + b_z u,      x' = a12 z,
    a22 = [[0, -1/m], [phi, 0]],   b_z = (1/m, 0),   a12 = (1, 0),

where phi = dF_c/dx + sigma/beta lumps the presliding stiffness and the
viscous-lag coupling. With correction gain L = (l1, l2) the observer is

    z~' = M z~ + M L x + b_z u,    M = a22 - L a12,

and the estimates are recovered by the back-transform w~ = z~ + L x. For
any frozen phi the estimation error obeys e' = M e, so the error poles are
the roots of lam^2 + l1 lam + (phi - l2)/m.

Each step discretizes the frozen-phi system exactly (zero-order hold on x
and u) via a closed-form 2x2 matrix exponential. phi itself comes from an
observer-internal replica of the presliding state, driven by the measured
displacement increments with reversal detection on sign(w2~).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .friction import (
    DEFAULT_DEADBAND,
    FrictionParams,
    PreslidingState,
    coulomb_stiffness,
    deadband_sign,
    update_presliding,
)
from .gains import ObserverGains
from .plant import Measured, Trajectory

Mat2 = tuple[tuple[float, float], tuple[float, float]]


class GridError(ValueError):
    """Measured samples are not on a uniform time grid; carries the row index."""

    def __init__(self, row: int, message: str):
        super().__init__(message)
        self.row = row


@dataclass(frozen=True)
class RegularForm:
    """Block decomposition of the linearized plant around the measured state."""

    a11: float
    a12: tuple[float, float]
    a21: tuple[float, float]
    a22: Mat2
    b_w: float
    b_z: tuple[float, float]


def assemble(m: float, phi: float, sob: float = 0.0) -> RegularForm:
    """Regular-form blocks for mass m and total coupling phi (>= sob >= 0)."""
    if not (math.isfinite(m) and m > 0):
        raise ValueError(f"m must be finite and > 0, got {m!r}")
    if not (phi >= sob >= 0.0):
        raise ValueError(f"need phi >= sob >= 0, got phi={phi!r}, sob={sob!r}")
    return RegularForm(
        a11=0.0,
        a12=(1.0, 0.0),
        a21=(0.0, 0.0),
        a22=((0.0, -1.0 / m), (phi, 0.0)),
        b_w=0.0,
        b_z=(1.0 / m, 0.0),
    )


def observer_matrix(g: ObserverGains, m: float, phi: float) -> Mat2:
    """Closed-loop error matrix M = a22 - L a12."""
    return ((-g.l1, -1.0 / m), (phi - g.l2, 0.0))


# ---------------------------------------------------------------------------
# exact zero-order-hold discretization of a 2x2 system
# ---------------------------------------------------------------------------

def _expint(r: complex, dt: float) -> complex:
    # integral of e^{r s} over [0, dt]; series below |r dt| ~ 1e-6 to dodge
    # the (e^z - 1)/r cancellation
    z = r * dt
    if abs(z) < 1e-6:
        return dt * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    return (cmath.exp(z) - 1.0) / r


def zoh_discretize(M: Mat2, dt: float) -> tuple[Mat2, Mat2]:
    """Exact hold pair: Phi = exp(M dt) and J = integral of exp(M s) over [0, dt].

    Closed form through the eigenvalues r = a +- mu of the 2x2 (Lagrange
    interpolation on distinct eigenvalues, Cayley-Hamilton confluent form
    when they nearly coincide). Complex intermediates; results are real.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    (m00, m01), (m10, m11) = M
    a = 0.5 * (m00 + m11)
    det = m00 * m11 - m01 * m10
    mu = cmath.sqrt(complex(a * a - det))
    r1 = a + mu
    r2 = a - mu
    if abs((r1 - r2) * dt) > 1e-5:
        den = r1 - r2
        e1, e2 = cmath.exp(r1 * dt), cmath.exp(r2 * dt)
        ei1, ei2 = _expint(r1, dt), _expint(r2, dt)
        # f(M) = cm * M + ci * I with cm = (f1-f2)/(r1-r2), ci = (r1 f2 - r2 f1)/(r1-r2)
        pm, pi = (e1 - e2) / den, (r1 * e2 - r2 * e1) / den
        jm, ji = (ei1 - ei2) / den, (r1 * ei2 - r2 * ei1) / den
    else:
        # treat as a double eigenvalue r = a; then M = r I + N with N^2 = 0
        r = a
        er = cmath.exp(r * dt)
        i0 = _expint(r, dt)
        z = r * dt
        if abs(z) < 1e-4:
            # integral of s e^{r s}: dt^2 (1/2 + z/3 + z^2/8 + z^3/30 + ...)
            i1 = dt * dt * (0.5 + z * (1.0 / 3.0 + z * (0.125 + z / 30.0)))
        else:
            i1 = (dt * er - i0) / r
        pm, pi = er * dt, er * (1.0 - z)
        jm, ji = i1, i0 - r * i1
    phi_mat: Mat2 = (
        ((pm * m00 + pi).real, (pm * m01).real),
        ((pm * m10).real, (pm * m11 + pi).real),
    )
    j_mat: Mat2 = (
        ((jm * m00 + ji).real, (jm * m01).real),
        ((jm * m10).real, (jm * m11 + ji).real),
    )
    return phi_mat, j_mat


def observer_update(
    z1: float,
    z2: float,
    x_held: float,
    u: float,
    dt: float,
    g: ObserverGains,
    m: float,
    phi: float,
) -> tuple[float, float, float, float]:
    """One frozen-phi observer step; returns (z1', z2', w2~, w3~).

    Integrates z~' = M z~ + M L x + b_z u over dt with x and u held at the
    given constants, then back-transforms, w~ = z~' + L x_held.
    """
    M = observer_matrix(g, m, phi)
    ph, jj = zoh_discretize(M, dt)
    (p00, p01), (p10, p11) = ph
    (j00, j01), (j10, j11) = jj
    (a00, a01), (a10, a11) = M
    # forcing c = M L x + b_z u, held over the step
    c1 = (a00 * g.l1 + a01 * g.l2) * x_held + u / m
    c2 = (a10 * g.l1 + a11 * g.l2) * x_held
    z1n = p00 * z1 + p01 * z2 + j00 * c1 + j01 * c2
    z2n = p10 * z1 + p11 * z2 + j10 * c1 + j11 * c2
    return z1n, z2n, z1n + g.l1 * x_held, z2n + g.l2 * x_held


@dataclass(frozen=True)
class ObserverState:
    """Observer memory between samples.

    z_tilde is the transformed estimate pair, ps the internal presliding
    replica feeding phi, x_int the running integral of w2~ (for the
    displacement-consistency error), t the current sample time and x_prev
    the previous displacement sample (None before the first step).
    """

    z_tilde: tuple[float, float] = (0.0, 0.0)
    ps: PreslidingState = PreslidingState()
    x_int: float = 0.0
    t: float = 0.0
    x_prev: float | None = None
    u_prev: float = 0.0


@dataclass(frozen=True)
class EstimateSample:
    """Estimates at one sample: velocity w2~ [m/s], force w3~ [N], phi used [N/m]."""

    t: float
    w2_tilde: float
    w3_tilde: float
    phi: float


def observer_step(
    st: ObserverState,
    x_meas: float,
    u: float,
    dt: float,
    g: ObserverGains,
    m: float,
    fp: FrictionParams,
    deadband: float = DEFAULT_DEADBAND,
) -> tuple[ObserverState, EstimateSample]:
    """Process one measured sample.

    The state carries the still-open hold interval: arriving at sample k,
    the step from k-1 to k is completed first (exact hold step with x held
    at the interval midpoint (x[k-1]+x[k])/2 and u at u[k-1], phi frozen at
    its value from the replica as of k-1), then the estimate at t_k is
    emitted as z~ + L x[k]. Holding the midpoint removes the O(l1 dt/2)
    velocity bias of a start-of-interval hold. The presliding replica then
    advances with the measured displacement increment, using sign(w2~)
    through the deadband for reversal detection, and the velocity integral
    accumulates.
    """
    if math.isnan(x_meas) or math.isnan(u) or math.isnan(dt):
        raise ValueError("NaN input to observer_step")
    sob = fp.sigma / fp.beta
    if not (g.l1 > 0.0 and g.l2 < sob):
        raise ValueError(
            f"gains (l1={g.l1!r}, l2={g.l2!r}) violate l1 > 0, l2 < sigma/beta = {sob!r}"
        )
    phi = coulomb_stiffness(st.ps, fp) + sob
    z1, z2 = st.z_tilde
    if st.x_prev is None:
        dx = 0.0
    else:
        dx = x_meas - st.x_prev
        z1, z2, _, _ = observer_update(
            z1, z2, 0.5 * (st.x_prev + x_meas), st.u_prev, dt, g, m, phi
        )
    w2 = z1 + g.l1 * x_meas
    w3 = z2 + g.l2 * x_meas
    ps = update_presliding(st.ps, dx, deadband_sign(w2, deadband), st.t, fp)
    new_state = ObserverState(
        z_tilde=(z1, z2),
        ps=ps,
        x_int=st.x_int + w2 * dt,
        t=st.t + dt,
        x_prev=x_meas,
        u_prev=u,
    )
    return new_state, EstimateSample(st.t, w2, w3, phi)


def run_observer(
    measured: Measured,
    g: ObserverGains,
    m: float,
    fp: FrictionParams,
    deadband: float = DEFAULT_DEADBAND,
) -> list[EstimateSample]:
    """Fold the observer over a measured sequence from zero initial state.

    The time grid must be uniform; a non-uniform gap raises GridError naming
    the offending row. An empty sequence yields an empty list.
    """
    n = len(measured)
    if n == 0:
        return []
    t = np.asarray(measured.t, dtype=float)
    if n >= 2:
        dt = float(t[1] - t[0])
        if dt <= 0:
            raise GridError(1, f"non-increasing time at row 1: t = {t[1]!r}")
        gaps = np.diff(t)
        bad = np.nonzero(np.abs(gaps - dt) > max(1e-12, 1e-6 * dt))[0]
        if len(bad):
            k = int(bad[0]) + 1
            raise GridError(k, f"non-uniform grid at row {k}: gap {gaps[bad[0]]!r}, expected {dt!r}")
    else:
        dt = 0.0  # single sample: no integration step needed, but emit one estimate
    x = measured.x.tolist()
    u = measured.u.tolist()
    st = ObserverState(t=float(t[0]))
    out: list[EstimateSample] = []
    for k in range(n):
        st, est = observer_step(st, x[k], u[k], dt, g, m, fp, deadband)
        out.append(est)
    return out


# ---------------------------------------------------------------------------
# error metrics
# ---------------------------------------------------------------------------

def rms(a: np.ndarray) -> float:
    """Root-mean-square of a sequence; 0.0 for an empty one."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(a * a)))


def integrated_velocity(w2: np.ndarray, dt: float) -> np.ndarray:
    """Rectangle-rule running integral of the velocity estimate on its own grid."""
    return np.cumsum(np.asarray(w2, dtype=float)) * dt


def e_obs_series(x_meas: np.ndarray, w2: np.ndarray, dt: float) -> np.ndarray:
    """Displacement-consistency error x - x(0) - integral of w2~.

    Matches ObserverState.x_int sample for sample (the integral includes
    the current estimate).
    """
    x_meas = np.asarray(x_meas, dtype=float)
    return (x_meas - x_meas[0]) - integrated_velocity(w2, dt)


@dataclass(frozen=True)
class ErrorMetrics:
    """Model-consistency and observer-consistency displacement errors."""

    e_model: np.ndarray
    e_obs: np.ndarray
    rms_model: float
    rms_obs: float


def error_metrics(
    measured: Measured,
    estimates: list[EstimateSample],
    model: Trajectory,
) -> ErrorMetrics:
    """e_model = x - x_model (open-loop nominal prediction), e_obs = x - x(0) - int(w2~).

    All three sequences must share the grid; mismatched lengths or
    timestamps raise ValueError.
    """
    n = len(measured)
    if len(estimates) != n or len(model) != n:
        raise ValueError(
            f"length mismatch: measured {n}, estimates {len(estimates)}, model {len(model)}"
        )
    if n == 0:
        empty = np.array([])
        return ErrorMetrics(empty, empty, 0.0, 0.0)
    t_est = np.array([e.t for e in estimates])
    tol = max(1e-9, 1e-9 * float(np.max(np.abs(measured.t))))
    if np.any(np.abs(measured.t - t_est) > tol) or np.any(np.abs(measured.t - model.t) > tol):
        raise ValueError("grid mismatch between measured, estimates and model sequences")
    e_model = measured.x - model.x
    if n >= 2:
        dt = float(measured.t[1] - measured.t[0])
    else:
        dt = 0.0
    w2 = np.array([e.w2_tilde for e in estimates])
    e_obs = e_obs_series(measured.x, w2, dt)
    return ErrorMetrics(e_model, e_obs, rms(e_model), rms(e_obs))
