"""Presliding-hysteresis friction with a first-order viscous lag.

The friction force on the moving body is the sum of two terms:

* a Coulomb term F_c that, while the contact is in presliding, traverses
  smooth hysteresis branches built from the normalized virgin curve
  f0(z) = z*(1 - ln|z|) on 0 < |z| <= 1, and saturates at +-c_f in gross
  sliding once |z| reaches 1;
* a viscous term F_v that relaxes toward sigma*v with time constant beta
  (first-order frictional lag), integrated exactly per step.

The presliding coordinate is z = s_scale * integral of v since the last
velocity reversal. Each reversal spawns a new branch: the normalized force
level at the reversal instant is memorized as f_r, z restarts from zero,
and the branch is the rescaled virgin curve

    f_p(z) = |dir - f_r| * f0(z) + f_r

which runs from f_r at z = 0 to dir (i.e. +-1) at z = dir. Saturation at
|z| >= 1 erases the branch memory, so the next reversal starts from +-1.

The branch slope diverges like -ln|z| as z -> 0, so stiffness queries clip
|z| from below at z_floor and cap the result at kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Module defaults; both are overridable at call sites.
DEFAULT_Z_FLOOR = 1e-4
DEFAULT_DEADBAND = 1e-4  # reversal detection deadband on v [m/s]


def default_kappa(c_f: float, s_scale: float, z_floor: float = DEFAULT_Z_FLOOR) -> float:
    """Largest stiffness the clipped branch map can produce.

    With |z| clipped at z_floor and |dir - f_r| <= 2, the branch slope is
    bounded by 2 * s_scale * c_f * (-ln z_floor); capping at exactly this
    value makes the cap consistent with the clip.
    """
    return 2.0 * s_scale * c_f * (-math.log(z_floor))


@dataclass(frozen=True)
class FrictionParams:
    """Friction model parameters.

    Parameters
    ----------
    c_f : float
        Coulomb force level [N], > 0.
    sigma : float
        Viscous coefficient [N s/m], > 0.
    beta : float
        Time constant of the frictional lag [s], > 0.
    s_scale : float
        Scaling of the presliding coordinate, z = s_scale * x-travel [1/m], > 0.
    kappa : float, optional
        Cap on the presliding stiffness [N/m]. Defaults to
        ``default_kappa(c_f, s_scale, z_floor)`` and may not be set below it.
    z_floor : float
        Lower clip on |z| in stiffness/force branch evaluations, 0 < z_floor < 1.
    """

    c_f: float
    sigma: float
    beta: float
    s_scale: float
    kappa: float | None = None
    z_floor: float = DEFAULT_Z_FLOOR

    def __post_init__(self) -> None:
        for name in ("c_f", "sigma", "beta", "s_scale"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and > 0, got {val!r}")
        if not (0.0 < self.z_floor < 1.0):
            raise ValueError(f"z_floor must lie in (0, 1), got {self.z_floor!r}")
        floor_kappa = default_kappa(self.c_f, self.s_scale, self.z_floor)
        if self.kappa is None:
            object.__setattr__(self, "kappa", floor_kappa)
        else:
            if not (math.isfinite(self.kappa) and self.kappa >= floor_kappa * (1.0 - 1e-12)):
                raise ValueError(
                    f"kappa must be >= 2*s_scale*c_f*(-ln z_floor) = {floor_kappa!r}, "
                    f"got {self.kappa!r}"
                )

    def beta_ok(self, m: float, margin: float = 10.0) -> bool:
        """True if the lag constant is well below the mechanical one, beta << m/sigma.

        "Well below" means beta * margin <= m / sigma.
        """
        if not (math.isfinite(m) and m > 0):
            raise ValueError(f"mass must be finite and > 0, got {m!r}")
        return 0.0 < self.beta * self.sigma * margin <= m


@dataclass(frozen=True)
class PreslidingState:
    """Hysteresis state of the Coulomb term.

    z is the normalized presliding coordinate since the last reversal, f_r
    the normalized force level memorized at that reversal, dir the branch
    direction (0 before any motion), saturated marks gross sliding, and t_r
    is the time of the last reversal.
    """

    z: float = 0.0
    f_r: float = 0.0
    dir: int = 0
    saturated: bool = False
    t_r: float = 0.0


@dataclass(frozen=True)
class FrictionState:
    """Total friction state: hysteresis branch plus lagged viscous force [N]."""

    presliding: PreslidingState = PreslidingState()
    f_v: float = 0.0


def f0_branch(z: float) -> float:
    """Normalized virgin branch f0(z) = z * (1 - ln|z|) on 0 < |z| <= 1.

    Odd, strictly increasing, with f0(+-1) = +-1. Callers clip |z| from
    below at z_floor; z = 0 and |z| > 1 are domain errors.
    """
    if math.isnan(z):
        raise ValueError("z is NaN")
    if z == 0.0 or abs(z) > 1.0:
        raise ValueError(f"f0 branch needs 0 < |z| <= 1, got {z!r}")
    return z * (1.0 - math.log(abs(z)))


def presliding_force(z: float, f_r: float, dir: int) -> float:
    """Normalized branch force |dir - f_r| * f0(z) + f_r.

    Runs from f_r at z -> 0 to dir at z = dir. Same domain errors as
    ``f0_branch``; requires |f_r| <= 1 and dir in {-1, +1}.
    """
    if dir not in (-1, 1):
        raise ValueError(f"dir must be -1 or +1, got {dir!r}")
    if math.isnan(f_r) or abs(f_r) > 1.0:
        raise ValueError(f"f_r must lie in [-1, 1], got {f_r!r}")
    return abs(dir - f_r) * f0_branch(z) + f_r


def _normalized_coulomb(ps: PreslidingState, z_floor: float) -> float:
    """Current normalized Coulomb level of a state, clipped into [-1, 1].

    Saturated states sit at dir. A state that never moved (dir == 0) sits at
    f_r. Otherwise the branch is evaluated at z clipped away from zero.
    """
    if ps.saturated:
        return float(ps.dir)
    if ps.dir == 0:
        return ps.f_r
    z = ps.z
    if z == 0.0:
        zc = ps.dir * z_floor  # branch just spawned, evaluate on its own side
    else:
        zc = math.copysign(min(max(abs(z), z_floor), 1.0), z)
    fp = presliding_force(zc, ps.f_r, ps.dir)
    return min(1.0, max(-1.0, fp))


def coulomb_force(ps: PreslidingState, p: FrictionParams, v_sign: int = 0) -> float:
    """Coulomb term F_c [N]: c_f * branch level in presliding, c_f * sign(v) saturated.

    v_sign is the sign of the velocity (0 inside the deadband); it only
    matters in the saturated regime, where a zero falls back to the stored
    branch direction. |F_c| <= c_f always.
    """
    if ps.saturated:
        s = v_sign if v_sign != 0 else ps.dir
        return p.c_f * float(s)
    return p.c_f * _normalized_coulomb(ps, p.z_floor)


def coulomb_stiffness(ps: PreslidingState, p: FrictionParams, v_sign: int = 0) -> float:
    """Displacement stiffness dF_c/dx [N/m] of the current branch, in [0, kappa].

    In presliding this is min(s_scale * c_f * |dir - f_r| * (-ln |z|), kappa)
    with |z| clipped at z_floor; zero when saturated (force locked at +-c_f).
    """
    if ps.saturated:
        return 0.0
    d = ps.dir if ps.dir != 0 else v_sign
    zc = min(max(abs(ps.z), p.z_floor), 1.0)
    val = p.s_scale * p.c_f * abs(d - ps.f_r) * max(0.0, -math.log(zc))
    return min(val, p.kappa)


def deadband_sign(v: float, deadband: float = DEFAULT_DEADBAND) -> int:
    """Sign of v seen through the reversal deadband: 0 when |v| <= deadband."""
    if v > deadband:
        return 1
    if v < -deadband:
        return -1
    return 0


def update_presliding(
    ps: PreslidingState,
    dx: float,
    v_sign: int,
    t: float,
    p: FrictionParams,
) -> PreslidingState:
    """Advance the hysteresis state by a displacement increment dx [m].

    v_sign is the deadband-filtered velocity sign driving reversal
    detection. A sign opposite to the stored branch direction (or the first
    nonzero sign from rest) is a reversal: the current normalized level is
    memorized as f_r, z restarts at zero, and the branch direction flips.
    z then advances by s_scale * dx. Reaching z * dir >= 1 saturates the
    branch and erases its memory (f_r <- dir).
    """
    z, f_r, d, sat, t_r = ps.z, ps.f_r, ps.dir, ps.saturated, ps.t_r
    if v_sign != 0 and v_sign != d:
        f_r = _normalized_coulomb(ps, p.z_floor)
        z = 0.0
        d = v_sign
        sat = False
        t_r = t
    if d != 0:
        z += p.s_scale * dx
        if z * d >= 1.0:
            z = float(d)
            sat = True
            f_r = float(d)
    return PreslidingState(z, f_r, d, sat, t_r)


def step_friction(
    st: FrictionState,
    v: float,
    dt: float,
    p: FrictionParams,
    t: float = 0.0,
    deadband: float = DEFAULT_DEADBAND,
) -> tuple[FrictionState, float]:
    """Advance the friction state one step and return (new state, total force [N]).

    The viscous lag is integrated exactly with v held over the step,
    F_v <- sigma*v + (F_v - sigma*v) * exp(-dt/beta). Reversals are detected
    from the deadband-filtered sign of v, the presliding coordinate advances
    by s_scale * v * dt, and the returned force is F_c + F_v at the end of
    the step.
    """
    if math.isnan(v) or math.isnan(dt) or math.isnan(t):
        raise ValueError("NaN input to step_friction")
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    target = p.sigma * v
    f_v = target + (st.f_v - target) * math.exp(-dt / p.beta)
    vs = deadband_sign(v, deadband)
    ps = update_presliding(st.presliding, v * dt, vs, t, p)
    f_c = coulomb_force(ps, p, vs)
    return FrictionState(ps, f_v), f_c + f_v
