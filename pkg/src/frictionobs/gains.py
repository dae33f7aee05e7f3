"""Observer gain design and robustness checks.

The error dynamics of the reduced-order observer have the characteristic
polynomial

    lam^2 + L1*lam + (sob + phi - L2)/m = 0

where phi = dF_c/dx is the presliding stiffness (0 in gross sliding, up to
kappa in presliding) and sob = sigma/beta is the viscous-lag contribution.
Placing the poles at a chosen (lam1, lam2) for phi = 0 gives

    L1 = -(lam1 + lam2),   L2 = sob - m * lam1 * lam2.

Robustness over the whole stiffness range phi in [0, kappa] requires

    (a) L1 > 0
    (b) L1 > 2*sqrt((kappa + sob - L2)/m)   (poles stay real)
    plus L2 < sob so the zero-order coefficient stays positive at phi = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ObserverGains:
    """Correction gains: l1 [1/s] on the velocity state, l2 [N/m] on the force state."""

    l1: float
    l2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.l1) and math.isfinite(self.l2)):
            raise ValueError("gains must be finite")


@dataclass(frozen=True)
class RobustReport:
    """Outcome of validate_robust over phi in [0, kappa].

    worst_discriminant is the characteristic discriminant at phi = kappa
    (it decreases monotonically in phi); lam1_range / lam2_range are the
    real-part intervals of the two poles over the sweep.
    """

    cond_a: bool
    cond_b: bool
    cond_stab: bool
    worst_discriminant: float
    lam1_range: tuple[float, float]
    lam2_range: tuple[float, float]

    @property
    def passed(self) -> bool:
        return self.cond_a and self.cond_b and self.cond_stab


def char_poly(g: ObserverGains, m: float, phi: float, sob: float) -> tuple[float, float]:
    """Coefficients (c1, c0) of lam^2 + c1*lam + c0 for the error dynamics."""
    if m <= 0:
        raise ValueError(f"m must be > 0, got {m!r}")
    return g.l1, (sob + phi - g.l2) / m


def eigenvalues(g: ObserverGains, m: float, phi: float, sob: float) -> tuple[complex, complex]:
    """Error-dynamics poles, fast one first when real.

    lam = (-L1 +- sqrt(L1^2 + (4/m)(L2 - phi - sob))) / 2; the pair is
    complex when the discriminant is negative (imaginary parts then carry
    the oscillation frequency).
    """
    c1, c0 = char_poly(g, m, phi, sob)
    disc = c1 * c1 - 4.0 * c0
    if disc >= 0.0:
        r = math.sqrt(disc)
        return complex((-c1 - r) / 2.0, 0.0), complex((-c1 + r) / 2.0, 0.0)
    s = math.sqrt(-disc)
    return complex(-c1 / 2.0, -s / 2.0), complex(-c1 / 2.0, s / 2.0)


def design_gains(poles: tuple[float, float], m: float, sob: float = 0.0) -> ObserverGains:
    """Gains placing the phi = 0 poles at the requested real pair.

    Both poles must be real, finite and strictly negative.
    """
    lam1, lam2 = poles
    for lam in (lam1, lam2):
        if isinstance(lam, complex):
            raise ValueError("poles must be real")
        if not (math.isfinite(lam) and lam < 0):
            raise ValueError(f"poles must be finite and < 0, got {lam!r}")
    if m <= 0:
        raise ValueError(f"m must be > 0, got {m!r}")
    l1 = -(lam1 + lam2)
    l2 = sob - m * (lam1 * lam2)
    return ObserverGains(l1, l2)


def _phi_sweep(kappa: float) -> np.ndarray:
    """0 plus 100 log-spaced samples up to kappa (endpoints included)."""
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa!r}")
    if kappa == 0.0:
        return np.array([0.0])
    return np.concatenate(([0.0], np.geomspace(kappa * 1e-6, kappa, 100)))


def validate_robust(g: ObserverGains, m: float, sob: float, kappa: float) -> RobustReport:
    """Check the realness/stability conditions over the stiffness range.

    cond_a: L1 > 0; cond_b: L1 > 2*sqrt((kappa + sob - L2)/m) (vacuous when
    the argument is negative); cond_stab: L2 < sob. The pole ranges come
    from a sweep of 0 plus 100 log-spaced phi samples up to kappa.
    """
    if m <= 0:
        raise ValueError(f"m must be > 0, got {m!r}")
    if sob < 0:
        raise ValueError(f"sob must be >= 0, got {sob!r}")
    cond_a = g.l1 > 0.0
    arg = (kappa + sob - g.l2) / m
    cond_b = True if arg < 0.0 else g.l1 > 2.0 * math.sqrt(arg)
    cond_stab = g.l2 < sob

    phis = _phi_sweep(kappa)
    disc = g.l1 * g.l1 + (4.0 / m) * (g.l2 - phis - sob)
    roots = np.sqrt(disc.astype(complex))
    lam1 = (-g.l1 - roots) / 2.0
    lam2 = (-g.l1 + roots) / 2.0
    worst = g.l1 * g.l1 + (4.0 / m) * (g.l2 - kappa - sob)
    return RobustReport(
        cond_a=cond_a,
        cond_b=cond_b,
        cond_stab=cond_stab,
        worst_discriminant=float(worst),
        lam1_range=(float(lam1.real.min()), float(lam1.real.max())),
        lam2_range=(float(lam2.real.min()), float(lam2.real.max())),
    )
