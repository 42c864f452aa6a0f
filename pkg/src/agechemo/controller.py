"""Saturated two-degrees-of-freedom output controller with adaptation.

The control law reads only the measured output, the reference trajectory,
and its own observer state.  It never sees model parameters, age profiles,
or the equilibrium dilution rate; the second observer component adapts to
that unknown equilibrium value online.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveOutput
from .grid import rk4_step
from .trajectories import Trajectory


@dataclass(frozen=True)
class ControllerGains:
    gamma: float
    l1: float
    l2: float
    z0: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.gamma <= 0 or self.l1 <= 0 or self.l2 <= 0:
            raise ValueError("gamma, l1, l2 must be positive")


@dataclass(frozen=True)
class ControlSample:
    d_ff: float
    d_fb: float
    d_applied: float
    saturated: bool
    log_error: float


def saturate(v: float, lo: float, hi: float) -> float:
    if lo >= hi:
        raise ValueError("saturation interval needs lo < hi")
    return min(hi, max(lo, v))


def control(
    y: float,
    traj: Trajectory,
    gains: ControllerGains,
    z: np.ndarray,
    t: float,
    d_min: float,
    d_max: float,
) -> ControlSample:
    """Feedforward from the reference rate plus proportional-adaptive feedback."""
    if y <= 0:
        raise NonPositiveOutput("measured output y = %g <= 0 at t = %g" % (y, t))
    y_ref = float(traj.eval(t))
    d_ff = -float(traj.rate(t))
    log_error = math.log(y / y_ref)
    d_fb = float(z[1]) + gains.gamma * log_error
    raw = d_ff + d_fb
    d_applied = saturate(raw, d_min, d_max)
    return ControlSample(d_ff, d_fb, d_applied, raw < d_min or raw > d_max, log_error)


def observer_rhs(
    z: np.ndarray, log_error: float, d_ff: float, d_applied: float, gains: ControllerGains
) -> np.ndarray:
    """Right-hand side of the adaptation observer.

    dz1 = -l1 z1 + z2 + l1 log_error + d_ff - d_applied
    dz2 = -l2 z1 + l2 log_error
    """
    z1, z2 = float(z[0]), float(z[1])
    return np.array(
        [
            -gains.l1 * z1 + z2 + gains.l1 * log_error + d_ff - d_applied,
            -gains.l2 * z1 + gains.l2 * log_error,
        ]
    )


def observer_step(
    z: np.ndarray,
    y: float,
    traj: Trajectory,
    d_applied: float,
    gains: ControllerGains,
    t: float,
    dt: float,
) -> np.ndarray:
    """Advance the observer one step, holding y and d_applied over [t, t+dt]."""
    if dt <= 0:
        raise ValueError("dt must be positive")

    def f(tau, zz):
        y_ref = float(traj.eval(tau))
        d_ff = -float(traj.rate(tau))
        return observer_rhs(zz, math.log(y / y_ref), d_ff, d_applied, gains)

    return rk4_step(f, t, np.asarray(z, dtype=float), dt)


def observer_matrix(gains: ControllerGains) -> np.ndarray:
    """The linear part of the observer dynamics (Hurwitz for positive gains)."""
    return np.array([[-gains.l1, 1.0], [-gains.l2, 0.0]])
