"""Exact solution route through the equivalent delay model.

The age-structured PDE is parameterized by a scalar log-scale coordinate
driven by the input and an autonomous internal coordinate psi governed by a
renewal integral equation.  psi is advanced through the equivalent delay
differential equation

    dpsi/dt = kt(0) psi(t) - kt(A) psi(t-A) + int_0^A kt'(a) psi(t-a) da

with classical fourth-order stepping and cubic-Hermite history
interpolation, which avoids the implicit endpoint of the integral form;
the integral identity is kept as a verification invariant instead.

Everything the input does to the plant acts through the scalar coordinate
only, so psi histories are bit-for-bit independent of the applied dilution
sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerGains, saturate
from .errors import HistoryGap, InvalidIC, LogDomain
from .grid import GridFunction, cumquad4, fd4, hermite_resample, simpson_weights
from .model import Equilibrium, ModelParams, check_initial_condition
from .trajectories import Trajectory

_EDGE_TOL = 1e-9


class HistoryBuffer:
    """Uniformly sampled scalar history with cubic Hermite evaluation.

    Stores (value, derivative) pairs at t0 + i*dt.  Queries clamp to the
    last stored segment, so evaluation a fraction of a step beyond the
    newest node extrapolates that segment's cubic (needed by the stage
    evaluations of the explicit stepper).
    """

    def __init__(self, t0: float, dt: float, capacity: int = 1024):
        self.t0 = t0
        self.dt = dt
        self.val = np.zeros(capacity)
        self.der = np.zeros(capacity)
        self.size = 0

    @property
    def t_last(self) -> float:
        return self.t0 + (self.size - 1) * self.dt

    def append(self, value: float, deriv: float):
        if self.size == len(self.val):
            self.val = np.concatenate([self.val, np.zeros(len(self.val))])
            self.der = np.concatenate([self.der, np.zeros(len(self.der))])
        self.val[self.size] = value
        self.der[self.size] = deriv
        self.size += 1

    def fill_initial(self, values: np.ndarray, derivs: np.ndarray):
        n = len(values)
        while len(self.val) < n:
            self.val = np.concatenate([self.val, np.zeros(len(self.val))])
            self.der = np.concatenate([self.der, np.zeros(len(self.der))])
        self.val[:n] = values
        self.der[:n] = derivs
        self.size = n

    def covers(self, t: float) -> bool:
        return self.t0 - _EDGE_TOL <= t <= self.t_last + self.dt + _EDGE_TOL

    def eval(self, t):
        """Cubic Hermite evaluation at scalar or vector times."""
        t = np.asarray(t, dtype=float)
        if t.size and (t.min() < self.t0 - _EDGE_TOL or t.max() > self.t_last + self.dt + _EDGE_TOL):
            raise HistoryGap(
                "query range [%g, %g] outside history [%g, %g]"
                % (t.min(), t.max(), self.t0, self.t_last)
            )
        u = (t - self.t0) / self.dt
        i = np.clip(np.floor(u).astype(int), 0, self.size - 2)
        th = u - i
        h00 = (1 + 2 * th) * (1 - th) ** 2
        h10 = th * (1 - th) ** 2
        h01 = th * th * (3 - 2 * th)
        h11 = th * th * (th - 1)
        return (
            h00 * self.val[i]
            + h10 * self.dt * self.der[i]
            + h01 * self.val[i + 1]
            + h11 * self.dt * self.der[i + 1]
        )

    def node_values(self) -> np.ndarray:
        return self.val[: self.size].copy()


@dataclass
class _PsiDynamics:
    """Precomputed grid data for the delay equation right-hand side."""

    nodes: np.ndarray
    weights: np.ndarray
    k_tilde: np.ndarray
    k_tilde_prime: np.ndarray
    g: np.ndarray
    a_max: float

    @staticmethod
    def build(eq: Equilibrium, params: ModelParams) -> "_PsiDynamics":
        return _PsiDynamics(
            nodes=params.nodes,
            weights=params.weights,
            k_tilde=eq.k_tilde.values,
            k_tilde_prime=eq.k_tilde_prime.values,
            g=eq.g.values,
            a_max=params.a_max,
        )


@dataclass
class DelayState:
    """Mutable closed-loop state: scalar coordinate, observer pair, history."""

    eta: float
    z: np.ndarray
    t: float
    buffer: HistoryBuffer
    dyn: _PsiDynamics = field(repr=False)

    def clone(self) -> "DelayState":
        b = HistoryBuffer(self.buffer.t0, self.buffer.dt, capacity=len(self.buffer.val))
        b.val[:] = self.buffer.val
        b.der[:] = self.buffer.der
        b.size = self.buffer.size
        return DelayState(self.eta, self.z.copy(), self.t, b, self.dyn)

    def window(self, t: float | None = None) -> np.ndarray:
        """psi(t - a) on the age grid."""
        tt = self.t if t is None else t
        return self.buffer.eval(tt - self.dyn.nodes)


def pi_weight(eq: Equilibrium, params: ModelParams) -> GridFunction:
    """Reproductive-value weight: pi(a) = int_a^A k(s) e^{d*(a-s) + int_s^a mu} ds.

    Computed as the tail integral of the normalized kernel divided by the
    survival factor; pi(A) = 0 and pi(0) equals the renewal integral, one.
    """
    kt = eq.k_tilde.values
    prefix = cumquad4(kt, params.h)
    tail = prefix[-1] - prefix
    survival = params.survival(eq.d_star)
    return GridFunction(tail / survival, params.a_max, positive=True)


def pi_functional(f: GridFunction, eq: Equilibrium, params: ModelParams) -> float:
    """Pi(f) = <pi, f> / <pi, x*>; linear in f, Pi(x*) = 1."""
    pi = pi_weight(eq, params)
    w = params.weights
    denom = float(w @ (pi.values * eq.x_star.values))
    return float(w @ (pi.values * f.values)) / denom


def _psi_rhs(dyn: _PsiDynamics, buffer: HistoryBuffer, tau: float, psi_now: float) -> float:
    window = buffer.eval(tau - dyn.nodes)
    window[0] = psi_now
    boundary = dyn.k_tilde[0] * psi_now - dyn.k_tilde[-1] * buffer.eval(tau - dyn.a_max)
    return float(boundary + dyn.weights @ (dyn.k_tilde_prime * window))


def init_delay_state(
    x0: GridFunction,
    traj: Trajectory,
    eq: Equilibrium,
    z0: tuple[float, float],
    params: ModelParams,
    dt: float,
) -> DelayState:
    """Split an admissible initial profile into (eta0, psi0) and fill the history.

    psi0 is resampled onto the buffer grid with cubic Hermite interpolation
    and re-centered so that its discrete tail-weighted mean vanishes; the
    centering constant is absorbed into eta0, leaving the represented
    profile unchanged.  The recentering pins the conserved functional of
    the renewal dynamics to zero at machine precision, which is what drives
    psi to zero instead of a spurious constant.
    """
    if not check_initial_condition(x0, params):
        raise InvalidIC("x0 is not positive and boundary-compatible")
    y_ref0 = float(traj.eval(0.0))
    if y_ref0 <= 0:
        raise InvalidIC("reference must be positive at t = 0")
    n_hist = int(round(params.a_max / dt))
    if abs(n_hist * dt - params.a_max) > 1e-9 * params.a_max:
        raise ValueError("dt must divide a_max; got dt=%g, a_max=%g" % (dt, params.a_max))

    big_pi = pi_functional(x0, eq, params)
    psi0 = x0.values / (eq.x_star.values * big_pi) - 1.0

    ages = np.linspace(0.0, params.a_max, n_hist + 1)
    psi0_b = hermite_resample(params.nodes, psi0, ages)

    # discrete tail-weighted mean on the buffer grid
    kt_prefix = cumquad4(eq.k_tilde.values, params.h)
    tail = kt_prefix[-1] - kt_prefix
    tail_b = hermite_resample(params.nodes, tail, ages)
    if n_hist % 2 == 0:
        wb = simpson_weights(n_hist + 1, dt)
    else:
        wb = np.full(n_hist + 1, dt)
        wb[0] *= 0.5
        wb[-1] *= 0.5
    c0 = float(wb @ (tail_b * psi0_b)) / float(wb @ tail_b)
    psi0_b = (1.0 + psi0_b) / (1.0 + c0) - 1.0
    eta0 = math.log(big_pi / y_ref0) + math.log1p(c0)

    buffer = HistoryBuffer(-params.a_max, dt, capacity=n_hist + 1024)
    hist_vals = psi0_b[::-1].copy()
    buffer.fill_initial(hist_vals, fd4(hist_vals, dt))
    dyn = _PsiDynamics.build(eq, params)
    buffer.der[n_hist] = _psi_rhs(dyn, buffer, 0.0, buffer.val[n_hist])
    return DelayState(eta=eta0, z=np.asarray(z0, dtype=float), t=0.0, buffer=buffer, dyn=dyn)


def step_psi(state: DelayState, dt: float):
    """Advance the internal coordinate one step; input-independent by design."""
    buf = state.buffer
    if abs(dt - buf.dt) > 1e-12 * buf.dt:
        raise ValueError("dt must equal the buffer step %g" % buf.dt)
    t = buf.t_last
    if not buf.covers(t - state.dyn.a_max):
        raise HistoryGap("history does not span one full age window")
    v = buf.val[buf.size - 1]
    k1 = buf.der[buf.size - 1]
    k2 = _psi_rhs(state.dyn, buf, t + 0.5 * dt, v + 0.5 * dt * k1)
    k3 = _psi_rhs(state.dyn, buf, t + 0.5 * dt, v + 0.5 * dt * k2)
    k4 = _psi_rhs(state.dyn, buf, t + dt, v + dt * k3)
    v_new = v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    d_new = _psi_rhs(state.dyn, buf, t + dt, v_new)
    buf.append(v_new, d_new)


def _delta_at(state: DelayState, tau: float) -> float:
    window = state.buffer.eval(tau - state.dyn.nodes)
    arg = 1.0 + float(state.dyn.weights @ (state.dyn.g * window))
    if arg <= 0:
        raise LogDomain("1 + <g, psi window> = %g <= 0 at t = %g" % (arg, tau))
    return math.log(arg)


def delta(state: DelayState, eq: Equilibrium) -> float:
    """Logarithmic output mismatch contributed by the internal coordinate."""
    return _delta_at(state, state.t)


def ide_residual(state: DelayState, t: float) -> float:
    """|psi(t) - int_0^A kt(a) psi(t-a) da|, the renewal identity defect."""
    window = state.buffer.eval(t - state.dyn.nodes)
    lhs = float(state.buffer.eval(t))
    return abs(lhs - float(state.dyn.weights @ (state.dyn.k_tilde * window)))


def step_closed_loop(
    state: DelayState,
    traj: Trajectory,
    eq: Equilibrium,
    gains: ControllerGains,
    params: ModelParams,
    dt: float,
    d_override=None,
) -> float:
    """One synchronized step of (psi, eta, z); returns the applied dilution at t.

    psi advances first (it never reads the other states), then the
    controlled scalar/observer block integrates with the internal
    coordinate's contribution evaluated at the stage times.
    """
    t = state.t
    step_psi(state, dt)
    d_t = _delta_at(state, t)
    d_half = _delta_at(state, t + 0.5 * dt)
    d_full = _delta_at(state, t + dt)

    def applied(tau: float, u: np.ndarray, dlt: float) -> float:
        if d_override is not None:
            return float(d_override(tau))
        rate = float(traj.rate(tau))
        return saturate(u[2] - rate + gains.gamma * (u[0] + dlt), params.d_min, params.d_max)

    def rhs(tau: float, u: np.ndarray, dlt: float) -> np.ndarray:
        eta, z1, z2 = u
        rate = float(traj.rate(tau))
        d_app = applied(tau, u, dlt)
        mism = z1 - eta - dlt
        return np.array(
            [
                eq.d_star - rate - d_app,
                z2 - rate - d_app - gains.l1 * mism,
                -gains.l2 * mism,
            ]
        )

    u = np.array([state.eta, state.z[0], state.z[1]])
    d_applied = applied(t, u, d_t)
    k1 = rhs(t, u, d_t)
    k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1, d_half)
    k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2, d_half)
    k4 = rhs(t + dt, u + dt * k3, d_full)
    u = u + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    state.eta = float(u[0])
    state.z = u[1:].copy()
    state.t = t + dt
    return d_applied


def reconstruct(
    state: DelayState, traj: Trajectory, eq: Equilibrium, t: float | None = None
) -> tuple[GridFunction, float]:
    """Rebuild the age profile and output from the delay coordinates."""
    tt = state.t if t is None else t
    window = state.window(tt)
    y_ref = float(traj.eval(tt))
    scale = y_ref * math.exp(state.eta if t is None else _eta_interp(state, tt))
    profile = eq.x_star.values * scale * (1.0 + window)
    y = scale * (1.0 + float(state.dyn.weights @ (state.dyn.g * window)))
    return GridFunction(profile, state.dyn.a_max, positive=bool(np.all(profile > 0))), y


def _eta_interp(state: DelayState, t: float) -> float:
    if abs(t - state.t) > _EDGE_TOL:
        raise HistoryGap("eta is only available at the current time %g" % state.t)
    return state.eta


@dataclass
class OracleTrace:
    """Per-step record of a delay-route run plus the full psi history."""

    t: np.ndarray
    eta: np.ndarray
    delta: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    d: np.ndarray
    y: np.ndarray
    log_error: np.ndarray
    snapshots: dict
    buffer: HistoryBuffer
    nodes: np.ndarray
    weights: np.ndarray
    g: np.ndarray
    k_tilde: np.ndarray

    def window(self, t: float) -> np.ndarray:
        return self.buffer.eval(t - self.nodes)

    def ide_residual(self, t: float) -> float:
        window = self.window(t)
        return abs(float(self.buffer.eval(t)) - float(self.weights @ (self.k_tilde * window)))

    CSV_COLUMNS = ("t", "eta", "delta", "z1", "z2", "D", "y", "log_error")

    def rows(self):
        for i in range(len(self.t)):
            yield (
                self.t[i],
                self.eta[i],
                self.delta[i],
                self.z1[i],
                self.z2[i],
                self.d[i],
                self.y[i],
                self.log_error[i],
            )


def simulate_closed_loop(
    x0: GridFunction,
    traj: Trajectory,
    eq: Equilibrium,
    gains: ControllerGains,
    params: ModelParams,
    t_final: float,
    dt: float,
    snapshot_times: tuple[float, ...] = (),
    d_override=None,
) -> OracleTrace:
    """Run the controlled delay model and record the trace.

    ``d_override``, a callable t -> D, replaces the feedback loop for
    open-loop experiments; the observer still integrates with the applied
    input.
    """
    state = init_delay_state(x0, traj, eq, gains.z0, params, dt)
    n_steps = int(round(t_final / dt))
    n1 = n_steps + 1
    out = {k: np.zeros(n1) for k in ("eta", "delta", "z1", "z2", "d", "y")}
    ts = dt * np.arange(n1)
    snap_idx = {int(round(s / dt)): float(s) for s in snapshot_times}
    snapshots = {}

    def record(i: int, d_applied: float | None):
        dlt = _delta_at(state, state.t)
        out["eta"][i] = state.eta
        out["delta"][i] = dlt
        out["z1"][i] = state.z[0]
        out["z2"][i] = state.z[1]
        y = float(traj.eval(state.t)) * math.exp(state.eta + dlt)
        out["y"][i] = y
        if d_applied is None:
            if d_override is not None:
                d_applied = float(d_override(state.t))
            else:
                rate = float(traj.rate(state.t))
                d_applied = saturate(
                    state.z[1] - rate + gains.gamma * (state.eta + dlt),
                    params.d_min,
                    params.d_max,
                )
        out["d"][i] = d_applied
        if i in snap_idx:
            profile, _ = reconstruct(state, traj, eq)
            snapshots[snap_idx[i]] = profile

    record(0, None)
    for i in range(n_steps):
        d_applied = step_closed_loop(state, traj, eq, gains, params, dt, d_override)
        out["d"][i] = d_applied  # the input actually applied over [t, t+dt)
        record(i + 1, None)

    return OracleTrace(
        t=ts,
        eta=out["eta"],
        delta=out["delta"],
        z1=out["z1"],
        z2=out["z2"],
        d=out["d"],
        y=out["y"],
        log_error=out["eta"] + out["delta"],
        snapshots=snapshots,
        buffer=state.buffer,
        nodes=params.nodes,
        weights=params.weights,
        g=eq.g.values,
        k_tilde=eq.k_tilde.values,
    )
