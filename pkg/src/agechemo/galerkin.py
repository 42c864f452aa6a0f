"""Finite-order simulation route built on a spectral trial bank.

The trial functions are the initial profile, the equilibrium profile, and
real/imaginary parts of the slow eigenmodes of the population semigroup.
Those eigenmodes are exact solutions of the renewal characteristic equation

    int_0^A kt(a) e^{-s a} da = 1,

whose nontrivial roots come in complex-conjugate pairs with negative real
parts; the mode shapes are e^{-s a} x*(a).  With the equilibrium direction
and the eigen-directions inside the span, the modal system reproduces the
steady state and the dominant transients exactly, and the dilution input
enters as an exact scalar multiple of the identity.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerGains, control
from .errors import (
    DependentBasis,
    Instability,
    NonPositiveOutput,
    PositivityViolation,
    RootSearchExhausted,
)
from .grid import GridFunction, fd4, hermite_resample, simpson_weights
from .model import Equilibrium, ModelParams
from .trajectories import Trajectory

#: initial-guess box for the damped Newton search (omega upper edge 6*pi/A)
SIGMA_GUESSES = 15
OMEGA_GUESSES = 24
ROOT_RESIDUAL_TOL = 1e-8
GRAM_COND_LIMIT = 1e12

_DEDUP_DIST = 1e-4
_ALIAS_RESIDUAL_TOL = 5e-2


def _char_residual(s: complex, k_tilde: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> complex:
    with np.errstate(over="ignore", invalid="ignore"):
        val = complex(weights @ (k_tilde * np.exp(-s * nodes)))
    return val - 1.0


def _char_slope(s: complex, k_tilde: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> complex:
    with np.errstate(over="ignore", invalid="ignore"):
        return complex(weights @ (-nodes * k_tilde * np.exp(-s * nodes)))


def characteristic_roots(eq: Equilibrium, params: ModelParams, count: int) -> list[complex]:
    """Trivial root plus the count/2 - 1 conjugate pairs with largest real parts.

    Damped Newton from a grid of initial guesses.  The residual is evaluated
    on a four-fold refined quadrature (smooth resampling of the kernel), so
    the returned roots carry continuum accuracy rather than the native
    grid's oscillatory-quadrature shift; candidates are re-checked on the
    native grid to reject refinement aliases.
    """
    if count % 2 != 0 or count < 4:
        raise ValueError("count must be even and >= 4")
    kt = eq.k_tilde.values
    nodes, w = params.nodes, params.weights
    omega_cap = math.pi / (4 * params.h)

    n_fine = 4 * (params.mu.n - 1) + 1
    nodes_f = np.linspace(0.0, params.a_max, n_fine)
    kt_f = hermite_resample(nodes, kt, nodes_f)
    w_f = simpson_weights(n_fine, nodes_f[1] - nodes_f[0])

    found: list[complex] = []
    for sg in np.linspace(-6.0, 1.0, SIGMA_GUESSES):
        for wg in np.linspace(0.5, 6 * math.pi / params.a_max, OMEGA_GUESSES):
            s = complex(sg, wg)
            ok = False
            for _ in range(80):
                f = _char_residual(s, kt_f, nodes_f, w_f)
                if not np.isfinite(f.real) or not np.isfinite(f.imag):
                    break
                if abs(f) < 1e-13:
                    ok = True
                    break
                slope = _char_slope(s, kt_f, nodes_f, w_f)
                if slope == 0 or not np.isfinite(abs(slope)):
                    break
                step = f / slope
                lam = 1.0
                while lam > 1e-9:
                    f_try = _char_residual(s - lam * step, kt_f, nodes_f, w_f)
                    if np.isfinite(abs(f_try)) and abs(f_try) < abs(f):
                        break
                    lam *= 0.5
                s = s - lam * step
            if not ok:
                continue
            if s.imag <= 1e-6 or s.imag > omega_cap:
                continue
            if abs(_char_residual(s, kt, nodes, w)) > _ALIAS_RESIDUAL_TOL:
                continue  # not a root of the native-grid kernel: an alias
            if all(abs(s - r) >= _DEDUP_DIST for r in found):
                found.append(s)

    found.sort(key=lambda z: -z.real)
    pairs_needed = count // 2 - 1
    if len(found) < pairs_needed:
        raise RootSearchExhausted(
            "found %d conjugate pairs, need %d" % (len(found), pairs_needed)
        )
    roots: list[complex] = [0.0 + 0.0j]
    for s in found[:pairs_needed]:
        roots.extend([s, s.conjugate()])
    for r in roots:
        # the trivial root is pinned by the native-grid normalization (that
        # is where the equilibrium dilution rate was solved); nontrivial
        # roots were determined on the refined rule
        if r == 0:
            bad = abs(_char_residual(r, kt, nodes, w)) >= ROOT_RESIDUAL_TOL
        else:
            bad = abs(_char_residual(r, kt_f, nodes_f, w_f)) >= ROOT_RESIDUAL_TOL
        if bad:
            raise RootSearchExhausted("root %s failed the residual check" % r)
    return roots


@dataclass(frozen=True)
class GalerkinBasis:
    """Trial bank: x0, x*, then cosine/sine mode shapes per conjugate pair."""

    trials: list
    trial_matrix: np.ndarray = field(repr=False)
    derivative_matrix: np.ndarray = field(repr=False)
    roots: list
    n_modes: int


def build_basis(
    x0: GridFunction,
    eq: Equilibrium,
    roots: list[complex],
    n_modes: int,
    params: ModelParams,
) -> GalerkinBasis:
    """Assemble the trial functions and their derivatives at the nodes.

    Mode shapes use the envelope exponent -s (the eigen-shape of the root
    s), which also makes them exactly compatible with the non-local
    boundary condition in the continuum.  x0's derivative is the only one
    obtained by grid differentiation; its boundary-compatibility defect is
    reported as a warning, not enforced.
    """
    if n_modes % 2 != 0 or n_modes < 4:
        raise ValueError("n_modes must be even and >= 4")
    a = params.nodes
    xs = eq.x_star.values
    xs_prime = -(params.mu.values + eq.d_star) * xs
    rows = [x0.values, xs]
    drows = [fd4(x0.values, params.h), xs_prime]
    pairs = [r for r in roots if r.imag > 0]
    if len(pairs) < n_modes // 2 - 1:
        raise RootSearchExhausted("not enough conjugate pairs for n_modes = %d" % n_modes)
    for s in pairs[: n_modes // 2 - 1]:
        q = -s.real  # envelope growth rate
        om = abs(s.imag)
        env = np.exp(q * a)
        c, sn = np.cos(om * a), np.sin(om * a)
        rows.append(c * env * xs)
        drows.append(((q * c - om * sn) * env) * xs + (c * env) * xs_prime)
        rows.append(sn * env * xs)
        drows.append(((q * sn + om * c) * env) * xs + (sn * env) * xs_prime)
    Phi = np.asarray(rows)
    dPhi = np.asarray(drows)

    w = params.weights
    gram = (Phi * w) @ Phi.T
    scale = np.sqrt(np.diag(gram))
    corr = gram / np.outer(scale, scale)
    cond = float(np.linalg.cond(corr))
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        raise DependentBasis("trial Gram condition number %.3g exceeds %g" % (cond, GRAM_COND_LIMIT))

    bc_defect = abs(x0.values[0] - float(w @ (params.k.values * x0.values)))
    if bc_defect > 1e-6 * float(np.max(np.abs(x0.values))):
        warnings.warn(
            "initial profile violates the boundary condition by %.3g; "
            "the trial bank keeps it unmodified" % bc_defect,
            stacklevel=2,
        )
    trials = [GridFunction(r, params.a_max) for r in rows]
    return GalerkinBasis(trials, Phi, dPhi, list(roots), n_modes)


@dataclass
class GalerkinSystem:
    """Modal system: mass/stiffness matrices, output vector, current weights."""

    m_matrix: np.ndarray
    n_matrix: np.ndarray
    p_vector: np.ndarray
    lam: np.ndarray
    t: float
    a_matrix: np.ndarray = field(repr=False)


def assemble(basis: GalerkinBasis, params: ModelParams) -> GalerkinSystem:
    """Build M = <phi, phi^T>, N = -<phi, phi' + mu phi>, p = <p, phi>.

    M is factorized once: the modal flow matrix M^-1 N is cached since the
    dilution input enters as a scalar multiple of the identity.
    """
    Phi, dPhi = basis.trial_matrix, basis.derivative_matrix
    w = params.weights
    m = (Phi * w) @ Phi.T
    n_mat = -((Phi * w) @ dPhi.T + (Phi * (w * params.mu.values)) @ Phi.T)
    p_vec = (Phi * w) @ params.p.values
    try:
        np.linalg.cholesky(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise DependentBasis("mass matrix is not positive definite") from exc
    lam0 = np.zeros(len(Phi))
    lam0[0] = 1.0
    return GalerkinSystem(
        m_matrix=m,
        n_matrix=n_mat,
        p_vector=p_vec,
        lam=lam0,
        t=0.0,
        a_matrix=np.linalg.solve(m, n_mat),
    )


def residual(
    system: GalerkinSystem,
    basis: GalerkinBasis,
    params: ModelParams,
    d_applied: float,
    lam: np.ndarray | None = None,
) -> tuple[float, GridFunction]:
    """Transport-equation defect of the modal solution and its L2 norm.

    R = (phi')^T lam + phi^T [M^-1 N - I D] lam + (mu + D) phi^T lam; the
    applied dilution cancels identically, so the defect measures only how
    far the modal flow is from transporting the represented profile.
    """
    lam = system.lam if lam is None else lam
    prof_dot = basis.trial_matrix.T @ (system.a_matrix @ lam) - d_applied * (
        basis.trial_matrix.T @ lam
    )
    r_nodes = (
        basis.derivative_matrix.T @ lam
        + prof_dot
        + (params.mu.values + d_applied) * (basis.trial_matrix.T @ lam)
    )
    w = params.weights
    r_l2 = math.sqrt(max(float(w @ (r_nodes * r_nodes)), 0.0))
    return r_l2, GridFunction(r_nodes, params.a_max)


@dataclass
class GalerkinTrace:
    """Per-step record of a modal-route run."""

    t: np.ndarray
    y_sim: np.ndarray
    y_ref: np.ndarray
    d: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    r: np.ndarray
    min_profile: np.ndarray
    profile_l2: np.ndarray
    lam: np.ndarray
    snapshots: dict

    CSV_COLUMNS = ("t", "y_sim", "y_ref", "D", "z1", "z2", "r", "min_profile")

    def rows(self):
        for i in range(len(self.t)):
            yield (
                self.t[i],
                self.y_sim[i],
                self.y_ref[i],
                self.d[i],
                self.z1[i],
                self.z2[i],
                self.r[i],
                self.min_profile[i],
            )

    def mean_relative_residual(self) -> float:
        """Time-average of r(t) / ||x_sim[t]||_L2, the declared normalization."""
        return float(np.mean(self.r / self.profile_l2))


_LAM_OVERFLOW = 1e12


def simulate(
    system: GalerkinSystem,
    basis: GalerkinBasis,
    traj: Trajectory,
    gains: ControllerGains,
    params: ModelParams,
    t_final: float,
    dt: float,
    snapshot_times: tuple[float, ...] = (),
    d_override=None,
) -> GalerkinTrace:
    """Integrate the modal weights under the output-feedback loop.

    The modal state and the observer integrate as one coupled system with
    the shared fixed-step fourth-order scheme.  Raises PositivityViolation
    the first time the represented age profile dips below zero and
    Instability if the weights overflow.
    """
    n = len(system.lam)
    n_steps = int(round(t_final / dt))
    u = np.concatenate([system.lam, np.asarray(gains.z0, dtype=float)])
    a_mat = system.a_matrix
    p_vec = system.p_vector
    w = params.weights

    def rhs(tau: float, state: np.ndarray) -> np.ndarray:
        lam, z1, z2 = state[:n], state[n], state[n + 1]
        y = float(p_vec @ lam)
        if y <= 0:
            raise NonPositiveOutput("modal output %g <= 0 at t = %g" % (y, tau))
        y_ref = float(traj.eval(tau))
        rate = float(traj.rate(tau))
        log_error = math.log(y / y_ref)
        if d_override is not None:
            d_app = float(d_override(tau))
        else:
            d_app = min(params.d_max, max(params.d_min, z2 - rate + gains.gamma * log_error))
        dlam = a_mat @ lam - d_app * lam
        dz1 = -gains.l1 * z1 + z2 + gains.l1 * log_error - rate - d_app
        dz2 = -gains.l2 * z1 + gains.l2 * log_error
        return np.concatenate([dlam, [dz1, dz2]])

    n1 = n_steps + 1
    ts = dt * np.arange(n1)
    cols = {k: np.zeros(n1) for k in ("y_sim", "d", "z1", "z2", "r", "min_profile", "profile_l2")}
    lam_hist = np.zeros((n1, n))
    snap_idx = {int(round(s / dt)): float(s) for s in snapshot_times}
    snapshots = {}

    def record(i: int):
        lam = u[:n]
        tau = ts[i]
        lam_hist[i] = lam
        profile = basis.trial_matrix.T @ lam
        pmin = float(profile.min())
        if pmin < 0:
            raise PositivityViolation("profile minimum %g < 0 at t = %g" % (pmin, tau))
        y = float(p_vec @ lam)
        if d_override is not None:
            d_app = float(d_override(tau))
        else:
            sample = control(y, traj, gains, u[n:], tau, params.d_min, params.d_max)
            d_app = sample.d_applied
        r_l2, _ = residual(
            # residual is input-independent; pass the applied value anyway
            GalerkinSystem(system.m_matrix, system.n_matrix, p_vec, lam, tau, a_mat),
            basis,
            params,
            d_app,
        )
        cols["y_sim"][i] = y
        cols["d"][i] = d_app
        cols["z1"][i] = u[n]
        cols["z2"][i] = u[n + 1]
        cols["r"][i] = r_l2
        cols["min_profile"][i] = pmin
        cols["profile_l2"][i] = math.sqrt(max(float(w @ (profile * profile)), 0.0))
        if i in snap_idx:
            snapshots[snap_idx[i]] = GridFunction(profile, params.a_max)

    record(0)
    for i in range(n_steps):
        tau = ts[i]
        k1 = rhs(tau, u)
        k2 = rhs(tau + 0.5 * dt, u + 0.5 * dt * k1)
        k3 = rhs(tau + 0.5 * dt, u + 0.5 * dt * k2)
        k4 = rhs(tau + dt, u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)) or float(np.max(np.abs(u[:n]))) > _LAM_OVERFLOW:
            raise Instability("modal weights overflowed at t = %g" % (tau + dt))
        record(i + 1)

    system.lam = u[:n].copy()
    system.t = float(ts[-1])
    return GalerkinTrace(
        t=ts,
        y_sim=cols["y_sim"],
        y_ref=np.asarray(traj.eval(ts), dtype=float),
        d=cols["d"],
        z1=cols["z1"],
        z2=cols["z2"],
        r=cols["r"],
        min_profile=cols["min_profile"],
        profile_l2=cols["profile_l2"],
        lam=lam_hist,
        snapshots=snapshots,
    )
