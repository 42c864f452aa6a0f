"""Certificate constants and numerical verification of the decay estimates.

Builds every constant of the attractivity certificate (kernel contraction
constant, history decay rate, observer quadratic form, trajectory-dependent
rates, the combined functional's weights) and provides checkers that test
the claimed differential inequalities along simulated traces with an
explicitly estimated discretization slack.

The overshoot construction composes exponentials of exponentials; its
value overflows double precision for moderate arguments, so the envelope
comparisons are done in log space throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .controller import ControllerGains, saturate
from .delay import DelayState, OracleTrace
from .errors import B3Fail, InvalidTrajectory, LogDomain, NoFeasiblePair
from .grid import GridFunction
from .model import Equilibrium, ModelParams
from .trajectories import Trajectory, validate


# ---------------------------------------------------------------------------
# kernel contraction and history decay rate


def _contraction_integrand(k_tilde: GridFunction, lam: float) -> np.ndarray:
    kt = k_tilde.values
    from .grid import cumquad4, simpson_weights

    prefix = cumquad4(kt, k_tilde.h)
    tail = prefix[-1] - prefix
    w = simpson_weights(k_tilde.n, k_tilde.h)
    mean_age = float(w @ (k_tilde.nodes * kt))
    return np.abs(kt - lam * tail / mean_age)


def _contraction_value(k_tilde: GridFunction, lam: float, sigma: float = 0.0) -> float:
    from .grid import simpson_weights

    w = simpson_weights(k_tilde.n, k_tilde.h)
    weight = np.exp(sigma * k_tilde.nodes) if sigma else 1.0
    return float(w @ (weight * _contraction_integrand(k_tilde, lam)))


def b3_search(k_tilde: GridFunction) -> tuple[float, float]:
    """Find the contraction constant minimizing the kernel deviation integral.

    Scans a logarithmic grid (plus the zero boundary, where the integral is
    exactly one by normalization) and refines with golden sections.
    Raises B3Fail when the minimum is not below one.
    """
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e2, 400)])
    vals = [_contraction_value(k_tilde, lam) for lam in grid]
    i0 = int(np.argmin(vals))
    lo = grid[max(i0 - 1, 0)]
    hi = grid[min(i0 + 1, len(grid) - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(90):
        c1 = hi - inv_phi * (hi - lo)
        c2 = lo + inv_phi * (hi - lo)
        if _contraction_value(k_tilde, c1) < _contraction_value(k_tilde, c2):
            hi = c2
        else:
            lo = c1
    lam = 0.5 * (lo + hi)
    value = _contraction_value(k_tilde, lam)
    if value >= 1.0:
        raise B3Fail("kernel contraction minimum %.6f >= 1" % value)
    return float(lam), float(value)


def sigma_search(k_tilde: GridFunction, lam: float) -> float:
    """Largest exponential weight keeping the contraction integral below one.

    Bisection to 1e-6; returns the last verified-feasible endpoint, so the
    returned rate strictly satisfies the inequality.
    """
    if _contraction_value(k_tilde, lam) >= 1.0:
        raise B3Fail("contraction fails at sigma = 0; no decay rate exists")
    lo, hi = 0.0, 1.0
    while _contraction_value(k_tilde, lam, hi) < 1.0:
        hi *= 2.0
        if hi > 64.0:
            break
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _contraction_value(k_tilde, lam, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# observer quadratic form


class ObserverQuadratic(NamedTuple):
    p1: float
    p2: float
    k1: float
    k2: float
    k1_tilde: float
    k2_tilde: float
    beta1: float
    beta2: float


def quadratic_pair_feasible(l1: float, l2: float, p1: float, p2: float) -> bool:
    """The two shape inequalities on (p1, p2) for gains (l1, l2)."""
    return (
        p1 * p1 < 4.0 * p2
        and (2.0 + l1 * p1 - 2.0 * l2 * p2) ** 2 < 8.0 * l1 * p1 - 4.0 * l2 * p1 * p1
    )


def _sym2_eigs(a11, a12, a22):
    tr = a11 + a22
    disc = np.sqrt(np.maximum((a11 - a22) ** 2 + 4.0 * a12 * a12, 0.0))
    return 0.5 * (tr - disc), 0.5 * (tr + disc)


def observer_quadratic(l1: float, l2: float, grid_points: int = 200) -> ObserverQuadratic:
    """Grid-search a feasible (p1, p2), maximizing the observer decay rate.

    Exhaustive logarithmic grid over (0, 2] x (0, 4]; both 2x2 forms must
    be positive definite, and the returned pair maximizes
    beta1 = min_eig(P~) / (4 max_eig(P)).
    """
    if l1 <= 0 or l2 <= 0:
        raise ValueError("observer gains must be positive")
    p1g = np.geomspace(1e-2, 2.0, grid_points)
    p2g = np.geomspace(1e-2, 4.0, grid_points)
    P1, P2 = np.meshgrid(p1g, p2g, indexing="ij")
    feas = (P1 * P1 < 4.0 * P2) & (
        (2.0 + l1 * P1 - 2.0 * l2 * P2) ** 2 < 8.0 * l1 * P1 - 4.0 * l2 * P1 * P1
    )
    if not feas.any():
        raise NoFeasiblePair("no (p1, p2) satisfies the shape inequalities for l = (%g, %g)" % (l1, l2))
    k1, k2 = _sym2_eigs(np.ones_like(P1), -P1 / 2.0, P2)
    kt1, kt2 = _sym2_eigs(2.0 * l1 - l2 * P1, l2 * P2 - l1 * P1 / 2.0 - 1.0, P1)
    feas &= (k1 > 0) & (kt1 > 0)
    if not feas.any():
        raise NoFeasiblePair("no positive-definite pair found for l = (%g, %g)" % (l1, l2))
    beta1 = np.where(feas, kt1 / (4.0 * k2), -np.inf)
    i, j = np.unravel_index(int(np.argmax(beta1)), beta1.shape)
    p1, p2 = float(P1[i, j]), float(P2[i, j])
    b2 = ((2 * l1 - l2 * p1) ** 2 + (l1 * p1 - 2 * l2 * p2) ** 2) / (2.0 * float(kt1[i, j]))
    return ObserverQuadratic(
        p1=p1,
        p2=p2,
        k1=float(k1[i, j]),
        k2=float(k2[i, j]),
        k1_tilde=float(kt1[i, j]),
        k2_tilde=float(kt2[i, j]),
        beta1=float(beta1[i, j]),
        beta2=b2,
    )


# ---------------------------------------------------------------------------
# certificate


@dataclass(frozen=True)
class Certificate:
    """All constants of the attractivity estimate, plus evaluation context."""

    sigma: float
    lambda_b3: float
    b3_value: float
    p1: float
    p2: float
    k1: float
    k2: float
    k1_tilde: float
    k2_tilde: float
    beta1: float
    beta2: float
    beta: float
    big_m: float
    alpha1: float
    alpha2: float
    mu1: float
    mu2: float
    l_rate: float
    d_star: float
    a_max: float
    gamma: float
    l1: float
    l2: float
    d_min: float
    d_max: float

    def validate(self):
        """Machine-check every certificate invariant; raises on violation."""
        if not quadratic_pair_feasible(self.l1, self.l2, self.p1, self.p2):
            raise ValueError("(p1, p2) violates the shape inequalities")
        if not self.big_m * self.sigma > self.beta2 * math.exp(2 * self.sigma * self.a_max):
            raise ValueError("history weight too small: M sigma <= beta2 e^{2 sigma A}")
        if not self.b3_value < 1.0:
            raise ValueError("kernel contraction value >= 1")
        if self.alpha1 * min(math.sqrt(self.k1), math.sqrt(self.big_m / 2.0)) < 2.0:
            raise ValueError("alpha1 below the overshoot-construction floor")
        positives = (
            self.sigma, self.lambda_b3, self.p1, self.p2, self.k1, self.k2,
            self.k1_tilde, self.k2_tilde, self.beta1, self.beta2, self.beta,
            self.big_m, self.alpha1, self.alpha2, self.mu1, self.mu2, self.l_rate,
        )
        if not all(v > 0 for v in positives):
            raise ValueError("certificate constant not strictly positive: %s" % (positives,))

    def as_dict(self) -> dict:
        keys = (
            "sigma lambda_b3 b3_value p1 p2 k1 k2 k1_tilde k2_tilde beta1 beta2 "
            "beta big_m alpha1 alpha2 mu1 mu2 l_rate d_star"
        ).split()
        return {k: getattr(self, k) for k in keys}


class RateConstants(NamedTuple):
    mu1: float
    mu2: float
    beta: float
    l_rate: float
    alpha1: float
    big_m: float


#: relative margin on alpha1 above its lower bound
ALPHA1_MARGIN = 1.1


def rate_constants(
    traj: Trajectory,
    eq: Equilibrium,
    gains: ControllerGains,
    oq: ObserverQuadratic,
    sigma: float,
    params: ModelParams,
    horizon: float,
) -> RateConstants:
    """Trajectory-dependent decay constants and the functional weights.

    The history weight M carries a factor-two margin over its constraint;
    alpha1 takes a ten-percent margin over its bound plus the floor needed
    by the overshoot construction.  Raises InvalidTrajectory when the rate
    band is violated (mu1 <= 0).
    """
    report = validate(traj, eq, params.d_min, params.d_max, horizon)
    d_span = params.d_max - params.d_min
    mu1 = min(2.0, gains.gamma) * min(
        1.0,
        (eq.d_star - params.d_min) - report.sup_rate,
        (params.d_max - eq.d_star) + report.inf_rate,
    )
    if mu1 <= 0:
        raise InvalidTrajectory(
            "trajectory rate band violated (inf %.4f, sup %.4f)" % (report.inf_rate, report.sup_rate)
        )
    mu2 = 8.0 * d_span / gains.gamma
    e2sa = math.exp(2.0 * sigma * params.a_max)
    big_m = 2.0 * oq.beta2 * e2sa / sigma
    beta = min(oq.beta1, sigma - e2sa * oq.beta2 / big_m)
    bound = (8.0 * d_span / beta) * (
        1.0 / (gains.gamma * math.sqrt(oq.k1)) + math.sqrt(2.0) * math.exp(sigma * params.a_max) / math.sqrt(big_m)
    )
    floor = 2.0 / min(math.sqrt(oq.k1), math.sqrt(big_m / 2.0))
    alpha1 = max(ALPHA1_MARGIN * bound, floor)
    l_rate = min(beta - (bound * beta) / alpha1, mu1)
    return RateConstants(mu1, mu2, beta, l_rate, alpha1, big_m)


def build_certificate(
    traj: Trajectory,
    eq: Equilibrium,
    gains: ControllerGains,
    params: ModelParams,
    horizon: float,
) -> Certificate:
    lam, value = b3_search(eq.k_tilde)
    sigma = sigma_search(eq.k_tilde, lam)
    oq = observer_quadratic(gains.l1, gains.l2)
    rc = rate_constants(traj, eq, gains, oq, sigma, params, horizon)
    cert = Certificate(
        sigma=sigma,
        lambda_b3=lam,
        b3_value=value,
        p1=oq.p1,
        p2=oq.p2,
        k1=oq.k1,
        k2=oq.k2,
        k1_tilde=oq.k1_tilde,
        k2_tilde=oq.k2_tilde,
        beta1=oq.beta1,
        beta2=oq.beta2,
        beta=rc.beta,
        big_m=rc.big_m,
        alpha1=rc.alpha1,
        alpha2=1.0,
        mu1=rc.mu1,
        mu2=rc.mu2,
        l_rate=rc.l_rate,
        d_star=eq.d_star,
        a_max=params.a_max,
        gamma=gains.gamma,
        l1=gains.l1,
        l2=gains.l2,
        d_min=params.d_min,
        d_max=params.d_max,
    )
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# functional evaluation


def _quadratic(cert: Certificate, e1: float, e2: float) -> float:
    return e1 * e1 - cert.p1 * e1 * e2 + cert.p2 * e2 * e2


def clf_value(
    state_or_profile,
    z: np.ndarray,
    traj: Trajectory,
    eq: Equilibrium,
    cert: Certificate,
    params: ModelParams,
    t: float | None = None,
) -> tuple[float, float]:
    """Evaluate the combined functional; returns (V, Q).

    Accepts either the age profile (profile form) or the delay state
    (history form); the two agree identically because the profile form's
    ratios reduce to the history coordinates under the reconstruction map.
    """
    decay = np.exp(-cert.sigma * params.nodes)
    if isinstance(state_or_profile, DelayState):
        state = state_or_profile
        tt = state.t if t is None else t
        window = state.window(tt)
        eta = state.eta
        w_norm = float(np.max(decay * np.abs(window)))
        floor = 1.0 + min(0.0, float(window.min()))
        e1 = float(z[0]) - eta
        e2 = float(z[1]) - cert.d_star
        head = eta * eta
    else:
        profile: GridFunction = state_or_profile
        if t is None:
            raise ValueError("profile form needs an explicit time")
        if np.any(profile.values <= 0):
            raise LogDomain("profile must be strictly positive")
        y_ref = float(traj.eval(t))
        from .delay import pi_functional

        scale = pi_functional(profile, eq, params) / y_ref
        ratio = profile.values / (eq.x_star.values * y_ref)
        w_norm = float(np.max(decay * np.abs(ratio - scale)))
        floor = min(scale, float(ratio.min()))
        if floor <= 0:
            raise LogDomain("profile ratio floor is non-positive")
        e1 = float(z[0]) - math.log(scale)
        e2 = float(z[1]) - cert.d_star
        head = math.log(scale) ** 2
    q = _quadratic(cert, e1, e2) + 0.5 * cert.big_m * (w_norm / floor) ** 2
    v = head + cert.alpha1 * math.sqrt(q) + cert.alpha2 * q
    return v, q


def sample_clf(
    trace: OracleTrace, cert: Certificate, stride: int = 10
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the history-form functional along an oracle trace."""
    decay = np.exp(-cert.sigma * trace.nodes)
    idx = np.arange(0, len(trace.t), stride)
    vs = np.zeros(len(idx))
    for j, i in enumerate(idx):
        window = trace.window(trace.t[i])
        w_norm = float(np.max(decay * np.abs(window)))
        floor = 1.0 + min(0.0, float(window.min()))
        e1 = trace.z1[i] - trace.eta[i]
        e2 = trace.z2[i] - cert.d_star
        q = _quadratic(cert, e1, e2) + 0.5 * cert.big_m * (w_norm / floor) ** 2
        vs[j] = trace.eta[i] ** 2 + cert.alpha1 * math.sqrt(q) + cert.alpha2 * q
    return trace.t[idx], vs


# ---------------------------------------------------------------------------
# decay verification


@dataclass(frozen=True)
class DecayReport:
    n_samples: int
    n_violations: int
    violation_times: np.ndarray
    slack: float
    integrated_ok: bool

    @property
    def passed(self) -> bool:
        return self.n_violations == 0 and self.integrated_ok


def verify_decay(
    times: np.ndarray,
    values: np.ndarray,
    l_rate: float,
    values_half: np.ndarray | None = None,
    abs_eps: float = 1e-12,
) -> DecayReport:
    """Check the decay differential inequality along a sampled trace.

    The forward difference stands in for the one-sided derivative; its
    discretization error is charged as a slack linear in the integrator
    step, estimated from a step-halved rerun of the same scenario sampled
    on the same grid: the halving surrogate differs from the full-step one
    by half the error, so the slack is twice their largest gap (fallback:
    second differences of the trace itself).  The integrated decay
    envelope is checked in log space to dodge the overflow of its closed
    form.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    surr = np.diff(values) / np.diff(times)
    rhs = -l_rate * values[:-1] / (1.0 + np.sqrt(np.maximum(values[:-1], 0.0)))
    if values_half is not None:
        surr_half = np.diff(np.asarray(values_half, dtype=float)) / np.diff(times)
        slack = 2.0 * float(np.max(np.abs(surr - surr_half)))
    else:
        dd = np.abs(np.diff(values, 2))
        step = times[1] - times[0]
        slack = float(dd.max()) / (2.0 * step) if len(dd) else 0.0
    slack += abs_eps
    bad = surr > rhs + slack
    v0 = values[0]
    log_bound = math.log(max(v0, 1e-300)) + max(0.0, v0 - 1.0) - 0.5 * l_rate * times
    live = values > 1e-290  # numerically-zero samples satisfy any envelope
    integrated_ok = bool(
        np.all(np.log(np.maximum(values[live], 1e-300)) <= log_bound[live] + 1e-9)
    )
    return DecayReport(
        n_samples=len(surr),
        n_violations=int(bad.sum()),
        violation_times=times[:-1][bad],
        slack=slack,
        integrated_ok=integrated_ok,
    )


# ---------------------------------------------------------------------------
# history-decay diagnostics along oracle traces


@dataclass(frozen=True)
class HistoryDecayReport:
    w0: float
    w_monotone: bool
    w_envelope: bool
    c_monotone: bool
    floor_positive: bool

    @property
    def passed(self) -> bool:
        return self.w_monotone and self.w_envelope and self.c_monotone and self.floor_positive


def check_history_decay(
    trace: OracleTrace,
    sigma: float,
    stride: int = 10,
    rel_tol: float = 1e-3,
    abs_tol_scale: float = 1e-5,
) -> HistoryDecayReport:
    """Sliding-norm decay and floor monotonicity of the internal coordinate.

    The weighted history norm must decay pairwise at rate sigma and never
    increase; the floor functional 1 + min(0, min psi) must never decrease
    (that is what keeps the reconstruction positive).  Absolute tolerances
    are scaled to the initial norm: the trace resolves psi only down to its
    integration floor.
    """
    decay = np.exp(-sigma * trace.nodes)
    idx = np.arange(0, len(trace.t), stride)
    ws = np.zeros(len(idx))
    cs = np.zeros(len(idx))
    for j, i in enumerate(idx):
        window = trace.window(trace.t[i])
        ws[j] = float(np.max(decay * np.abs(window)))
        cs[j] = 1.0 + min(0.0, float(window.min()))
    ts = trace.t[idx]
    abs_tol = abs_tol_scale * ws[0] + 1e-15
    w_monotone = bool(np.all(np.diff(ws) <= rel_tol * ws[:-1] + abs_tol))
    # pairwise s <= t check via the running minimum of W e^{sigma t}
    grown = ws * np.exp(sigma * ts)
    running = np.minimum.accumulate(grown)
    w_envelope = bool(
        np.all(ws <= np.exp(-sigma * ts) * running * (1.0 + rel_tol) + abs_tol)
    )
    c_monotone = bool(np.all(np.diff(cs) >= -1e-6))
    return HistoryDecayReport(
        w0=float(ws[0]),
        w_monotone=w_monotone,
        w_envelope=w_envelope,
        c_monotone=c_monotone,
        floor_positive=bool(np.all(cs > 0)),
    )


def check_observer_iss(trace: OracleTrace, cert: Certificate, stride: int = 10) -> int:
    """Violation count of dJ/dt <= -2 beta1 J + beta2 delta^2 along a trace."""
    idx = np.arange(0, len(trace.t), stride)
    e1 = trace.z1[idx] - trace.eta[idx]
    e2 = trace.z2[idx] - cert.d_star
    j_vals = e1 * e1 - cert.p1 * e1 * e2 + cert.p2 * e2 * e2
    ts = trace.t[idx]
    surr = np.diff(j_vals) / np.diff(ts)
    rhs = -2.0 * cert.beta1 * j_vals[:-1] + cert.beta2 * trace.delta[idx][:-1] ** 2
    dd = np.abs(np.diff(j_vals, 2))
    slack = (float(dd.max()) / (2.0 * (ts[1] - ts[0])) if len(dd) else 0.0) + 1e-10
    return int(np.sum(surr > rhs + slack))


def check_eta_decay(trace: OracleTrace, cert: Certificate, stride: int = 10) -> int:
    """Violation count of d(eta^2)/dt <= -mu1 eta^2/(1+|eta|) + mu2 |e2 + gamma delta|."""
    idx = np.arange(0, len(trace.t), stride)
    eta2 = trace.eta[idx] ** 2
    ts = trace.t[idx]
    surr = np.diff(eta2) / np.diff(ts)
    drive = np.abs(trace.z2[idx] - cert.d_star + cert.gamma * trace.delta[idx])[:-1]
    rhs = -cert.mu1 * eta2[:-1] / (1.0 + np.abs(trace.eta[idx][:-1])) + cert.mu2 * drive
    dd = np.abs(np.diff(eta2, 2))
    slack = (float(dd.max()) / (2.0 * (ts[1] - ts[0])) if len(dd) else 0.0) + 1e-10
    return int(np.sum(surr > rhs + slack))


# ---------------------------------------------------------------------------
# overshoot construction


def kappa_psi(z: float) -> float:
    return math.exp(2.0 * z) * (math.exp(2.0 * z) - 1.0)


def kappa_q(z: float, cert: Certificate) -> float:
    return (cert.k2 + cert.big_m / 2.0) * (z + kappa_psi(z)) ** 2


def kappa_v(z: float, cert: Certificate) -> float:
    q = kappa_q(z, cert)
    return z * z + cert.alpha1 * math.sqrt(q) + cert.alpha2 * q


def overshoot_log_bound(varsigma0: float, e0_norm: float, cert: Certificate) -> float:
    """log of the overshoot gain; -inf at zero initial data."""
    if varsigma0 < 0 or e0_norm < 0:
        raise ValueError("initial magnitudes must be nonnegative")
    arg = varsigma0 + e0_norm
    if arg == 0.0:
        return -math.inf
    v = kappa_v(arg, cert)
    return cert.sigma * cert.a_max + math.log(math.sqrt(v) + v) + max(0.0, v - 1.0)


def overshoot_bound(varsigma0: float, e0_norm: float, cert: Certificate) -> float:
    """Overshoot gain of the attractivity estimate; inf if it overflows."""
    lb = overshoot_log_bound(varsigma0, e0_norm, cert)
    if lb == -math.inf:
        return 0.0
    return math.exp(lb) if lb < 709.0 else math.inf


def check_envelope(
    trace: OracleTrace, cert: Certificate, stride: int = 10
) -> tuple[bool, float]:
    """Check the attractivity envelope along a trace, in log space.

    Returns (never crossed, worst log margin); the margin is the smallest
    value of log(envelope) - log(measured).
    """
    idx = np.arange(0, len(trace.t), stride)
    e_norm = np.hypot(trace.z1[idx] - trace.eta[idx], trace.z2[idx] - cert.d_star)
    measured = np.zeros(len(idx))
    for j, i in enumerate(idx):
        window = trace.window(trace.t[i])
        measured[j] = float(np.max(np.abs(trace.eta[i] + np.log1p(window)))) + e_norm[j]
    log_bound0 = overshoot_log_bound(
        float(np.max(np.abs(trace.eta[0] + np.log1p(trace.window(0.0))))),
        float(e_norm[0]),
        cert,
    )
    log_env = log_bound0 - 0.25 * cert.l_rate * trace.t[idx]
    margins = log_env - np.log(np.maximum(measured, 1e-300))
    return bool(np.all(margins >= 0.0)), float(np.min(margins))


# ---------------------------------------------------------------------------
# saturation inequality property check


@dataclass(frozen=True)
class FactReport:
    n_samples: int
    n_violations: int
    max_deficit: float


def saturation_fact_check(n_samples: int = 1_000_000, seed: int = 20240801) -> FactReport:
    """Randomized check of z sat_{[-a,b]}(z) >= min(1,a,b) z^2 / (1+|z|)."""
    rng = np.random.default_rng(seed)
    half = n_samples // 2
    z = np.concatenate([rng.normal(0.0, 3.0, half), rng.uniform(-50.0, 50.0, n_samples - half)])
    a = 10.0 ** rng.uniform(-3, 3, n_samples)
    b = 10.0 ** rng.uniform(-3, 3, n_samples)
    sat = np.minimum(b, np.maximum(-a, z))
    lhs = z * sat
    rhs = np.minimum(1.0, np.minimum(a, b)) * z * z / (1.0 + np.abs(z))
    deficit = rhs - lhs
    tol = 1e-12 * np.maximum(1.0, np.abs(rhs))
    bad = deficit > tol
    return FactReport(n_samples, int(bad.sum()), float(deficit.max(initial=0.0)))


def saturation_fact_pointwise(z: float, a: float, b: float) -> tuple[float, float]:
    """(lhs, rhs) of the saturation inequality at one point."""
    lhs = z * saturate(z, -a, b)
    rhs = min(1.0, a, b) * z * z / (1.0 + abs(z))
    return lhs, rhs
