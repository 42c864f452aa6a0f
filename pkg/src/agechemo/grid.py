"""Uniform age-grid functions and quadrature.

All integral operators in the toolkit share one convention: functions on
[0, A] are sampled on a uniform grid with an odd node count and integrated
with composite Simpson weights.  Evaluation between nodes is piecewise
linear, exact at the nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` uniform nodes (n odd)."""
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd node count >= 3, got %d" % n)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def simpson(values: np.ndarray, h: float) -> float:
    return float(simpson_weights(len(values), h) @ np.asarray(values, dtype=float))


def cumtrapz(values: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoid integral, zero at the first node."""
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    out[1:] = np.cumsum(0.5 * h * (v[1:] + v[:-1]))
    return out


# One-interval integration weights of the cubic through four consecutive
# nodes: interior intervals use the centered stencil, the first/last use
# one-sided stencils (mirrored).
_CUM4_INNER = np.array([-1.0, 13.0, 13.0, -1.0]) / 24.0
_CUM4_FIRST = np.array([9.0, 19.0, -5.0, 1.0]) / 24.0


def cumquad4(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order cumulative integral on a uniform grid, zero at node 0."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n < 4:
        return cumtrapz(v, h)
    inc = np.empty(n - 1)
    inc[0] = _CUM4_FIRST @ v[:4]
    inc[-1] = _CUM4_FIRST @ v[-1:-5:-1]
    core = np.stack([v[0:n - 3], v[1:n - 2], v[2:n - 1], v[3:n]])
    inc[1:-1] = _CUM4_INNER @ core
    out = np.zeros(n)
    out[1:] = np.cumsum(inc) * h
    return out


def fd4(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n < 5:
        return np.gradient(v, h)
    d = np.empty(n)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return d


def hermite_resample(nodes: np.ndarray, values: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Cubic Hermite resampling of smooth uniform-grid data.

    Node slopes come from :func:`fd4`; used where piecewise-linear
    evaluation would inject O(h^2) kinks into smooth profiles.
    """
    h = nodes[1] - nodes[0]
    d = fd4(values, h)
    u = (np.asarray(query, dtype=float) - nodes[0]) / h
    i = np.clip(np.floor(u).astype(int), 0, len(values) - 2)
    t = u - i
    h00 = (1 + 2 * t) * (1 - t) ** 2
    h10 = t * (1 - t) ** 2
    h01 = t * t * (3 - 2 * t)
    h11 = t * t * (t - 1)
    return h00 * values[i] + h10 * h * d[i] + h01 * values[i + 1] + h11 * h * d[i + 1]


@dataclass(frozen=True)
class GridFunction:
    """A function on [0, A] sampled on a uniform grid.

    Evaluation at arbitrary ages is piecewise-linear interpolation, exact
    at the nodes.  ``positive``/``continuous`` are metadata flags set by
    constructors that know the provenance of the samples.
    """

    values: np.ndarray
    a_max: float
    positive: bool = False
    continuous: bool = True
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) < 2:
            raise ValueError("GridFunction needs a 1-d array with >= 2 nodes")
        if not self.a_max > 0:
            raise ValueError("a_max must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "nodes", np.linspace(0.0, self.a_max, len(v)))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def h(self) -> float:
        return self.a_max / (self.n - 1)

    def __call__(self, a):
        return np.interp(a, self.nodes, self.values)

    def integral(self) -> float:
        return simpson(self.values, self.h)

    def inner(self, other: "GridFunction") -> float:
        """L2 inner product over [0, A]; grids must coincide."""
        self._check_same_grid(other)
        return simpson(self.values * other.values, self.h)

    def _check_same_grid(self, other: "GridFunction"):
        from .errors import GridMismatch

        if self.n != other.n or self.a_max != other.a_max:
            raise GridMismatch(
                "grids differ: (%d, %g) vs (%d, %g)"
                % (self.n, self.a_max, other.n, other.a_max)
            )

    def with_values(self, values: np.ndarray, positive: bool | None = None) -> "GridFunction":
        return GridFunction(
            values,
            self.a_max,
            positive=self.positive if positive is None else positive,
            continuous=self.continuous,
        )

    @staticmethod
    def from_callable(f, a_max: float, n: int, positive: bool = False) -> "GridFunction":
        nodes = np.linspace(0.0, a_max, n)
        return GridFunction(np.asarray(f(nodes), dtype=float), a_max, positive=positive)


def rk4_step(f, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of the shared fixed-step integrator."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
