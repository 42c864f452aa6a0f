"""Independent numerical oracles used to freeze expected test values.

Deliberately self-contained: these helpers re-implement quadrature and
scanning directly on closed-form integrands so that package results are
checked against a code path that shares nothing with src/agechemo.
"""
import numpy as np

# trial system closed forms
A_MAX = 2.0
MU = 0.1
K0 = 2.00


def k_shape(a):
    return a * (A_MAX - a)


def k_trial(a):
    return K0 * k_shape(a)


def simpson_highres(f, lo, hi, n=4001):
    """Composite Simpson on a closed form at high resolution."""
    xs = np.linspace(lo, hi, n)
    ys = np.asarray(f(xs), dtype=float)
    h = (hi - lo) / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(w @ ys) * h / 3.0


def lotka_sharpe_highres(d, n=4001):
    return simpson_highres(lambda a: k_trial(a) * np.exp(-(d + MU) * a), 0.0, A_MAX, n) - 1.0


def char_residual_highres(s, d_star, n=4001):
    """High-resolution residual of the renewal characteristic equation."""
    xs = np.linspace(0.0, A_MAX, n)
    kt = k_trial(xs) * np.exp(-(d_star + MU) * xs)
    h = A_MAX / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return complex((w * h / 3.0) @ (kt * np.exp(-s * xs))) - 1.0


def pi_highres(a_eval, d_star, n=4001):
    """pi(a) from its defining integral, evaluated directly."""
    def integrand(s):
        return k_trial(s) * np.exp(d_star * (a_eval - s) + MU * (a_eval - s))

    return simpson_highres(integrand, a_eval, A_MAX, n)


def grid_scan_extrema(f, lo, hi, n=200_001):
    xs = np.linspace(lo, hi, n)
    ys = np.asarray(f(xs), dtype=float)
    return float(ys.min()), float(ys.max())
