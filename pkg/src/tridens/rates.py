"""Rate functions in coefficient form and the Beta concentration bound.

Finite coefficient sequences are read as the given terms followed by the
minimising tail (d = 0, c = 1 for the Gaussian rate; z_odd = 1, z_even = tau
for the Laguerre rate).  The tail contributes nothing, so the ``padded`` and
``truncated`` conventions give the same number; both are accepted so callers
can state which reading they mean.
"""
import math

import numpy as np

from .coefficients import ChainDecomposition, RecursionCoefficients, z_decomposition
from .errors import ParameterError, SupportError

TAIL_CONVENTIONS = ("padded", "truncated")


def g(x):
    """x - log(x) - 1 for x > 0, +inf otherwise; unique minimum g(1) = 0."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.reshape(-1)
    pos = x > 0
    u = np.where(pos, x, 1.0) - 1.0
    out = u - np.log1p(u)
    # cancellation near x = 1: use the series u^2/2 - u^3/3 + ...
    near = np.abs(u) < 1e-3
    if np.any(near):
        un = u[near]
        out[near] = un * un * (0.5 - un * (1 / 3 - un * (0.25 - un * (0.2 - un / 6))))
    out = np.where(pos, out, np.inf).reshape(shape)
    return float(out) if out.ndim == 0 else out


def f_gauss(x):
    """Rate of the largest Gaussian-ensemble eigenvalue, int_2^|x| sqrt(t**2 - 4) dt for |x| >= 2.

    Defined only outside (-2, 2); returns +inf there.
    """
    x = np.abs(np.asarray(x, dtype=float))
    out = np.full(x.shape, np.inf)
    ok = x >= 2
    xs = x[ok]
    root = np.sqrt(xs * xs - 4)
    out[ok] = xs / 2 * root - 2 * np.arccosh(xs / 2)
    return float(out) if out.ndim == 0 else out


def _check_tail(tail):
    if tail not in TAIL_CONVENTIONS:
        raise ParameterError(f"tail convention must be one of {TAIL_CONVENTIONS}, got {tail!r}")


def rate_ig(rc: RecursionCoefficients, tail: str = "padded") -> float:
    """Gaussian sum rule sum_k d_k**2 / 2 + g(c_k**2) over the given coefficients."""
    _check_tail(tail)
    return float(np.sum(0.5 * rc.d ** 2) + np.sum(g(rc.c ** 2)))


def rate_il(z, tau: float, tail: str = "padded") -> float:
    """Laguerre rate sum_k g(z_{2k-1}) + tau g(z_{2k} / tau).

    ``z`` is a ChainDecomposition or a plain sequence; ``None`` stands for a
    measure that failed the z-decomposition and gives +inf.
    """
    _check_tail(tail)
    if not (0 < tau <= 1):
        raise ParameterError(f"tau must lie in (0, 1], got {tau!r}")
    if z is None:
        return math.inf
    zs = z.z if isinstance(z, ChainDecomposition) else np.asarray(z, dtype=float)
    return float(np.sum(g(zs[0::2])) + tau * np.sum(g(zs[1::2] / tau)))


def rate_il_from_coefficients(rc: RecursionCoefficients, tau: float, tail: str = "padded") -> float:
    """rate_il after z-decomposition; +inf when the measure is not supported on [0, inf)."""
    try:
        z = z_decomposition(rc)
    except SupportError:
        z = None
    return rate_il(z, tau, tail)


def beta_concentration_bound(a: float, b: float, eps: float) -> float:
    """Upper bound 4 exp(-(eps**2 / 128) (a**3 + b**3) / (a b)) on P(|X - EX| > eps), X ~ Beta(a, b)."""
    if not (a > 0 and b > 0):
        raise ParameterError("Beta parameters must be positive")
    if not (0 < eps < 0.5):
        raise ParameterError(f"eps must lie in (0, 1/2), got {eps!r}")
    # (a^3 + b^3)/(ab) = a^2/b + b^2/a, no overflow for large parameters
    return 4.0 * math.exp(-(eps * eps / 128.0) * (a * a / b + b * b / a))
