"""Scalar samplers behind the tridiagonal models.

Gamma(shape) always means unit rate, density x**(shape-1) * exp(-x) / Gamma(shape).
Beta variates are built as Y / (Y + Z) from two independent Gamma draws and
Dirichlet vectors as normalised Gamma vectors, so there is a single exact
primitive.  All draws are carried in log space internally: for small shapes a
Gamma variate can underflow, while Beta and Dirichlet values stay well defined.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ParameterError

_TINY = np.finfo(float).tiny
_ONE_MINUS = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class GammaParams:
    shape: float

    def __post_init__(self):
        if not np.isfinite(self.shape) or self.shape <= 0:
            raise ParameterError(f"Gamma shape must be positive, got {self.shape!r}")


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ParameterError(f"Beta parameter {name} must be positive, got {v!r}")


@dataclass(frozen=True)
class DirichletParams:
    dimension: int
    concentration: float

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ParameterError(f"Dirichlet dimension must be a positive integer, got {self.dimension!r}")
        if not np.isfinite(self.concentration) or self.concentration <= 0:
            raise ParameterError(f"Dirichlet concentration must be positive, got {self.concentration!r}")


def log_gamma_variates(shape, rng, size=None):
    """Logarithms of Gamma(shape) draws; ``shape`` may be an array (broadcast with ``size``).

    Uses numpy's Marsaglia-Tsang rejection sampler.  Shapes below one are
    boosted: Gamma(s) = Gamma(s + 1) * U**(1/s), evaluated as a sum of logs.
    """
    shape = np.asarray(shape, dtype=float)
    if np.any(~np.isfinite(shape)) or np.any(shape <= 0):
        raise ParameterError("Gamma shapes must be positive and finite")
    if size is None:
        size = shape.shape
    small = shape < 1
    out = np.log(rng.standard_gamma(np.where(small, shape + 1.0, shape), size=size))
    if np.any(small):
        u = rng.random(size=size)
        boost = np.log1p(-u) / np.where(small, shape, 1.0)
        out = out + np.where(small, boost, 0.0)
    return out


def sample_gamma(params: GammaParams, rng: np.random.Generator, size=None):
    x = np.exp(log_gamma_variates(params.shape, rng, size))
    # underflow floor, only reachable for shapes far below one
    x = np.maximum(x, _TINY)
    return float(x) if size is None else x


def beta_variates(alpha, beta, rng, size=None):
    """Vectorised Beta(alpha, beta) draws, broadcasting array parameters."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    if size is None:
        size = alpha.shape
    log_y = log_gamma_variates(alpha, rng, size)
    log_z = log_gamma_variates(beta, rng, size)
    return np.clip(expit(log_y - log_z), _TINY, _ONE_MINUS)


def sample_beta(params: BetaParams, rng: np.random.Generator, size=None):
    x = beta_variates(params.alpha, params.beta, rng, size)
    return float(x) if size is None else x


def sample_dirichlet(params: DirichletParams, rng: np.random.Generator) -> np.ndarray:
    """Symmetric Dirichlet weight vector: G_i / (G_1 + ... + G_n), G_i iid Gamma(concentration)."""
    if params.dimension == 1:
        return np.ones(1)
    log_g = log_gamma_variates(np.full(params.dimension, params.concentration), rng)
    w = np.exp(log_g - log_g.max())
    return w / w.sum()


def gamma_fenchel_legendre(shape: float, x: float) -> float:
    """Fenchel-Legendre transform of the Gamma(shape) log-mgf, ``shape * g(x / shape)``."""
    from .rates import g

    if shape <= 0:
        raise ParameterError(f"Gamma shape must be positive, got {shape!r}")
    return shape * g(x / shape)
