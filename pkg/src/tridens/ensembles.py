"""Tridiagonal models of the Jacobi, Gaussian and Laguerre beta ensembles.

Notation: ``beta`` is the Dyson index and ``bp = beta / 2``.

* Jacobi(beta, a, b): canonical moments p_1..p_{2n-1} are independent,
  odd k = 2j - 1 ~ Beta(a - (j-1) bp, b - (j-1) bp),
  even k = 2j ~ Beta((n-j) bp, a + b - (n+j-1) bp),
  and with p_{-1} = p_0 = 0
  d_k = p_{2k-2}(1 - p_{2k-3}) + p_{2k-1}(1 - p_{2k-2}),
  c_k = sqrt(p_{2k-1}(1 - p_{2k-2}) p_{2k}(1 - p_{2k-1})).
* Gaussian(beta): d_k ~ N(0, 1), c_k**2 ~ Gamma((n-k) bp).
* Laguerre(beta, a): z_{2k-1} ~ Gamma(a - (k-1) bp), z_{2k} ~ Gamma((n-k) bp),
  d_k = z_{2k-2} + z_{2k-1} (z_0 = 0), c_k = sqrt(z_{2k-1} z_{2k}).

The batch samplers return plain arrays ``(diag, offdiag)`` with a leading
replica axis; the single-matrix samplers wrap them in ``TridiagonalMatrix``.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import beta_variates, log_gamma_variates
from .errors import ParameterError
from .tridiagonal import TridiagonalMatrix

KINDS = ("jacobi", "gaussian", "laguerre")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    beta: float
    n: int
    a: Optional[float] = None
    b: Optional[float] = None

    def __post_init__(self):
        kind = str(self.kind).lower()
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ParameterError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ParameterError(f"beta must be positive, got {self.beta!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        floor = (self.n - 1) * self.bp
        if kind in ("jacobi", "laguerre"):
            if self.a is None or not (np.isfinite(self.a) and self.a > floor):
                raise ParameterError(f"{kind} ensemble needs a > (n-1)*beta/2 = {floor}, got a={self.a!r} (n={self.n})")
        if kind == "jacobi":
            if self.b is None or not (np.isfinite(self.b) and self.b > floor):
                raise ParameterError(f"jacobi ensemble needs b > (n-1)*beta/2 = {floor}, got b={self.b!r} (n={self.n})")

    @property
    def bp(self) -> float:
        return self.beta / 2.0


def _require(spec: EnsembleSpec, kind: str):
    if spec.kind != kind:
        raise ParameterError(f"expected a {kind} spec, got {spec.kind}")


def jacobi_beta_parameters(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """First and second Beta parameters of p_1..p_{2n-1}."""
    _require(spec, "jacobi")
    n, bp, a, b = spec.n, spec.bp, spec.a, spec.b
    k = np.arange(1, 2 * n)
    odd = k % 2 == 1
    first = np.where(odd, a - (k - 1) / 2 * bp, (2 * n - k) / 2 * bp)
    second = np.where(odd, b - (k - 1) / 2 * bp, a + b - (2 * n + k - 2) / 2 * bp)
    if np.any(first <= 0) or np.any(second <= 0):
        raise ParameterError("non-positive Beta parameter in the Jacobi model")
    return first, second


def jacobi_entries(p) -> tuple[np.ndarray, np.ndarray]:
    """Map canonical moments p_1..p_{2n-1} (last axis) to the Jacobi matrix entries."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] % 2 != 1:
        raise ParameterError("need an odd number 2n-1 of canonical moments")
    n = (p.shape[-1] + 1) // 2
    pad = np.zeros(p.shape[:-1] + (2,))
    q = np.concatenate([pad, p], axis=-1)  # q[..., j + 1] = p_j for j >= -1
    k = np.arange(1, n + 1)
    p2k2, p2k3, p2k1 = q[..., 2 * k - 1], q[..., 2 * k - 2], q[..., 2 * k]
    diag = p2k2 * (1 - p2k3) + p2k1 * (1 - p2k2)
    k = k[:-1]
    offdiag = np.sqrt(q[..., 2 * k] * (1 - q[..., 2 * k - 1]) * q[..., 2 * k + 1] * (1 - q[..., 2 * k]))
    return diag, offdiag


def laguerre_entries(z) -> tuple[np.ndarray, np.ndarray]:
    """Map z_1..z_{2n-1} (last axis) to d_k = z_{2k-2} + z_{2k-1}, c_k = sqrt(z_{2k-1} z_{2k})."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] % 2 != 1:
        raise ParameterError("need an odd number 2n-1 of z variables")
    zp = np.concatenate([np.zeros(z.shape[:-1] + (1,)), z], axis=-1)  # zp[..., j] = z_j
    odd = zp[..., 1::2]
    even = zp[..., 0::2]  # z_0, z_2, ..., z_{2n-2}
    return even + odd, np.sqrt(odd[..., :-1] * even[..., 1:])


def sample_jacobi_canonical(spec: EnsembleSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Canonical moments p_1..p_{2n-1}, shape (size, 2n-1)."""
    first, second = jacobi_beta_parameters(spec)
    return beta_variates(first, second, rng, size=(size, first.size))


def sample_jacobi_batch(spec: EnsembleSpec, rng: np.random.Generator, size: int):
    return jacobi_entries(sample_jacobi_canonical(spec, rng, size))


def coupled_limit_entries(spec: EnsembleSpec, p, target: str, a_limit: Optional[float] = None):
    """Fixed-n limit ensemble coupled to Jacobi canonical moments ``p`` by quantile transforms.

    Each p_k is mapped through its own Beta CDF to a uniform and then through the
    quantile function of the matching limit variable: for ``target="laguerre"``
    z_k ~ Gamma(shape_k) of ``Laguerre(beta, a_limit)``, for ``target="gaussian"``
    d_k ~ N(0, 1) from p_{2k-1} and c_k**2 ~ Gamma((n-k) beta/2) from p_{2k}.
    The result is an exact sample of the limit ensemble (the p_k are independent
    and continuous), realised on the same probability space as the Jacobi matrix.
    """
    from scipy.special import betainc, gammaincinv, ndtri

    first, second = jacobi_beta_parameters(spec)
    u = betainc(first, second, np.asarray(p, dtype=float))
    u = np.clip(u, np.finfo(float).tiny, np.nextafter(1.0, 0.0))
    n = spec.n
    if target == "laguerre":
        lag = EnsembleSpec("laguerre", spec.beta, n, spec.a if a_limit is None else a_limit)
        return laguerre_entries(gammaincinv(laguerre_gamma_shapes(lag), u))
    if target == "gaussian":
        diag = ndtri(u[..., 0::2])
        shapes = (n - np.arange(1, n)) * spec.bp
        return diag, np.sqrt(gammaincinv(shapes, u[..., 1::2]))
    raise ParameterError(f"target must be 'laguerre' or 'gaussian', got {target!r}")


def sample_gaussian_batch(spec: EnsembleSpec, rng: np.random.Generator, size: int):
    _require(spec, "gaussian")
    n = spec.n
    diag = rng.standard_normal((size, n))
    if n == 1:
        return diag, np.zeros((size, 0))
    shapes = (n - np.arange(1, n)) * spec.bp
    offdiag = np.exp(0.5 * log_gamma_variates(shapes, rng, size=(size, n - 1)))
    return diag, offdiag


def laguerre_gamma_shapes(spec: EnsembleSpec) -> np.ndarray:
    _require(spec, "laguerre")
    n, bp = spec.n, spec.bp
    k = np.arange(1, 2 * n)
    return np.where(k % 2 == 1, spec.a - (k - 1) / 2 * bp, (n - k / 2) * bp)


def sample_laguerre_batch(spec: EnsembleSpec, rng: np.random.Generator, size: int):
    shapes = laguerre_gamma_shapes(spec)
    z = np.exp(log_gamma_variates(shapes, rng, size=(size, shapes.size)))
    return laguerre_entries(z)


def sample_batch(spec: EnsembleSpec, rng: np.random.Generator, size: int):
    sampler = {"jacobi": sample_jacobi_batch, "gaussian": sample_gaussian_batch, "laguerre": sample_laguerre_batch}
    return sampler[spec.kind](spec, rng, size)


def _single(batch):
    diag, offdiag = batch
    return TridiagonalMatrix(diag[0], offdiag[0])


def sample_jacobi_tridiag(spec: EnsembleSpec, rng: np.random.Generator) -> TridiagonalMatrix:
    return _single(sample_jacobi_batch(spec, rng, 1))


def sample_gaussian_tridiag(spec: EnsembleSpec, rng: np.random.Generator) -> TridiagonalMatrix:
    return _single(sample_gaussian_batch(spec, rng, 1))


def sample_laguerre_tridiag(spec: EnsembleSpec, rng: np.random.Generator) -> TridiagonalMatrix:
    return _single(sample_laguerre_batch(spec, rng, 1))


def sample_tridiag(spec: EnsembleSpec, rng: np.random.Generator) -> TridiagonalMatrix:
    return _single(sample_batch(spec, rng, 1))


def limit_matrix_sc(n: int) -> TridiagonalMatrix:
    """n x n truncation of the free Jacobi matrix (zero diagonal, unit subdiagonal)."""
    if n < 1:
        raise ParameterError("n must be positive")
    return TridiagonalMatrix(np.zeros(n), np.ones(n - 1))


def limit_matrix_mp(n: int, tau: float) -> TridiagonalMatrix:
    """n x n truncation of the Marchenko-Pastur(tau) Jacobi matrix: d_1 = 1, d_k = 1 + tau, c_k = sqrt(tau)."""
    if n < 1:
        raise ParameterError("n must be positive")
    if not (0 < tau <= 1):
        raise ParameterError(f"tau must lie in (0, 1], got {tau!r}")
    diag = np.full(n, 1.0 + tau)
    diag[0] = 1.0
    return TridiagonalMatrix(diag, np.full(n - 1, math.sqrt(tau)))


REGIMES = ("LLN2", "LLN1", "LDP1", "LDP2", "FINDIM_G", "FINDIM_L", "affine")


@dataclass(frozen=True)
class ScalingRegime:
    """Affine spectral map x -> scale * (x - shift) attached to a Jacobi spec.

    ``LLN2(sigma)``: scale (sigma+1) sqrt(b (1+sigma) / (sigma n bp)), shift sigma/(sigma+1)
    ``LLN1/LDP1(tau)``: scale b/a, shift 0
    ``LDP2``: scale 4 sqrt(b / (n beta)), shift 1/2
    ``FINDIM_G(sigma)``: fixed-n Gaussian limit, scale (sigma+1) sqrt(b (sigma+1)/sigma), shift sigma/(sigma+1)
    ``FINDIM_L``: fixed-n Laguerre limit, scale b, shift 0
    ``affine``: explicit ``scale`` and ``shift``; no spec needed.
    """

    kind: str
    spec: Optional[EnsembleSpec] = None
    sigma: Optional[float] = None
    tau: Optional[float] = None
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in REGIMES:
            raise ParameterError(f"unknown regime {self.kind!r}; expected one of {REGIMES}")
        if self.kind == "affine":
            if not self.scale > 0:
                raise ParameterError("affine scale must be positive")
            return
        if self.spec is None or self.spec.kind != "jacobi":
            raise ParameterError(f"regime {self.kind} needs a Jacobi ensemble spec")
        if self.kind in ("LLN2", "FINDIM_G") and not (self.sigma is not None and self.sigma > 0):
            raise ParameterError(f"regime {self.kind} needs sigma > 0")
        if self.kind in ("LLN1", "LDP1") and not (self.tau is not None and 0 < self.tau <= 1):
            raise ParameterError(f"regime {self.kind} needs tau in (0, 1]")

    def affine_params(self) -> tuple[float, float]:
        if self.kind == "affine":
            return float(self.scale), float(self.shift)
        spec = self.spec
        n, a, b = spec.n, spec.a, spec.b
        if self.kind == "LLN2":
            s = self.sigma
            return (s + 1) * math.sqrt(b * (1 + s) / (s * n * spec.bp)), s / (s + 1)
        if self.kind in ("LLN1", "LDP1"):
            return b / a, 0.0
        if self.kind == "LDP2":
            return 4 * math.sqrt(b / (n * spec.beta)), 0.5
        if self.kind == "FINDIM_G":
            s = self.sigma
            return (s + 1) * math.sqrt(b * (s + 1) / s), s / (s + 1)
        return b, 0.0  # FINDIM_L


def rescale_matrix(T: TridiagonalMatrix, regime: ScalingRegime) -> TridiagonalMatrix:
    if regime.spec is not None and regime.spec.n != T.n:
        raise ParameterError(f"regime is for n={regime.spec.n} but the matrix has n={T.n}")
    scale, shift = regime.affine_params()
    return T.affine(scale, shift)
