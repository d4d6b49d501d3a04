"""Recursion coefficients of orthonormal polynomials and their chain decompositions.

A probability measure with n atoms has a Jacobi matrix with diagonal d_1..d_n
and positive subdiagonal c_1..c_{n-1}; its orthonormal polynomials satisfy
x P_j = c_{j+1} P_{j+1} + d_{j+1} P_j + c_j P_{j-1}.
The measure lives on [0, inf) iff d_k = z_{2k-2} + z_{2k-1}, c_k**2 = z_{2k-1} z_{2k}
with z_k >= 0 (z_0 = 0), and on [0, 1] iff moreover z_k = p_k (1 - p_{k-1}) with
p_k in [0, 1] (p_0 = 0).
"""
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericalError, ParameterError, SupportError
from .measures import DiscreteMeasure
from .tridiagonal import TridiagonalMatrix

RANGE_TOL = 1e-12
DIVISION_FLOOR = 1e-300


def _vec(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RecursionCoefficients:
    d: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        d, c = _vec(self.d), _vec(self.c)
        if c.size not in (d.size - 1, d.size):
            raise ParameterError(f"c has length {c.size}; expected {d.size - 1} (or {d.size})")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", c)

    def __len__(self):
        return self.d.size

    def to_dict(self) -> dict:
        return {"d": self.d.tolist(), "c": self.c.tolist()}


@dataclass(frozen=True, eq=False)
class ChainDecomposition:
    z: np.ndarray
    p: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "z", _vec(self.z))
        if self.p is not None:
            object.__setattr__(self, "p", _vec(self.p))


def coefficients_to_dict(rc: RecursionCoefficients, chain: Optional[ChainDecomposition] = None) -> dict:
    out = rc.to_dict()
    if chain is not None:
        out["z"] = chain.z.tolist()
        if chain.p is not None:
            out["p"] = chain.p.tolist()
    return out


def coefficients_to_json(rc: RecursionCoefficients, chain: Optional[ChainDecomposition] = None) -> str:
    return json.dumps(coefficients_to_dict(rc, chain))


def coefficients_from_json(text: str) -> tuple[RecursionCoefficients, Optional[ChainDecomposition]]:
    data = json.loads(text)
    try:
        rc = RecursionCoefficients(data["d"], data["c"])
    except KeyError as exc:
        raise ParameterError(f"coefficient JSON is missing key {exc}") from None
    chain = ChainDecomposition(data["z"], data.get("p")) if "z" in data else None
    return rc, chain


def lanczos_coefficients(m: DiscreteMeasure, depth: int) -> RecursionCoefficients:
    """First ``depth`` Jacobi coefficients of ``m`` (Lanczos on diag(atoms) from sqrt(weights)).

    Every new Lanczos vector is orthogonalised twice against all previous ones.
    """
    x = m.atoms
    if depth < 1 or depth > x.size:
        raise ParameterError(f"depth must lie in 1..{x.size} (number of atoms), got {depth}")
    scale = 1.0 + float(np.max(np.abs(x)))
    Q = np.zeros((depth, x.size))
    q = np.sqrt(m.weights)
    q = q / np.linalg.norm(q)
    d = np.empty(depth)
    c = np.empty(depth - 1)
    for j in range(depth):
        Q[j] = q
        r = x * q
        d[j] = q @ r
        for _ in range(2):
            r = r - Q[: j + 1].T @ (Q[: j + 1] @ r)
        if j == depth - 1:
            break
        beta = np.linalg.norm(r)
        if not beta > 1e-13 * scale:
            raise NumericalError(
                f"Lanczos breakdown at step {j + 1}: residual {beta:.3g} is at roundoff level; "
                "the measure is numerically supported on fewer atoms than requested"
            )
        c[j] = beta
        q = r / beta
    return RecursionCoefficients(d, c)


def matrix_from_coefficients(rc: RecursionCoefficients) -> TridiagonalMatrix:
    return TridiagonalMatrix(rc.d, rc.c[: rc.d.size - 1])


def _check_nonnegative(value: float, label: str, what: str) -> float:
    if value < -RANGE_TOL:
        raise SupportError(f"{label} = {value:.6g} < 0: measure not supported on {what}")
    return max(value, 0.0)


def z_decomposition(rc: RecursionCoefficients) -> ChainDecomposition:
    """z_1 = d_1, z_{2k} = c_k**2 / z_{2k-1}, z_{2k+1} = d_{k+1} - z_{2k}.

    Raises SupportError when some z_k < -1e-12 or a division by z <= 1e-300 is
    needed; values in [-1e-12, 0) are clamped to 0.
    """
    n = rc.d.size
    c2 = rc.c[: n - 1] ** 2
    z = np.empty(2 * n - 1)
    z[0] = _check_nonnegative(rc.d[0], "z_1", "[0, inf)")
    for k in range(1, n):
        if z[2 * k - 2] <= DIVISION_FLOOR:
            raise SupportError(f"z_{2 * k - 1} = {z[2 * k - 2]:.3g} vanishes: measure not supported on [0, inf)")
        z[2 * k - 1] = _check_nonnegative(c2[k - 1] / z[2 * k - 2], f"z_{2 * k}", "[0, inf)")
        z[2 * k] = _check_nonnegative(rc.d[k] - z[2 * k - 1], f"z_{2 * k + 1}", "[0, inf)")
    return ChainDecomposition(z)


def canonical_moments(rc: RecursionCoefficients) -> ChainDecomposition:
    """Canonical moments p_1 = z_1, p_k = z_k / (1 - p_{k-1}); requires support in [0, 1]."""
    z = z_decomposition(rc).z
    p = np.empty_like(z)
    prev = 0.0
    for k, zk in enumerate(z):
        denom = 1.0 - prev
        if denom <= DIVISION_FLOOR:
            raise SupportError(f"1 - p_{k} = {denom:.3g} vanishes: measure not supported on [0, 1]")
        pk = zk / denom
        if pk < -RANGE_TOL or pk > 1 + RANGE_TOL:
            raise SupportError(f"p_{k + 1} = {pk:.6g} outside [0, 1]: measure not supported on [0, 1]")
        p[k] = prev = min(max(pk, 0.0), 1.0)
    return ChainDecomposition(z, p)
