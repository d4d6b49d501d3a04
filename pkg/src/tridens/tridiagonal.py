"""Symmetric tridiagonal matrices stored as diagonal + subdiagonal."""
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix with diagonal ``diag`` (d_1..d_n) and subdiagonal ``offdiag`` (c_1..c_{n-1})."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag, offdiag = _frozen(self.diag), _frozen(self.offdiag)
        if diag.size < 1:
            raise ParameterError("matrix must have at least one row")
        if offdiag.size != diag.size - 1:
            raise ParameterError(f"offdiag has length {offdiag.size}, expected {diag.size - 1}")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ParameterError("matrix entries must be finite")
        if np.any(offdiag < 0):
            raise ParameterError("offdiag entries must be nonnegative")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return self.diag.size

    def __eq__(self, other):
        if not isinstance(other, TridiagonalMatrix):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.offdiag, other.offdiag)

    def __repr__(self):
        return f"TridiagonalMatrix(diag={self.diag.tolist()}, offdiag={self.offdiag.tolist()})"

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += self.offdiag
        row[1:] += self.offdiag
        return float(row.max())

    def gershgorin_bounds(self) -> tuple[float, float]:
        radius = np.zeros(self.n)
        radius[:-1] += self.offdiag
        radius[1:] += self.offdiag
        return float((self.diag - radius).min()), float((self.diag + radius).max())

    def affine(self, scale: float, shift: float = 0.0) -> "TridiagonalMatrix":
        """Matrix of ``scale * (T - shift * I)``; eigenvalues map as x -> scale * (x - shift)."""
        if scale <= 0:
            raise ParameterError("scale must be positive")
        return TridiagonalMatrix(scale * (self.diag - shift), scale * self.offdiag)

    def leading(self, k: int) -> "TridiagonalMatrix":
        return TridiagonalMatrix(self.diag[:k], self.offdiag[: k - 1])

    def to_dict(self) -> dict:
        return {"diag": self.diag.tolist(), "offdiag": self.offdiag.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "TridiagonalMatrix":
        try:
            return cls(data["diag"], data["offdiag"])
        except KeyError as exc:
            raise ParameterError(f"matrix JSON is missing key {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TridiagonalMatrix":
        return cls.from_dict(json.loads(text))
