"""Discrete probability measures, the semicircle and Marchenko-Pastur laws, and the Kolmogorov distance."""
import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite measure sum_i weights[i] * delta(atoms[i]) with strictly ascending atoms."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.array(self.atoms, dtype=float).reshape(-1)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if x.size == 0 or x.size != w.size:
            raise ParameterError("atoms and weights must be nonempty and of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise ParameterError("atoms and weights must be finite")
        if np.any(np.diff(x) <= 0):
            raise ParameterError("atoms must be strictly ascending")
        if np.any(w < 0):
            raise ParameterError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ParameterError(f"weights sum to {w.sum()!r}, not 1")
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_unsorted(cls, atoms, weights=None) -> "DiscreteMeasure":
        """Sort atoms, merge exact duplicates and normalise the weights (uniform if omitted)."""
        x = np.asarray(atoms, dtype=float).reshape(-1)
        w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if x.size != w.size:
            raise ParameterError("atoms and weights must have equal length")
        ux, inverse = np.unique(x, return_inverse=True)
        uw = np.bincount(inverse.reshape(-1), weights=w, minlength=ux.size)
        return cls(ux, uw / uw.sum())

    @classmethod
    def from_samples(cls, samples) -> "DiscreteMeasure":
        """Empirical distribution of a sample."""
        return cls.from_unsorted(samples)

    def __len__(self):
        return self.atoms.size

    def cdf(self, x):
        """Right-continuous distribution function."""
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.atoms, x, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def moment(self, k: int) -> float:
        return float(np.dot(self.weights, self.atoms ** k))

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteMeasure":
        try:
            return cls(data["atoms"], data["weights"])
        except KeyError as exc:
            raise ParameterError(f"measure JSON is missing key {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["atom", "weight"])
        for x, w in zip(self.atoms, self.weights):
            writer.writerow([repr(float(x)), repr(float(w))])
        return buf.getvalue()


class ReferenceLaw:
    """Base for the two absolutely continuous limit laws."""

    lower: float
    upper: float

    def density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError


class Semicircle(ReferenceLaw):
    """Semicircle law on [-2, 2], density sqrt(4 - x**2) / (2 pi)."""

    lower, upper = -2.0, 2.0

    def __repr__(self):
        return "Semicircle()"

    def __eq__(self, other):
        return isinstance(other, Semicircle)

    def __hash__(self):
        return hash("Semicircle")

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 2
        return np.where(inside, np.sqrt(np.where(inside, 4 - x * x, 0.0)) / (2 * np.pi), 0.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
        return np.clip(0.5 + x * np.sqrt(4 - x * x) / (4 * np.pi) + np.arcsin(x / 2) / np.pi, 0.0, 1.0)


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    """Integral of ``f`` over [a, b] by adaptive Simpson with Richardson correction."""
    if b <= a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4 * flm + fm) / 6
        right = (b - m) * (fm + 4 * frm + fb) / 6
        err = left + right - whole
        if depth >= max_depth or abs(err) <= 15 * tol:
            total += left + right + err / 15
        else:
            stack.append((a, m, fa, flm, fm, left, tol / 2, depth + 1))
            stack.append((m, b, fm, frm, fb, right, tol / 2, depth + 1))
    return total


MP_CDF_TOL = 1e-10
_MP_PANELS = 16


class MarchenkoPastur(ReferenceLaw):
    """Marchenko-Pastur law MP(tau), 0 < tau <= 1.

    Density sqrt((x - lo)(hi - x)) / (2 pi tau x) on (lo, hi) with lo, hi = (sqrt(tau) -/+ 1)**2.
    The CDF is integrated in the angle variable x = lo + 2 r sin(theta/2)**2,
    r = 2 sqrt(tau), which removes the square-root edge singularities; panel
    sums are cached per tau.
    """

    def __init__(self, tau: float):
        if not (0 < tau <= 1):
            raise ParameterError(f"tau must lie in (0, 1], got {tau!r}")
        self.tau = float(tau)
        self.lower = (math.sqrt(tau) - 1) ** 2
        self.upper = (math.sqrt(tau) + 1) ** 2

    def __repr__(self):
        return f"MarchenkoPastur(tau={self.tau!r})"

    def __eq__(self, other):
        return isinstance(other, MarchenkoPastur) and other.tau == self.tau

    def __hash__(self):
        return hash(("MarchenkoPastur", self.tau))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lower) & (x < self.upper)
        xs = np.where(inside, x, 1.0)
        val = np.sqrt(np.maximum((xs - self.lower) * (self.upper - xs), 0.0)) / (2 * np.pi * self.tau * xs)
        return np.where(inside, val, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.array([_mp_cdf(self.tau, float(v)) for v in x.reshape(-1)])
        return out.reshape(x.shape) if x.ndim else float(out[0])


def _mp_theta_integrand(tau: float):
    lo = (math.sqrt(tau) - 1) ** 2
    r = 2 * math.sqrt(tau)

    def f(theta):
        s, c = math.sin(theta / 2), math.cos(theta / 2)
        if lo == 0.0:
            return r * c * c / (math.pi * tau)
        return 4 * r * r * s * s * c * c / (2 * math.pi * tau * (lo + 2 * r * s * s))

    return f


@lru_cache(maxsize=64)
def _mp_panels(tau: float):
    f = _mp_theta_integrand(tau)
    edges = np.linspace(0.0, math.pi, _MP_PANELS + 1)
    sums = [adaptive_simpson(f, edges[i], edges[i + 1], MP_CDF_TOL / (2 * _MP_PANELS)) for i in range(_MP_PANELS)]
    cum = np.concatenate([[0.0], np.cumsum(sums)])
    return edges, cum


def _mp_cdf(tau: float, x: float) -> float:
    lo = (math.sqrt(tau) - 1) ** 2
    hi = (math.sqrt(tau) + 1) ** 2
    if x <= lo:
        return 0.0
    if x >= hi:
        return 1.0
    r = 2 * math.sqrt(tau)
    theta = 2 * math.asin(min(1.0, math.sqrt((x - lo) / (2 * r))))
    edges, cum = _mp_panels(tau)
    j = min(int(np.searchsorted(edges, theta, side="right")) - 1, _MP_PANELS - 1)
    val = cum[j] + adaptive_simpson(_mp_theta_integrand(tau), edges[j], theta, MP_CDF_TOL / 2)
    return min(1.0, max(0.0, val))


def cdf(m, x):
    """Distribution function of a DiscreteMeasure or ReferenceLaw."""
    return m.cdf(x)


def reference_density(law: ReferenceLaw, x):
    return law.density(x)


def _dk_discrete_continuous(m: DiscreteMeasure, law: ReferenceLaw) -> float:
    right = np.cumsum(m.weights)
    left = right - m.weights
    fc = np.asarray(law.cdf(m.atoms), dtype=float)
    return float(max(np.max(np.abs(right - fc)), np.max(np.abs(left - fc))))


def _dk_discrete_discrete(m1: DiscreteMeasure, m2: DiscreteMeasure) -> float:
    grid = np.union1d(m1.atoms, m2.atoms)
    return float(np.max(np.abs(m1.cdf(grid) - m2.cdf(grid))))


def _dk_continuous(l1: ReferenceLaw, l2: ReferenceLaw) -> float:
    from scipy.optimize import minimize_scalar

    lo, hi = min(l1.lower, l2.lower), max(l1.upper, l2.upper)
    grid = np.linspace(lo, hi, 2001)
    diff = np.abs(np.asarray(l1.cdf(grid)) - np.asarray(l2.cdf(grid)))
    best = float(diff.max())
    h = grid[1] - grid[0]
    for i in np.argsort(diff)[-3:]:
        res = minimize_scalar(
            lambda t: -abs(float(l1.cdf(t)) - float(l2.cdf(t))),
            bounds=(max(lo, grid[i] - h), min(hi, grid[i] + h)),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return best


def kolmogorov_distance(m1, m2) -> float:
    """sup_x |F_1(x) - F_2(x)|.

    Exact for discrete inputs: discrete-vs-discrete evaluates both CDFs on the
    merged atom set; discrete-vs-continuous compares the continuous CDF with the
    left and right limits of the step function at every atom.
    """
    d1, d2 = isinstance(m1, DiscreteMeasure), isinstance(m2, DiscreteMeasure)
    if d1 and d2:
        return _dk_discrete_discrete(m1, m2)
    if d1:
        return _dk_discrete_continuous(m1, m2)
    if d2:
        return _dk_discrete_continuous(m2, m1)
    return _dk_continuous(m1, m2)
