"""Spectral decomposition of tridiagonal matrices and the measures built from it.

The spectral measure of T puts weight w_i = <e_1, u_i>**2 on eigenvalue
lambda_i; its k-th moment is (T**k)_{11}.  The empirical measure puts weight
1/n (or independent Dirichlet weights) on the same eigenvalues.
"""
from dataclasses import dataclass

import numpy as np

from ._ql import ql_first_row
from .distributions import DirichletParams, sample_dirichlet
from .errors import NumericalError, ParameterError
from .measures import DiscreteMeasure
from .tridiagonal import TridiagonalMatrix

SHIFTS_PER_ROW = 30
MERGE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    first_components_sq: np.ndarray


def _blocks(offdiag: np.ndarray):
    """Index ranges of the unreduced blocks (split at exactly zero subdiagonal entries)."""
    cuts = np.flatnonzero(offdiag == 0.0) + 1
    edges = np.concatenate([[0], cuts, [offdiag.size + 1]])
    return list(zip(edges[:-1], edges[1:]))


def _merge(values, weights, tol):
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    if values.size < 2:
        return values, weights
    starts = np.concatenate([[0], np.flatnonzero(np.diff(values) > tol) + 1])
    merged_w = np.add.reduceat(weights, starts)
    counts = np.diff(np.concatenate([starts, [values.size]]))
    merged_x = np.add.reduceat(values, starts) / counts
    return merged_x, merged_w


def _raw_decompose(T: TridiagonalMatrix):
    n = T.n
    values = np.empty(n)
    first = np.zeros(n)
    for lo, hi in _blocks(T.offdiag):
        d = np.array(T.diag[lo:hi])
        e = np.zeros(hi - lo)
        e[: hi - lo - 1] = T.offdiag[lo : hi - 1]
        # blocks below the first never see e_1, their weights stay exactly 0
        z = np.zeros(hi - lo)
        if lo == 0:
            z[0] = 1.0
        budget = SHIFTS_PER_ROW * (hi - lo)
        if ql_first_row(d, e, z, budget) < 0:
            raise NumericalError(
                f"QL iteration did not converge within {budget} shifts "
                f"(block rows {lo}..{hi - 1} of n={n}, ||T||_inf={T.norm_inf():.3g})"
            )
        values[lo:hi] = d
        first[lo:hi] = z
    return values, first * first


def decompose(T: TridiagonalMatrix) -> SpectralDecomposition:
    """Eigenvalues (ascending) and squared first eigenvector components of ``T``.

    Eigenvalues closer than 1e-12 * (1 + ||T||_inf) are merged into one atom
    carrying the summed weight.  Raises NumericalError when the QL iteration
    needs more than 30 * n shifts.
    """
    values, weights = _raw_decompose(T)
    values, weights = _merge(values, weights, MERGE_RTOL * (1.0 + T.norm_inf()))
    return SpectralDecomposition(values, weights / weights.sum())


def spectral_measure(T: TridiagonalMatrix) -> DiscreteMeasure:
    dec = decompose(T)
    return DiscreteMeasure(dec.eigenvalues, dec.first_components_sq)


def eigenvalues(T: TridiagonalMatrix) -> np.ndarray:
    """All n eigenvalues, ascending, repeated according to multiplicity."""
    return np.sort(_raw_decompose(T)[0])


def empirical_measure(T: TridiagonalMatrix, weighting: str = "uniform", rng=None, concentration=None) -> DiscreteMeasure:
    """Measure on the eigenvalues of ``T`` with uniform or independent Dirichlet weights.

    ``weighting="dirichlet"`` needs ``rng`` and the Dirichlet ``concentration``
    (beta/2 for the classical ensembles).
    """
    eig = eigenvalues(T)
    if weighting == "uniform":
        w = np.full(eig.size, 1.0 / eig.size)
    elif weighting == "dirichlet":
        if rng is None or concentration is None:
            raise ParameterError("dirichlet weighting needs rng and concentration")
        w = sample_dirichlet(DirichletParams(eig.size, concentration), rng)
    else:
        raise ParameterError(f"unknown weighting {weighting!r}")
    x, w = _merge(eig, w, MERGE_RTOL * (1.0 + T.norm_inf()))
    return DiscreteMeasure(x, w / w.sum())


def moment_e1(T: TridiagonalMatrix, k: int) -> float:
    """(T**k)_{11}, computed with k tridiagonal matrix-vector products applied to e_1."""
    if k < 0:
        raise ParameterError("moment order must be nonnegative")
    # T**j e_1 is supported on the first j + 1 coordinates
    sub = T.leading(min(T.n, k + 1))
    v = np.zeros(sub.n)
    v[0] = 1.0
    for _ in range(k):
        v = sub.matvec(v)
    return float(v[0])
