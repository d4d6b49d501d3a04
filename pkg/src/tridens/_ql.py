"""Implicit-shift QL iteration for one unreduced symmetric tridiagonal block.

Only the first row of the eigenvector matrix is accumulated (Golub-Welsch), so
a sweep costs O(n) and the whole decomposition O(n**2).
"""
import math

import numba
import numpy as np


@numba.njit(cache=True)
def ql_first_row(diag, offdiag, first_row, max_shifts):
    """Diagonalise in place.

    ``diag`` (n) and ``offdiag`` (n, last entry ignored) are overwritten with
    eigenvalues and scratch; ``first_row`` (n) is rotated alongside.  Returns
    the number of shifts used, or -1 if ``max_shifts`` was exhausted.
    """
    n = diag.shape[0]
    e = offdiag
    e[n - 1] = 0.0
    shifts = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(diag[m]) + abs(diag[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            if shifts >= max_shifts:
                return -1
            shifts += 1
            # Wilkinson-type shift from the leading 2x2 block
            g = (diag[l + 1] - diag[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = diag[m] - diag[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    diag[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = diag[i + 1] - p
                r = (diag[i] - g) * s + 2.0 * c * b
                p = s * r
                diag[i + 1] = g + p
                g = c * r - b
                f = first_row[i + 1]
                first_row[i + 1] = s * first_row[i] + c * f
                first_row[i] = c * first_row[i] - s * f
                i -= 1
            if underflow:
                continue
            diag[l] -= p
            e[l] = g
            e[m] = 0.0
    return shifts


def warmup():
    d = np.array([0.0, 0.0])
    e = np.array([1.0, 0.0])
    z = np.array([1.0, 0.0])
    ql_first_row(d, e, z, 60)
