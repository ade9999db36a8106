"""Banded storage and LU solves through LAPACK gbtrf/gbtrs."""

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lapack

from ..errors import NumericalBreakdownError


def band_from_sparse(M, lower, upper):
    """LAPACK band storage ``ab[upper + i - j, j] = M[i, j]`` of a sparse matrix."""
    M = sp.dia_matrix(M)
    n = M.shape[0]
    ab = np.zeros((lower + upper + 1, n))
    for off, row in zip(M.offsets, M.data):
        if off > upper or -off > lower:
            if np.any(row):
                raise ValueError(f"entry on diagonal {off} outside band ({lower}, {upper})")
            continue
        lo, hi = max(off, 0), min(n, n + off)
        ab[upper - off, lo:hi] += row[lo:hi]
    return ab


def sparse_from_band(ab, lower, upper):
    n = ab.shape[1]
    diags, offsets = [], []
    for off in range(-lower, upper + 1):
        lo, hi = max(off, 0), min(n, n + off)
        diags.append(ab[upper - off, lo:hi])
        offsets.append(off)
    return sp.diags(diags, offsets, shape=(n, n), format="csr")


class BandedLU:
    """LU factorization of a banded matrix, reusable across right-hand sides."""

    def __init__(self, ab, lower, upper):
        self.lower, self.upper = lower, upper
        work = np.zeros((2 * lower + upper + 1, ab.shape[1]), order="F")
        work[lower:] = ab
        self._lu, self._piv, info = lapack.dgbtrf(work, lower, upper, overwrite_ab=1)
        if info != 0:
            raise NumericalBreakdownError(f"banded factorization failed (info={info})")

    def solve(self, b):
        x, info = lapack.dgbtrs(self._lu, self.lower, self.upper, b, self._piv)
        if info != 0:
            raise NumericalBreakdownError(f"banded solve failed (info={info})")
        return x


def solve_band(ab, lower, upper, b):
    """One-off solve of a banded system."""
    return BandedLU(ab, lower, upper).solve(b)
