"""Exponentially conjugated generator and its numerical abscissa.

For v = e^{bx} u the linear flow becomes v_t = B v with
B = -(D1 - b) - (D1 - b)^3 - diag(a)
  = -D3 + 3b D2 - (1 + 3b^2) D1 + (b + b^3) I - diag(a).
The numerical abscissa (largest eigenvalue of the symmetric part) bounds
the growth rate of |v(t)|.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core.banded import band_from_sparse
from .errors import ConfigurationError, IterationError

DENSE_LIMIT = 1500


def build_conjugated_generator(ops, b):
    if not b > 0:
        raise ConfigurationError(f"conjugation rate b must be positive, got {b}")
    n = ops.n
    return (-ops.D3 + 3.0 * b * ops.D2 - (1.0 + 3.0 * b * b) * ops.D1
            + sp.diags(np.full(n, b + b**3) - ops.a_interior)).tocsr()


def _symmetric_part(B, weights):
    B = sp.csr_matrix(B, dtype=float)
    if weights is not None:
        r = np.sqrt(np.asarray(weights, dtype=float))
        B = sp.diags(r) @ B @ sp.diags(1.0 / r)
    return ((B + B.T) * 0.5).tocsr()


def _bandwidth(S):
    C = S.tocoo()
    return int(np.max(np.abs(C.row - C.col), initial=0))


def _positive_definite(M, bw):
    """Cholesky test of a symmetric sparse matrix."""
    try:
        if M.shape[0] <= DENSE_LIMIT or bw > 16:
            np.linalg.cholesky(M.toarray())
        else:
            ab = band_from_sparse(M, bw, bw)[: bw + 1]
            sla.cholesky_banded(ab, lower=False)
        return True
    except (np.linalg.LinAlgError, sla.LinAlgError):
        return False


def certified_upper_bound(S, lo, hi, rel=1e-9, max_bisections=200):
    """Bisection on sigma with the test 'sigma I - S is positive definite'.

    Returns (lo, hi) with lambda_max(S) in [lo, hi]; both ends are certified,
    hi by a successful factorization and lo by a failed one.
    """
    n, bw = S.shape[0], _bandwidth(S)
    eye = sp.identity(n, format="csr")
    for _ in range(max_bisections):
        if hi - lo <= rel * max(1.0, min(abs(lo), abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        if _positive_definite((mid * eye - S).tocsr(), bw):
            hi = mid
        else:
            lo = mid
    return lo, hi


def numerical_abscissa(B, tol=1e-10, max_iter=500, weights=None, seed=0, return_details=False):
    """Largest eigenvalue of the symmetric part of B (in the inner product with ``weights``).

    A Cholesky-certified bisection brackets the top eigenvalue, then shifted
    inverse power iteration just above the bracket refines it until
    successive Rayleigh quotients differ by less than ``tol``.
    """
    S = _symmetric_part(B, weights)
    n = S.shape[0]
    if S.shape != (n, n):
        raise ConfigurationError("numerical abscissa needs a square matrix")
    diag = S.diagonal()
    radius = np.asarray(abs(S).sum(axis=1)).ravel() - np.abs(diag)
    hi = float(np.max(diag + radius))
    lo = float(np.max(diag))
    lo, hi = certified_upper_bound(S, lo, hi, rel=1e-6)
    gap = max(hi - lo, 1e-8 * max(1.0, abs(hi)))
    sigma = hi + gap
    lu = spla.splu((sigma * sp.identity(n) - S).tocsc())
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    prev = None
    for it in range(1, max_iter + 1):
        v = lu.solve(v)
        v /= np.linalg.norm(v)
        rq = float(v @ (S @ v))
        if prev is not None and abs(rq - prev) < tol:
            if return_details:
                return rq, {"iterations": it, "certified_upper": hi, "lower": lo}
            return rq
        prev = rq
    raise IterationError(rq, max_iter)


def spectral_abscissa(B):
    """Largest real part of the eigenvalues of B (dense; only for moderate sizes)."""
    A = B.toarray() if sp.issparse(B) else np.asarray(B)
    return float(np.max(np.linalg.eigvals(A).real))


@dataclass
class GeneratorAnalysis:
    b: float
    omega: float
    bound: float
    damped_bound: float
    dx: float
    lambda_max: float = None
    details: dict = field(default_factory=dict)

    @property
    def margin(self):
        """Bound b^3 + b + 10 dx^2 minus the abscissa."""
        return self.bound + 10.0 * self.dx**2 - self.omega

    def to_dict(self):
        return {"b": self.b, "omega": self.omega, "bound": self.bound,
                "damped_bound": self.damped_bound, "dx": self.dx, "margin": self.margin,
                "lambda_max": self.lambda_max, "details": dict(self.details)}


def analyze_generator(ops, b, tol=1e-10, with_spectrum=False):
    B = build_conjugated_generator(ops, b)
    omega, details = numerical_abscissa(B, tol=tol, return_details=True)
    a_min = float(np.min(ops.a_interior))
    lam = spectral_abscissa(B) if with_spectrum else None
    return GeneratorAnalysis(b, omega, b**3 + b, b**3 + b - a_min, ops.grid.dx, lam, details)


def predicted_vs_fitted(analysis, fit, tol=0.05):
    """Compare the guaranteed rate -omega with a fitted rate nu for a linear run."""
    guaranteed = -analysis.omega
    if analysis.omega >= 0:
        status, consistent = "no guarantee", None
    else:
        consistent = bool(fit.nu >= guaranteed - tol)
        status = "consistent" if consistent else "inconsistent"
    return {"b": analysis.b, "omega": analysis.omega, "nu": fit.nu, "guaranteed_rate": guaranteed,
            "tolerance": tol, "consistent": consistent, "status": status}
