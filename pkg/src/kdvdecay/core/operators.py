"""Finite-difference operators on the interior unknowns u_1..u_{N-2}.

Boundary values u_0 = 0 and u_{N-1} = 0 are eliminated. Ghost values beyond
the ends follow u_{-k} = -u_k on the left and u_{N-1+k} = u_{N-1-k} on the
right (the latter is the centered form of u_x(L) = 0).

The third derivative is the compact centered stencil plus a small
dissipative correction proportional to the fifth difference,
    D3 u_i = (u_{i+2} - 2u_{i+1} + 2u_{i-1} - u_{i-2}) / (2 dx^3)
             + bias * delta^5 u_{i-1/2} / dx^2,
where delta^5 spans u_{i-3}..u_{i+2}. The correction is O(dx^3) on smooth
data but damps the grid-scale branch of the discrete dispersion relation,
which otherwise carries spurious fast right-going waves generated when
radiation reaches x = 0. With these ghosts the symmetric part of -D3 is
nonpositive, so the semi-discrete energy is nonincreasing, and u_1/dx is
the scheme's boundary trace u_x(0, t).
"""

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp
from scipy.integrate import trapezoid

from ..errors import ConfigurationError
from .banded import band_from_sparse

LOWER, UPPER = 3, 2
DEFAULT_BIAS = 0.25


@dataclass(frozen=True)
class OperatorSet:
    grid: object
    damping: object
    D1: sp.csr_matrix
    D2: sp.csr_matrix
    D3: sp.csr_matrix
    Agen: sp.csr_matrix
    a_interior: np.ndarray
    transport: bool = True
    bias: float = DEFAULT_BIAS

    @property
    def n(self):
        return self.grid.N - 2

    def agen_band(self):
        return band_from_sparse(self.Agen, LOWER, UPPER)


def first_difference(n, dx):
    c = 0.5 / dx
    return sp.diags([-c * np.ones(n - 1), c * np.ones(n - 1)], [-1, 1], format="csr")


def second_difference(n, dx):
    c = 1.0 / dx**2
    return sp.diags([c * np.ones(n - 1), -2 * c * np.ones(n), c * np.ones(n - 1)],
                    [-1, 0, 1], format="csr")


def fold_stencil(N, stencil):
    """Interior matrix of a node stencil {offset: coefficient}, ghosts folded in."""
    n = N - 2
    rows, cols, vals = [], [], []
    for i in range(1, N - 1):
        for off, c in stencil.items():
            j, sign = i + off, 1.0
            if j < 0:
                j, sign = -j, -1.0
            elif j > N - 1:
                j = 2 * (N - 1) - j
            if 0 < j < N - 1:
                rows.append(i - 1)
                cols.append(j - 1)
                vals.append(sign * c)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def third_difference(N, dx, bias=DEFAULT_BIAS):
    stencil = {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}
    for k in range(6):
        off = k - 3
        stencil[off] = stencil.get(off, 0.0) + bias * dx * (-1) ** (5 - k) * comb(5, k)
    return fold_stencil(N, stencil) / dx**3


def build_operators(grid, damping, transport=True, bias=DEFAULT_BIAS):
    """Assemble D1, D2, D3 and Agen = -D3 - D1 - diag(a).

    ``bias`` scales the dissipative fifth-difference part of D3 (0 gives the
    purely centered stencil). ``transport=False`` zeroes the derivative operators, leaving the pointwise
    decay u_t = -a u; it exists as a test hook for time-integration order.
    """
    values = getattr(damping, "values", damping)
    if not grid.is_compatible(values):
        raise ConfigurationError(f"damping has {np.size(values)} samples, grid has {grid.N}")
    n, dx = grid.N - 2, grid.dx
    a_int = np.array(values[1:-1], dtype=float)
    a_int.setflags(write=False)
    if transport:
        D1, D2, D3 = first_difference(n, dx), second_difference(n, dx), third_difference(grid.N, dx, bias)
    else:
        D1 = D2 = D3 = sp.csr_matrix((n, n))
    Agen = (-D3 - D1 - sp.diags(a_int)).tocsr()
    return OperatorSet(grid, damping, D1, D2, D3, Agen, a_int, transport, bias)


def interior(u):
    return np.asarray(u, dtype=float)[1:-1]


def embed(v):
    """Node vector with zero boundary values around interior unknowns."""
    u = np.zeros(v.shape[:-1] + (v.shape[-1] + 2,))
    u[..., 1:-1] = v
    return u


def boundary_trace(u, dx):
    """u_x(0) consistent with the scheme: centered difference against u_{-1} = -u_1."""
    return np.asarray(u)[..., 1] / dx


def one_sided_trace(u, dx):
    """Second-order one-sided u_x(0) for samples of a smooth function."""
    u = np.asarray(u)
    return (-3.0 * u[..., 0] + 4.0 * u[..., 1] - u[..., 2]) / (2.0 * dx)


def node_derivative(u, dx):
    """u_x at every node, using the same ghost values as the operators.

    Node 0 gets u_1/dx (odd reflection), node N-1 gets 0 (even reflection),
    interior nodes the centered difference. Works on stacked rows.
    """
    u = np.asarray(u, dtype=float)
    d = np.empty_like(u)
    d[..., 1:-1] = (u[..., 2:] - u[..., :-2]) / (2.0 * dx)
    d[..., 0] = u[..., 1] / dx
    d[..., -1] = 0.0
    return d


def node_second_derivative(u, dx):
    """u_xx at every node with the same ghost values as ``node_derivative``."""
    u = np.asarray(u, dtype=float)
    d = np.empty_like(u)
    d[..., 1:-1] = (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) / dx**2
    d[..., 0] = 0.0
    d[..., -1] = 2.0 * u[..., -2] / dx**2
    return d


def trapezoid_weights(grid):
    w = np.full(grid.N, grid.dx)
    w[0] = w[-1] = 0.5 * grid.dx
    return w


def quadrature(grid, values, weight=None):
    """Trapezoid rule for the integral of phi * values over [0, L]."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ConfigurationError("quadrature of non-finite values")
    if weight is not None:
        values = values * weight.phi
    out = trapezoid(values, dx=grid.dx, axis=-1)
    return float(out) if values.ndim == 1 else out
