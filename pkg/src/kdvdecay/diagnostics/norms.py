"""Weighted norms, Lyapunov functionals and interior derivative bounds."""

import numpy as np

from ..core.operators import node_derivative, node_second_derivative, quadrature
from ..errors import ConfigurationError


def _values(u):
    return np.asarray(getattr(u, "u", u), dtype=float)


def weighted_norm_sq(u, w):
    """Trapezoid value of the integral of phi u^2."""
    u = _values(u)
    return quadrature(w.grid, u * u, w)


def family_weights(grid, family, param, order):
    """Weights applied to the derivatives of order 0..order.

    polynomial m: (x+1)^max(m-i, 0) on the i-th derivative, so m = 0 is the plain
    Sobolev norm; exponential b: e^{2bx} on all.
    """
    x = grid.nodes
    if family in ("unit", "polynomial"):
        m = 0 if family == "unit" else int(param)
        if family == "polynomial" and (param is None or int(param) != param or param < 0):
            raise ConfigurationError(f"polynomial order must be a nonnegative integer, got {param}")
        return [(x + 1.0) ** max(m - i, 0) for i in range(order + 1)]
    if family == "exponential":
        if param is None or not param > 0:
            raise ConfigurationError(f"exponential weight needs b > 0, got {param}")
        e = np.exp(2.0 * param * x)
        return [e] * (order + 1)
    raise ConfigurationError(f"unknown weight family {family!r}")


def weighted_h1_norm_sq(u, grid, family, param=None):
    """|u|^2 and |u_x|^2 under the family's weights for orders 0 and 1."""
    u = _values(u)
    w0, w1 = family_weights(grid, family, param, 1)
    ux = node_derivative(u, grid.dx)
    return quadrature(grid, w0 * u * u) + quadrature(grid, w1 * ux * ux)


def weighted_hs_norm_sq(u, grid, family, param=None, s=1):
    """Sum over i <= s of the weighted squared norms of the i-th derivative (s <= 2)."""
    if s not in (0, 1, 2):
        raise ConfigurationError(f"derivative order s must be 0, 1 or 2, got {s}")
    u = _values(u)
    ws = family_weights(grid, family, param, s)
    ders = [u, node_derivative(u, grid.dx), node_second_derivative(u, grid.dx)][: s + 1]
    return sum(quadrature(grid, w * d * d) for w, d in zip(ws, ders))


def energy(u, grid):
    u = _values(u)
    return 0.5 * quadrature(grid, u * u)


def lyapunov(u, grid, m, d):
    """V_0 = E(u); V_m = 1/2 int (x+1)^m u^2 + d[m-1] V_{m-1}."""
    d = list(d)
    if len(d) != m:
        raise ConfigurationError(f"order m={m} needs {m} coefficients, got {len(d)}")
    if any(not c > 0 for c in d):
        raise ConfigurationError("Lyapunov coefficients must be positive")
    u = _values(u)
    sq = u * u
    y = grid.nodes + 1.0
    V = 0.5 * quadrature(grid, sq)
    for j in range(1, m + 1):
        V = 0.5 * quadrature(grid, y**j * sq) + d[j - 1] * V
    return V


def higher_derivative_norms(u, grid, eps, k_max, m):
    """For k = 1..k_max: trapezoid value of int_eps^L (x+1)^(m-k) |D^k u|^2."""
    if eps < 4 * grid.dx * (1 - 1e-12):
        raise ConfigurationError(f"eps={eps} must be at least 4 dx = {4 * grid.dx}")
    if k_max < 1 or k_max > min(m, 4):
        raise ConfigurationError(f"k_max={k_max} must lie in 1..min(m, 4) = {min(m, 4)}")
    start = int(np.searchsorted(grid.nodes, eps - 1e-12 * grid.L))
    x = grid.nodes[start:]
    d = _values(u)
    out = []
    for k in range(1, k_max + 1):
        d = node_derivative(d, grid.dx)
        seg = d[start:]
        out.append(float(np.trapezoid((x + 1.0) ** (m - k) * seg * seg, dx=grid.dx)))
    return out
