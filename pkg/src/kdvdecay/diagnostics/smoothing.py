"""Smoothing statistics sup_t t^{s/2} e^{mu t} |u(t)|_X / |u0|_Y."""

import numpy as np

from ..core.operators import node_derivative, quadrature
from ..errors import ConfigurationError, UndefinedStatisticError
from .norms import weighted_hs_norm_sq

TAGS = ("H1", "H1-seminorm", "H1-weighted", "Hs_b")


def _norms(tag, grid, m, b, s):
    """Return (order s, norm of u(t), initial weighted L2 norm) callables for a tag."""
    x = grid.nodes
    if tag == "H1":
        return 1, lambda u: np.sqrt(weighted_hs_norm_sq(u, grid, "unit", None, 1)), \
            lambda u: np.sqrt(quadrature(grid, (x + 1.0) * u * u))
    if tag == "H1-seminorm":
        def semi(u):
            ux = node_derivative(u, grid.dx)
            return np.sqrt(quadrature(grid, ux * ux))
        return 1, semi, lambda u: np.sqrt(quadrature(grid, (x + 1.0) * u * u))
    if tag == "H1-weighted":
        if m is None or int(m) != m or m < 1:
            raise ConfigurationError("H1-weighted statistic needs an integer m >= 1")
        return 1, lambda u: np.sqrt(weighted_hs_norm_sq(u, grid, "polynomial", m, 1)), \
            lambda u: np.sqrt(quadrature(grid, (x + 1.0) ** m * u * u))
    if tag == "Hs_b":
        if b is None or not b > 0:
            raise ConfigurationError("Hs_b statistic needs b > 0")
        return s, lambda u: np.sqrt(weighted_hs_norm_sq(u, grid, "exponential", b, s)), \
            lambda u: np.sqrt(quadrature(grid, np.exp(2.0 * b * x) * u * u))
    raise ConfigurationError(f"unknown smoothing norm {tag!r}; expected one of {TAGS}")


def smoothing_probe(grid, tag, m=None, b=None, s=1):
    """Per-step probe of the norm used by ``smoothing_statistic``."""
    _, norm, _ = _norms(tag, grid, m, b, s)
    return {series_key(tag, m, b, s): norm}


def series_key(tag, m=None, b=None, s=1):
    return f"smoothing:{tag}:m={m}:b={b}:s={s}"


def smoothing_statistic(traj, tag="H1", mu=0.0, t_min=None, m=None, b=None, s=1):
    """sup over t >= t_min of t^{s/2} e^{mu t} |u(t)|_X divided by the initial weighted L2 norm.

    Uses a per-step probe series when one was recorded, otherwise the
    recorded states. A trajectory that is identically zero gives 0.
    """
    if mu < 0:
        raise ConfigurationError("mu must be nonnegative")
    grid = traj.grid
    order, norm, init = _norms(tag, grid, m, b, s)
    key = series_key(tag, m, b, s)
    if key in traj.series:
        t, vals = traj.step_times, np.asarray(traj.series[key])
    else:
        t, vals = traj.times, np.array([norm(u) for u in traj.states])
    t_min = traj.dt if t_min is None else t_min
    if not 0 < t_min < t[-1]:
        raise ConfigurationError(f"t_min={t_min} must lie in (0, {t[-1]})")
    u0_norm = init(traj.states[0])
    if u0_norm == 0:
        if not np.any(traj.states) and not np.any(vals):
            return 0.0
        raise UndefinedStatisticError("initial weighted norm is zero")
    mask = t >= t_min - 1e-12
    return float(np.max(t[mask] ** (0.5 * order) * np.exp(mu * t[mask]) * vals[mask]) / u0_norm)
