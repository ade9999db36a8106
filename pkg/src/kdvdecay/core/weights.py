"""Spatial weights phi(x) with analytic first and third derivatives."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .grid import _frozen


@dataclass(frozen=True)
class WeightSpec:
    family: str
    param: float
    phi: np.ndarray
    dphi: np.ndarray
    d3phi: np.ndarray
    phi0: float
    label: str
    grid: object = field(default=None, repr=False, compare=False)

    def __repr__(self):
        return f"WeightSpec({self.label})"


def build_weight(grid, family, param=None):
    return _with_grid(_build_weight(grid, family, param), grid)


def _with_grid(w, grid):
    object.__setattr__(w, "grid", grid)
    return w


def _build_weight(grid, family, param):
    """Sample a weight family on ``grid``.

    ``unit``        phi = 1
    ``polynomial``  phi = (x+1)^m, integer m >= 0
    ``exponential`` phi = exp(2 b x), b > 0
    ``linear``      phi = x (vanishes at the origin)
    """
    x = grid.nodes
    if family == "unit":
        one = np.ones_like(x)
        return WeightSpec("unit", 0.0, _frozen(one), _frozen(0 * x), _frozen(0 * x), 1.0, "1")
    if family == "polynomial":
        if param is None or int(param) != param or param < 0:
            raise ConfigurationError(f"polynomial weight needs an integer m >= 0, got {param}")
        m = int(param)
        y = x + 1.0
        phi = y**m
        dphi = m * y ** (m - 1) if m >= 1 else 0 * x
        d3phi = m * (m - 1) * (m - 2) * y ** (m - 3) if m >= 3 else 0 * x
        return WeightSpec("polynomial", float(m), _frozen(phi), _frozen(dphi), _frozen(d3phi),
                          1.0, f"(x+1)^{m}")
    if family == "exponential":
        if param is None or not param > 0:
            raise ConfigurationError(f"exponential weight needs b > 0, got {param}")
        b = float(param)
        e = np.exp(2.0 * b * x)
        return WeightSpec("exponential", b, _frozen(e), _frozen(2 * b * e), _frozen(8 * b**3 * e),
                          1.0, f"exp(2*{b:g}*x)")
    if family == "linear":
        return WeightSpec("linear", 1.0, _frozen(x.copy()), _frozen(np.ones_like(x)),
                          _frozen(0 * x), 0.0, "x")
    raise ConfigurationError(f"unknown weight family {family!r}")


def build_custom_weight(grid, phi, dphi, d3phi, label="custom"):
    """Weight from user samples; derivatives must be supplied analytically."""
    arrs = [np.asarray(a, dtype=float) for a in (phi, dphi, d3phi)]
    for a in arrs:
        if not grid.is_compatible(a) or not np.all(np.isfinite(a)):
            raise ConfigurationError("custom weight samples must be finite and match the grid")
    if np.any(arrs[0] < 0):
        raise ConfigurationError("custom weight must be nonnegative")
    w = WeightSpec("custom", float("nan"), *(_frozen(a) for a in arrs), float(arrs[0][0]), label)
    return _with_grid(w, grid)


def weight_from_key(grid, key):
    """Parse compact keys such as ``"1"``, ``"x"``, ``"poly:2"``, ``"exp:0.4"``."""
    if key in ("1", "unit"):
        return build_weight(grid, "unit")
    if key == "x":
        return build_weight(grid, "linear")
    fam, _, val = str(key).partition(":")
    if fam == "poly":
        return build_weight(grid, "polynomial", int(val))
    if fam == "exp":
        return build_weight(grid, "exponential", float(val))
    raise ConfigurationError(f"unrecognized weight key {key!r}")
