"""Damping profiles a(x) >= 0, active beyond an activation point."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .grid import _frozen

SHAPES = ("step", "smooth-ramp", "custom")


@dataclass(frozen=True)
class DampingProfile:
    """Sampled damping with the floor ``a0`` it guarantees beyond ``x_full``.

    ``x_full`` is where the profile first reaches ``a0``: ``x0`` for a step,
    ``x0 + ramp_width`` for a smooth ramp. ``hypothesis_holds`` records
    whether a_i >= a0 at every node with x_i >= x_full.
    """

    values: np.ndarray
    a0: float
    x0: float
    shape: str
    ramp_width: float
    hypothesis_holds: bool

    @property
    def x_full(self):
        return self.x0 + (self.ramp_width if self.shape == "smooth-ramp" else 0.0)

    @property
    def max_value(self):
        return float(np.max(self.values))

    @property
    def is_constant(self):
        return bool(np.all(self.values[1:] == self.values[1]))


def _ramp(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def _hypothesis(grid, values, a0, x_full):
    # tolerance absorbs round-off in x0 = k*dx
    mask = grid.nodes >= x_full - 1e-12 * grid.L
    return bool(np.all(values[mask] >= a0))


def build_damping(grid, a0, x0, shape="step", ramp_width=0.0):
    """Sample a step or C^1 smooth-ramp damping profile on ``grid``.

    step:        a = 0 for x < x0, a = a0 for x >= x0
    smooth-ramp: a = a0 * s^2 (3 - 2s), s = (x - x0) / ramp_width clipped to [0, 1]
    """
    if shape not in ("step", "smooth-ramp"):
        raise ConfigurationError(f"unknown damping shape {shape!r}; use build_custom_damping")
    if not a0 > 0:
        raise ConfigurationError(f"damping floor a0 must be positive, got {a0}")
    if not 0 < x0 < grid.L:
        raise ConfigurationError(f"activation point x0={x0} must lie in (0, L={grid.L})")
    x = grid.nodes
    if shape == "step":
        ramp_width = 0.0
        values = np.where(x >= x0 - 1e-12 * grid.L, a0, 0.0)
    else:
        if ramp_width < 0 or x0 + ramp_width >= grid.L:
            raise ConfigurationError(
                f"ramp [x0, x0+width] = [{x0}, {x0 + ramp_width}] must fit inside [0, L)"
            )
        if ramp_width <= 1e-12 * grid.L:
            values = np.where(x >= x0 - 1e-12 * grid.L, a0, 0.0)
        else:
            values = a0 * _ramp((x - x0) / ramp_width)
    holds = _hypothesis(grid, values, a0, x0 + ramp_width)
    return DampingProfile(_frozen(values), float(a0), float(x0), shape, float(ramp_width), holds)


def constant_damping(grid, a0):
    """a = a0 at every node with x > 0 (the degenerate step with x0 = dx)."""
    return build_damping(grid, a0, grid.dx, "step")


def build_custom_damping(grid, values, a0=None, x0=None):
    """Wrap user samples; the decay hypothesis is checked only if a0 and x0 are given."""
    values = np.asarray(values, dtype=float)
    if not grid.is_compatible(values):
        raise ConfigurationError(f"damping has {values.size} samples, grid has {grid.N}")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ConfigurationError("damping samples must be finite and nonnegative")
    if a0 is None or x0 is None:
        return DampingProfile(_frozen(values), 0.0, float(grid.L), "custom", 0.0, False)
    return DampingProfile(
        _frozen(values), float(a0), float(x0), "custom", 0.0,
        a0 > 0 and _hypothesis(grid, values, a0, x0),
    )
