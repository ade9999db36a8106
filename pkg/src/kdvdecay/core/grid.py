"""Uniform grid on the truncated half-line [0, L]."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError

MIN_POINTS = 8


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Nodes x_i = i*dx, i = 0..N-1, with x_0 = 0 and x_{N-1} = L."""

    L: float
    N: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(np.arange(self.N) * self.dx))

    @property
    def dx(self):
        return self.L / (self.N - 1)

    @property
    def n_interior(self):
        return self.N - 2

    def is_compatible(self, values):
        return np.shape(values) == (self.N,)


def build_grid(L, N):
    """Return the uniform grid of ``N`` points on ``[0, L]``."""
    if not np.isfinite(L) or L <= 0:
        raise ConfigurationError(f"grid length must be positive, got L={L}")
    if int(N) != N or N < MIN_POINTS:
        raise ConfigurationError(f"need an integer N >= {MIN_POINTS}, got N={N}")
    return Grid(float(L), int(N))
