"""Solver configuration, states and trajectories."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError

SCHEMES = ("imex-cn-ab2", "cn-newton", "picard-duhamel")


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    T: float
    scheme: str = "imex-cn-ab2"
    nonlinear: bool = True
    newton_tol: float = 1e-12
    newton_max_iter: int = 20
    picard_tol: float = 1e-10
    picard_max_iter: int = 60
    panel: float = 0.25
    panel_halvings: int = 3
    stride: int = 1
    tail_fraction: float = 0.1
    tail_threshold: float = 1e-6

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not (self.dt > 0 and self.T > 0 and self.dt < self.T):
            raise ConfigurationError(f"need 0 < dt < T, got dt={self.dt}, T={self.T}")
        n = round(self.T / self.dt)
        if abs(n * self.dt - self.T) > 1e-9 * self.T:
            raise ConfigurationError(f"T={self.T} is not a whole number of steps dt={self.dt}")
        for name in ("newton_tol", "picard_tol", "panel", "tail_threshold"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.stride < 1 or self.newton_max_iter < 1 or self.picard_max_iter < 1:
            raise ConfigurationError("stride and iteration limits must be at least 1")
        if not 0 < self.tail_fraction < 1:
            raise ConfigurationError("tail_fraction must lie in (0, 1)")

    @property
    def n_steps(self):
        return round(self.T / self.dt)


@dataclass(frozen=True)
class State:
    t: float
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 1 or u.size < 3:
            raise ConfigurationError("state must be a node vector")
        if not np.all(np.isfinite(u)):
            raise ConfigurationError("state has non-finite entries")
        if u[0] != 0.0 or u[-1] != 0.0:
            raise ConfigurationError("state must vanish at both boundary nodes")
        object.__setattr__(self, "u", u)


def as_node_vector(u0):
    return State(0.0, u0.u if isinstance(u0, State) else u0).u


@dataclass
class Trajectory:
    """Recorded states plus per-step series.

    ``step_times`` holds every lattice time 0, dt, ..., T; ``trace``,
    ``l2_sq``, ``tail_mass``, ``damped_sq`` (the integral of a u^2) and each
    entry of ``series`` have one value per entry of ``step_times``.
    ``times``/``states`` are the recorded subset (every ``stride``-th step
    and the final one).
    """

    grid: object
    damping: object
    dt: float
    stride: int
    scheme: str
    nonlinear: bool
    times: np.ndarray
    states: np.ndarray
    step_times: np.ndarray
    trace: np.ndarray
    l2_sq: np.ndarray
    tail_mass: np.ndarray
    damped_sq: np.ndarray
    series: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def final(self):
        return State(float(self.times[-1]), self.states[-1])

    def state_at(self, k):
        return State(float(self.times[k]), self.states[k])
