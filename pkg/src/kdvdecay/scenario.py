"""Physical problem descriptions independent of resolution."""

import hashlib
import json
from dataclasses import asdict, dataclass, field

from .core import build_custom_damping, build_damping, build_grid, build_operators, constant_damping
from .datum import InitialDatum
from .errors import ConfigurationError

DAMPING_SHAPES = ("none", "constant", "step", "smooth-ramp")


@dataclass(frozen=True)
class DampingSpec:
    shape: str = "step"
    a0: float = 1.5
    x0: float = 10.0
    ramp_width: float = 0.0

    def __post_init__(self):
        if self.shape not in DAMPING_SHAPES:
            raise ConfigurationError(f"damping.shape must be one of {DAMPING_SHAPES}, got {self.shape!r}")

    def build(self, grid):
        if self.shape == "none":
            return build_custom_damping(grid, [0.0] * grid.N)
        if self.shape == "constant":
            return constant_damping(grid, self.a0)
        return build_damping(grid, self.a0, self.x0, self.shape, self.ramp_width)


@dataclass(frozen=True)
class Scenario:
    L: float = 50.0
    damping: DampingSpec = field(default_factory=DampingSpec)
    datum: InitialDatum = field(default_factory=InitialDatum)
    nonlinear: bool = True
    transport: bool = True

    def build(self, N):
        """Return (grid, damping profile, operators, initial node vector)."""
        grid = build_grid(self.L, N)
        damping = self.damping.build(grid)
        ops = build_operators(grid, damping, transport=self.transport)
        u0, _ = self.datum.sample(grid)
        return grid, damping, ops, u0

    def to_dict(self):
        return {"L": self.L, "damping": asdict(self.damping), "datum": self.datum.to_dict(),
                "nonlinear": self.nonlinear, "transport": self.transport}

    def digest(self, **extra):
        """64-bit hash of the scenario together with resolution parameters."""
        text = json.dumps({"scenario": self.to_dict(), **extra}, sort_keys=True)
        return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")
