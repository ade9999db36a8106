"""Initial data sampled on a grid with the boundary nodes clamped to zero."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

TAGS = ("gaussian", "sech2", "hat", "bump", "zero", "custom-samples")
CLAMP_REPORT_LEVEL = 1e-8


@dataclass(frozen=True)
class InitialDatum:
    tag: str = "gaussian"
    center: float = 5.0
    width: float = 1.0
    amplitude: float = 1.0
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ConfigurationError(f"unknown datum tag {self.tag!r}; expected one of {TAGS}")
        if self.tag not in ("zero", "custom-samples") and not self.width > 0:
            raise ConfigurationError(f"datum width must be positive, got {self.width}")

    def profile(self, x):
        """Unclamped analytic profile at points ``x``."""
        x = np.asarray(x, dtype=float)
        r = (x - self.center) / self.width if self.width else 0 * x
        A = self.amplitude
        if self.tag == "gaussian":
            return A * np.exp(-r * r)
        if self.tag == "sech2":
            return A / np.cosh(r) ** 2
        if self.tag == "hat":
            return A * np.maximum(0.0, 1.0 - np.abs(r))
        if self.tag == "bump":
            out = np.zeros_like(x)
            inside = np.abs(r) < 1
            out[inside] = A * np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
            return out
        if self.tag == "zero":
            return np.zeros_like(x)
        raise ConfigurationError("custom samples have no analytic profile")

    def sample(self, grid):
        """Return ``(u, clamp)``: boundary-clamped samples and the size of the clamp."""
        if self.tag == "custom-samples":
            u = np.array(self.samples, dtype=float)
            if not grid.is_compatible(u):
                raise ConfigurationError(f"datum has {u.size} samples, grid has {grid.N}")
        else:
            u = self.profile(grid.nodes)
        clamp = float(max(abs(u[0]), abs(u[-1])))
        scale = float(np.max(np.abs(u))) if u.size else 0.0
        if clamp > CLAMP_REPORT_LEVEL * max(scale, abs(self.amplitude)):
            warnings.warn(f"clamping the datum to zero at the boundary moved it by {clamp:.3g}", stacklevel=2)
        u[0] = u[-1] = 0.0
        return u, clamp

    def to_dict(self):
        d = {"tag": self.tag, "center": self.center, "width": self.width, "amplitude": self.amplitude}
        if self.tag == "custom-samples":
            d["samples"] = list(self.samples)
        return d
