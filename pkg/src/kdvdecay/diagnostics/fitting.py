"""Exponential decay-rate fits by least squares on log norms."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, InsufficientDataError

MIN_SAMPLES = 10
FLOOR = 1e-12


@dataclass(frozen=True)
class DecayFit:
    norm: str
    t_a: float
    t_b: float
    nu: float
    C: float
    r2: float
    n_samples: int
    floor_reached: bool
    degenerate: bool

    def to_dict(self):
        return {"norm": self.norm, "window": [self.t_a, self.t_b], "nu": self.nu, "C": self.C,
                "r2": self.r2, "n_samples": self.n_samples, "floor_reached": self.floor_reached,
                "degenerate": self.degenerate}


def default_window(T):
    return (0.2 * T, 0.9 * T)


def fit_decay(times, values, window=None, norm="L2"):
    """Fit values ~ C exp(-nu t) on the window by a least-squares line in (t, log value).

    Samples below 1e-12 of the first value are dropped and flagged. R^2 is
    reported as 0 for a constant series (flagged degenerate).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ConfigurationError("times and values must be 1-d arrays of equal length")
    t_a, t_b = default_window(t[-1]) if window is None else window
    if not t_a < t_b:
        raise ConfigurationError(f"empty fit window [{t_a}, {t_b}]")
    inside = (t >= t_a - 1e-12) & (t <= t_b + 1e-12)
    ref = abs(y[0]) if y.size and y[0] != 0 else np.max(np.abs(y), initial=0.0)
    usable = inside & (y > FLOOR * ref) & np.isfinite(y)
    floor = bool(np.any(inside & ~usable))
    n = int(usable.sum())
    if n < MIN_SAMPLES:
        raise InsufficientDataError(f"{n} usable samples in [{t_a}, {t_b}], need {MIN_SAMPLES}")
    ts, ly = t[usable], np.log(y[usable])
    tm, lm = ts.mean(), ly.mean()
    dt, dl = ts - tm, ly - lm
    slope = float(dt @ dl / (dt @ dt))
    intercept = float(lm - slope * tm)
    ss_tot = float(dl @ dl)
    res = dl - slope * dt
    degenerate = ss_tot <= 1e-28 * max(1.0, lm * lm) * n
    r2 = 0.0 if degenerate else min(1.0, max(0.0, 1.0 - float(res @ res) / ss_tot))
    if degenerate:
        slope = 0.0
        intercept = float(lm)
    return DecayFit(norm, float(t_a), float(t_b), -slope, float(np.exp(intercept)), r2, n, floor, degenerate)
