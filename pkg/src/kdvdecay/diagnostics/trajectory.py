"""Run-level diagnostics: norm series, Lyapunov decrease, observability."""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from ..errors import ConfigurationError, UndefinedStatisticError
from .norms import lyapunov, weighted_norm_sq

MAX_DOUBLINGS = 3


def norm_series(traj, w):
    """Recorded times and weighted L2 norms sqrt(int phi u^2)."""
    return traj.times, np.sqrt(np.array([weighted_norm_sq(u, w) for u in traj.states]))


def observability_ratio(traj, t1=0.0, t2=None):
    """int int u^2 / (1/2 int u_x(0)^2 dt + int int a u^2) over [t1, t2]."""
    dt = traj.dt
    t2 = traj.step_times[-1] if t2 is None else t2
    k1, k2 = round(t1 / dt), round(t2 / dt)
    if not 0 <= k1 < k2 < len(traj.step_times):
        raise ConfigurationError(f"interval [{t1}, {t2}] outside the trajectory")
    sl = slice(k1, k2 + 1)
    num = trapezoid(traj.l2_sq[sl], dx=dt)
    den = 0.5 * trapezoid(traj.trace[sl] ** 2, dx=dt) + trapezoid(traj.damped_sq[sl], dx=dt)
    if den <= 0:
        raise UndefinedStatisticError("observability denominator vanishes")
    return float(num / den)


@dataclass
class LyapunovSeries:
    m: int
    d: list
    times: np.ndarray
    values: np.ndarray
    nonincreasing: bool
    doublings: int = 0
    flags: list = field(default_factory=list)

    def to_dict(self):
        return {"m": self.m, "d": list(self.d), "times": self.times.tolist(),
                "values": self.values.tolist(), "nonincreasing": self.nonincreasing,
                "doublings": self.doublings, "flags": list(self.flags)}


def lattice_indices(traj, period):
    """Indices of recorded states at t = k * period."""
    idx = []
    for k in range(int(np.floor(traj.times[-1] / period + 1e-9)) + 1):
        j = int(np.argmin(np.abs(traj.times - k * period)))
        if abs(traj.times[j] - k * period) > 1e-9 * max(1.0, period):
            raise ConfigurationError(f"time {k * period} was not recorded; adjust the stride")
        idx.append(j)
    return idx


def lyapunov_series(traj, m, d=None, period=5.0, retry=True, tol=1e-12):
    """V_m on the lattice k*period; when not nonincreasing, doubles d up to 3 times."""
    d = [10.0] * m if d is None else [float(c) for c in d]
    idx = lattice_indices(traj, period)
    times = traj.times[idx]
    doublings = 0
    while True:
        vals = np.array([lyapunov(traj.states[j], traj.grid, m, d) for j in idx])
        ok = bool(np.all(np.diff(vals) <= tol * max(vals[0], 1e-300)))
        if ok or not retry or doublings >= MAX_DOUBLINGS or m == 0:
            break
        d = [2.0 * c for c in d]
        doublings += 1
    flags = [] if ok else [f"increase d_{m - 1}"]
    if ok and doublings:
        flags.append(f"coefficients doubled {doublings} time(s)")
    return LyapunovSeries(m, d, times, vals, ok, doublings, flags)
