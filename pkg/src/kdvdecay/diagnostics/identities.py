"""Weighted energy identities evaluated as discrete residuals.

For a solution and a weight phi, with E = 1/2 int phi u^2 and
G = 3/2 int phi' u_x^2 - 1/2 int (phi' + phi''') u^2 - 1/3 int phi' u^3
    + int phi a u^2 + 1/2 phi(0) u_x(0)^2,
dE/dt + G = 0. With a time weight psi the integrated form is
R = [psi E]_{t1}^{t2} - int psi' E dt + int psi G dt = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from ..core.operators import node_derivative, trapezoid_weights
from ..errors import ConfigurationError, InsufficientResolutionError

TIME_WEIGHTS = ("none", "T-t", "t")


@dataclass(frozen=True)
class IdentityResidual:
    weight: str
    family: str
    param: float
    time_weight: str
    t1: float
    t2: float
    residual: float
    scale: float
    relative: float
    terms: dict


def series_key(w):
    return f"identity:{w.label}"


class IdentityIntegrands:
    """Spatial integrals entering the identity, for several weights at once.

    Calling on a node vector returns, per weight, the five values
    [1/2 int phi u^2, int phi' u_x^2, int (phi'+phi''') u^2, int phi' u^3, int phi a u^2].
    """

    def __init__(self, grid, damping, weights):
        tw = trapezoid_weights(grid)
        self.dx = grid.dx
        self.labels = [w.label for w in weights]
        self.P = np.array([w.phi * tw for w in weights])
        self.P1 = np.array([w.dphi * tw for w in weights])
        self.P13 = np.array([(w.dphi + w.d3phi) * tw for w in weights])
        self.a = np.asarray(getattr(damping, "values", damping), dtype=float)

    def __call__(self, u):
        ux = node_derivative(u, self.dx)
        u2 = u * u
        return np.stack([0.5 * self.P @ u2, self.P1 @ (ux * ux), self.P13 @ u2,
                         self.P1 @ (u2 * u), self.P @ (self.a * u2)], axis=1)

    def probes(self):
        """One probe per weight, sharing the evaluation for the same vector."""
        cache = {"u": None, "val": None}

        def value(u):
            if cache["u"] is not u:
                cache["u"], cache["val"] = u, self(u)
            return cache["val"]

        return {f"identity:{lab}": (lambda u, i=i: value(u)[i]) for i, lab in enumerate(self.labels)}


def identity_probes(grid, damping, weights):
    return IdentityIntegrands(grid, damping, weights).probes()


def _integrand_series(traj, w):
    key = series_key(w)
    if key in traj.series:
        return np.asarray(traj.series[key])
    if traj.stride != 1:
        raise InsufficientResolutionError(
            f"no per-step series for weight {w.label} and states recorded with stride {traj.stride}; "
            "record with stride 1 or attach identity probes"
        )
    integrands = IdentityIntegrands(traj.grid, traj.damping, [w])
    return np.array([integrands(u)[0] for u in traj.states])


def identity_residual(traj, w, time_weight="none", t1=0.0, t2=None):
    """Discrete residual of the weighted energy identity on [t1, t2].

    The cubic term is left out for trajectories computed without the nonlinearity.
    """
    if time_weight not in TIME_WEIGHTS:
        raise ConfigurationError(f"time weight must be one of {TIME_WEIGHTS}")
    dt = traj.dt
    t2 = traj.step_times[-1] if t2 is None else t2
    k1, k2 = round(t1 / dt), round(t2 / dt)
    if not 0 <= k1 < k2 <= len(traj.step_times) - 1:
        raise ConfigurationError(f"interval [{t1}, {t2}] outside the trajectory")
    S = _integrand_series(traj, w)[k1:k2 + 1]
    trace_sq = np.asarray(traj.trace[k1:k2 + 1]) ** 2
    t = traj.step_times[k1:k2 + 1]
    if time_weight == "none":
        psi, dpsi = np.ones_like(t), 0.0
    elif time_weight == "T-t":
        psi, dpsi = t2 - t, -1.0
    else:
        psi, dpsi = t.copy(), 1.0
    E = S[:, 0]

    def tint(f):
        return float(trapezoid(psi * f, dx=dt))

    terms = {
        "energy_end": float(psi[-1] * E[-1]),
        "energy_start": -float(psi[0] * E[0]),
        "time_weight": -dpsi * float(trapezoid(E, dx=dt)),
        "gradient": 1.5 * tint(S[:, 1]),
        "weight_derivatives": -0.5 * tint(S[:, 2]),
        "cubic": -tint(S[:, 3]) / 3.0 if traj.nonlinear else 0.0,
        "damping": tint(S[:, 4]),
        "boundary": 0.5 * w.phi0 * tint(trace_sq),
    }
    R = float(sum(terms.values()))
    scale = max(abs(v) for v in terms.values())
    rel = 0.0 if scale == 0 else R / scale
    return IdentityResidual(w.label, w.family, w.param, time_weight, float(t[0]), float(t[-1]),
                            R, scale, rel, terms)
