"""One-step maps: IMEX Crank-Nicolson/AB2 and fully implicit Crank-Nicolson."""

import numpy as np
import scipy.sparse as sp

from ..core.banded import BandedLU, band_from_sparse
from ..core.operators import LOWER, UPPER, embed, interior
from ..errors import BlowUpError, NumericalBreakdownError
from .config import State


def _nonlinear(v, D1):
    # -(1/3) (v D1 v + D1 v^2); orthogonal to v because D1 is skew
    return -(v * (D1 @ v) + D1 @ (v * v)) / 3.0


def nonlinear_term(u, ops):
    """Skew-split discretization of -u u_x on a node vector; boundary rows are zero."""
    return embed(_nonlinear(interior(u), ops.D1))


def nonlinear_jacobian_band(v, dx):
    """Band storage (1, 1) of the Jacobian of the skew-split term at ``v``."""
    c = 0.5 / dx
    n = v.size
    dv = np.zeros(n)
    dv[1:-1] = c * (v[2:] - v[:-2])
    dv[0], dv[-1] = c * v[1], -c * v[-2]
    ab = np.zeros((3, n))
    ab[0, 1:] = -c * (v[:-1] + 2.0 * v[1:]) / 3.0
    ab[1] = -dv / 3.0
    ab[2, :-1] = c * (v[1:] + 2.0 * v[:-1]) / 3.0
    return ab


class CrankNicolsonMap:
    """The linear one-step map R = (I - dt/2 A)^-1 (I + dt/2 A)."""

    def __init__(self, ops, dt):
        n = ops.n
        eye = sp.identity(n, format="csr")
        self.dt = dt
        self.explicit = (eye + 0.5 * dt * ops.Agen).tocsr()
        self.lu = BandedLU(band_from_sparse(eye - 0.5 * dt * ops.Agen, LOWER, UPPER), LOWER, UPPER)

    def solve(self, rhs):
        return self.lu.solve(rhs)

    def apply(self, v):
        return self.lu.solve(self.explicit @ v)


class ImexStepper:
    """Crank-Nicolson on the linear generator, Adams-Bashforth-2 on the nonlinearity.

    The first step has no nonlinear history; it uses a Heun-type predictor
    (explicit Euler guess, then the trapezoidal average of the two
    nonlinear evaluations), which keeps second order.
    """

    def __init__(self, ops, dt, nonlinear=True):
        self.ops, self.dt, self.nonlinear = ops, dt, nonlinear
        self.cn = CrankNicolsonMap(ops, dt)
        self.prev = None

    def step(self, v):
        if not self.nonlinear:
            return self.cn.apply(v)
        dt, D1 = self.dt, self.ops.D1
        base = self.cn.explicit @ v
        Nn = _nonlinear(v, D1)
        if self.prev is None:
            guess = self.cn.solve(base + dt * Nn)
            out = self.cn.solve(base + 0.5 * dt * (Nn + _nonlinear(guess, D1)))
        else:
            out = self.cn.solve(base + dt * (1.5 * Nn - 0.5 * self.prev))
        self.prev = Nn
        return out


class CnNewtonStepper:
    """Fully implicit Crank-Nicolson solved by Newton's method with a banded Jacobian."""

    def __init__(self, ops, dt, nonlinear=True, tol=1e-12, max_iter=20):
        self.ops, self.dt, self.nonlinear = ops, dt, nonlinear
        self.tol, self.max_iter = tol, max_iter
        self.cn = CrankNicolsonMap(ops, dt)
        self.A_band = ops.agen_band()
        self.last_iterations = 0

    def _residual(self, w, fixed):
        Aw = self.ops.Agen @ w
        if self.nonlinear:
            Aw = Aw + _nonlinear(w, self.ops.D1)
        return w - 0.5 * self.dt * Aw - fixed

    def step(self, v):
        dt, ops = self.dt, self.ops
        fixed = self.cn.explicit @ v
        if self.nonlinear:
            fixed = fixed + 0.5 * dt * _nonlinear(v, ops.D1)
        scale = max(1.0, float(np.max(np.abs(v))))
        w = v.copy()
        for it in range(1, self.max_iter + 1):
            F = self._residual(w, fixed)
            if self.nonlinear:
                J = -0.5 * dt * self.A_band
                J[UPPER] += 1.0
                J[UPPER - 1:UPPER + 2] -= 0.5 * dt * nonlinear_jacobian_band(w, ops.grid.dx)
                delta = BandedLU(J, LOWER, UPPER).solve(-F)
            else:
                delta = self.cn.solve(-F)
            w = w + delta
            if not np.all(np.isfinite(w)):
                break
            if np.max(np.abs(delta)) < self.tol * scale:
                self.last_iterations = it
                return w
            if np.max(np.abs(self._residual(w, fixed))) < self.tol * scale:
                self.last_iterations = it
                return w
        raise NumericalBreakdownError(f"Newton did not converge in {self.max_iter} iterations")


def step_imex(state, ops, cfg, prev_nonlinear=None):
    """Advance one IMEX step; ``prev_nonlinear`` is N(u) at the previous step (node vector)."""
    stepper = ImexStepper(ops, cfg.dt, cfg.nonlinear)
    if prev_nonlinear is not None:
        stepper.prev = interior(prev_nonlinear)
    v = stepper.step(interior(state.u))
    return State(state.t + cfg.dt, _checked(embed(v), state.t + cfg.dt))


def step_cn_newton(state, ops, cfg):
    """Advance one fully implicit Crank-Nicolson step."""
    stepper = CnNewtonStepper(ops, cfg.dt, cfg.nonlinear, cfg.newton_tol, cfg.newton_max_iter)
    v = stepper.step(interior(state.u))
    return State(state.t + cfg.dt, _checked(embed(v), state.t + cfg.dt))


def _checked(u, t):
    if not np.all(np.isfinite(u)):
        raise BlowUpError(t)
    return u
