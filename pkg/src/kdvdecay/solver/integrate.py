"""Time integration drivers and trajectory recording."""

import logging

import numpy as np
from scipy.integrate import trapezoid

from ..core.operators import boundary_trace, embed, interior
from ..errors import BlowUpError, ConfigurationError, NumericalBreakdownError, PanelTooLongError
from .config import State, Trajectory, as_node_vector
from .steppers import CnNewtonStepper, CrankNicolsonMap, ImexStepper, _nonlinear

log = logging.getLogger(__name__)


class Recorder:
    """Collects per-step series and the strided states of one run.

    ``probes`` maps names to callables of the node vector; their values are
    stored once per step in ``Trajectory.series``.
    """

    def __init__(self, ops, cfg, probes=None):
        grid = ops.grid
        self.ops, self.cfg, self.grid = ops, cfg, grid
        n = cfg.n_steps
        self.trace = np.zeros(n + 1)
        self.l2_sq = np.zeros(n + 1)
        self.tail = np.zeros(n + 1)
        self.damped_sq = np.zeros(n + 1)
        self.a = np.asarray(ops.damping.values, dtype=float)
        self.probes = dict(probes or {})
        self.series = {k: [None] * (n + 1) for k in self.probes}
        self.times, self.states = [], []
        self.tail_start = np.searchsorted(grid.nodes, grid.L * (1 - cfg.tail_fraction) - 1e-12 * grid.L)
        self.warnings = []
        self._tail_warned = False

    def record(self, k, v):
        t = k * self.cfg.dt
        if not np.all(np.isfinite(v)):
            raise BlowUpError(t)
        u = embed(v)
        dx = self.grid.dx
        sq = u * u
        self.trace[k] = boundary_trace(u, dx)
        self.l2_sq[k] = trapezoid(sq, dx=dx)
        self.tail[k] = trapezoid(sq[self.tail_start:], dx=dx)
        self.damped_sq[k] = trapezoid(self.a * sq, dx=dx)
        if not self._tail_warned and self.tail[k] > self.cfg.tail_threshold * max(self.l2_sq[0], 1e-300):
            msg = (f"tail mass {self.tail[k]:.3g} on the last {self.cfg.tail_fraction:.0%} of the domain "
                   f"at t={t:.6g} exceeds {self.cfg.tail_threshold:g} of the initial mass; "
                   "the truncation length may be too short")
            self.warnings.append(msg)
            log.warning(msg)
            self._tail_warned = True
        for name, probe in self.probes.items():
            self.series[name][k] = probe(u)
        if k % self.cfg.stride == 0 or k == self.cfg.n_steps:
            self.times.append(t)
            self.states.append(u)

    def trajectory(self, damping, info=None):
        cfg = self.cfg
        return Trajectory(
            grid=self.grid, damping=damping, dt=cfg.dt, stride=cfg.stride, scheme=cfg.scheme,
            nonlinear=cfg.nonlinear, times=np.array(self.times), states=np.array(self.states),
            step_times=np.arange(cfg.n_steps + 1) * cfg.dt, trace=self.trace, l2_sq=self.l2_sq,
            tail_mass=self.tail, damped_sq=self.damped_sq,
            series={k: np.array(v) for k, v in self.series.items()},
            warnings=self.warnings, info=dict(info or {}),
        )


def _initial(u0, ops):
    u = as_node_vector(u0)
    if u.size != ops.grid.N:
        raise ConfigurationError(f"initial state has {u.size} nodes, grid has {ops.grid.N}")
    return interior(u).copy()


def solve(u0, ops, cfg, probes=None):
    """Integrate from t = 0 to cfg.T with the configured scheme."""
    if cfg.scheme == "picard-duhamel":
        return solve_picard(u0, ops, cfg, probes)
    v = _initial(u0, ops)
    rec = Recorder(ops, cfg, probes)
    rec.record(0, v)
    if cfg.scheme == "imex-cn-ab2":
        stepper = ImexStepper(ops, cfg.dt, cfg.nonlinear)
    else:
        stepper = CnNewtonStepper(ops, cfg.dt, cfg.nonlinear, cfg.newton_tol, cfg.newton_max_iter)
    newton_total = 0
    for k in range(1, cfg.n_steps + 1):
        try:
            v = stepper.step(v)
        except NumericalBreakdownError as exc:
            raise type(exc)(f"{exc} (at t={k * cfg.dt:.6g})") from exc
        newton_total += getattr(stepper, "last_iterations", 0)
        rec.record(k, v)
    info = {"newton_iterations": newton_total} if cfg.scheme == "cn-newton" else {}
    return rec.trajectory(ops.damping, info)


def linear_propagator(u0, ops, t, dt):
    """Discrete linear semigroup: Crank-Nicolson steps of size dt up to time t."""
    if t < 0 or dt <= 0:
        raise ConfigurationError("need t >= 0 and dt > 0")
    n = round(t / dt)
    if abs(n * dt - t) > 1e-9 * max(t, dt):
        raise ConfigurationError(f"t={t} is not on the dt={dt} lattice")
    u = as_node_vector(u0)
    if n == 0:
        return State(float(t), u.copy())
    cn = CrankNicolsonMap(ops, dt)
    v = interior(u).copy()
    for _ in range(n):
        v = cn.apply(v)
    if not np.all(np.isfinite(v)):
        raise BlowUpError(t)
    return State(n * dt, embed(v))


def _picard_panel(cn, D1, v0, m, dt, nonlinear, tol, max_iter, dx):
    """Fixed-point iteration of the discrete Duhamel map on one panel of m steps.

    The trapezoid sum over the step lattice obeys the recursion
    V_j = R V_{j-1} + dt/2 (R N_{j-1} + N_j), with R the Crank-Nicolson map.
    Returns (states, iterations) or None when the iteration stops contracting.
    """
    U = np.empty((m + 1, v0.size))
    U[0] = v0
    for j in range(1, m + 1):
        U[j] = cn.apply(U[j - 1])
    if not nonlinear:
        return U, 1
    dists, rises = [], 0
    for it in range(1, max_iter + 1):
        N = -(U * (D1 @ U.T).T + (D1 @ (U * U).T).T) / 3.0
        V = np.empty_like(U)
        V[0] = v0
        for j in range(1, m + 1):
            V[j] = cn.solve(cn.explicit @ (V[j - 1] + 0.5 * dt * N[j - 1])) + 0.5 * dt * N[j]
        if not np.all(np.isfinite(V)):
            return None
        d = float(np.sqrt(np.max(trapezoid(np.pad((V - U) ** 2, ((0, 0), (1, 1))), dx=dx, axis=1))))
        U = V
        if d < tol:
            return U, it
        rises = rises + 1 if dists and d > dists[-1] else 0
        dists.append(d)
        if rises >= 3:
            return None
    raise NumericalBreakdownError(f"Picard iteration did not reach tolerance in {max_iter} iterations")


def solve_picard(u0, ops, cfg, probes=None):
    """Panelwise Picard iteration of the Duhamel formula with trapezoid quadrature."""
    v = _initial(u0, ops)
    rec = Recorder(ops, cfg, probes)
    rec.record(0, v)
    cn = CrankNicolsonMap(ops, cfg.dt)
    base = max(1, round(cfg.panel / cfg.dt))
    k, iters, halvings = 0, [], 0
    m_cur = base
    while k < cfg.n_steps:
        m = min(m_cur, cfg.n_steps - k)
        out = _picard_panel(cn, ops.D1, v, m, cfg.dt, cfg.nonlinear, cfg.picard_tol,
                            cfg.picard_max_iter, ops.grid.dx)
        if out is None:
            if halvings >= cfg.panel_halvings or m_cur == 1:
                raise PanelTooLongError(m_cur * cfg.dt, k * cfg.dt)
            halvings += 1
            m_cur = max(1, m_cur // 2)
            log.info("Picard panel halved to %d steps at t=%.6g", m_cur, k * cfg.dt)
            continue
        U, it = out
        iters.append(it)
        for j in range(1, m + 1):
            rec.record(k + j, U[j])
        k += m
        v = U[-1]
    info = {"picard_iterations": iters, "panel_steps": m_cur, "panel_halvings": halvings}
    return rec.trajectory(ops.damping, info)
