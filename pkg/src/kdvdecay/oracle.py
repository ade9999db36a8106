"""Fine-grid fully implicit reference solutions and refinement studies."""

import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .solver import SolverConfig, State, solve

REFERENCE_N = 8001
REFERENCE_DT = 2e-4
HEADER = struct.Struct("<Qqddd")  # scenario hash, N, L, dt, T
CACHE_ENV = "KDVDECAY_CACHE"


def default_cache_dir():
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "kdvdecay"))


def write_cached(path, key, N, L, dt, T, u):
    """Write header and samples to a temporary file, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = HEADER.pack(key, N, L, dt, T) + np.asarray(u, dtype="<f8").tobytes()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".bin")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cached(path, key, N, L, dt, T):
    """Return the cached samples if the header matches exactly, else None."""
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        return None
    if len(data) != HEADER.size + 8 * N:
        return None
    if HEADER.unpack_from(data) != (key, N, L, dt, T):
        return None
    return np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(float)


def reference_solve(scenario, T, N=REFERENCE_N, dt=REFERENCE_DT, cache_dir=None, use_cache=True):
    """Fully implicit Crank-Nicolson solution at time T on the reference grid, cached on disk."""
    N, L, dt, T = int(N), float(scenario.L), float(dt), float(T)
    key = scenario.digest(N=N, dt=dt, T=T, scheme="cn-newton")
    path = Path(cache_dir or default_cache_dir()) / f"{key:016x}.bin"
    if use_cache:
        u = read_cached(path, key, N, L, dt, T)
        if u is not None:
            return State(T, u)
    _, _, ops, u0 = scenario.build(N)
    cfg = SolverConfig(dt=dt, T=T, scheme="cn-newton", nonlinear=scenario.nonlinear,
                       stride=round(T / dt))
    u = solve(u0, ops, cfg).final.u
    if use_cache:
        write_cached(path, key, N, L, dt, T, u)
    return State(T, u)


@dataclass
class ConvergenceStudy:
    dx: list
    dt: list
    errors: list
    order: float
    valid: bool
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"dx": self.dx, "dt": self.dt, "errors": self.errors, "order": self.order,
                "valid": self.valid, "notes": list(self.notes)}


def fitted_order(h, errors):
    """Least-squares slope of log error against log h."""
    h, e = np.asarray(h, dtype=float), np.asarray(errors, dtype=float)
    if np.any(e <= 0) or len(e) < 2:
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def restrict(u_fine, N_coarse):
    """Samples of a fine-grid node vector at the nodes of a nested coarse grid."""
    ratio = (len(u_fine) - 1) // (N_coarse - 1)
    if (N_coarse - 1) * ratio != len(u_fine) - 1:
        raise ValueError("grids are not nested")
    return np.asarray(u_fine)[::ratio]


def level_parameters(N0, dt0, levels, factor=2):
    return [((N0 - 1) * factor**k + 1, dt0 / factor**k) for k in range(levels)]


def convergence_order(scenario, levels=3, N0=501, dt0=4e-3, T=1.0, scheme="imex-cn-ab2",
                      reference=None, factor=2):
    """Sup-norm errors at time T under simultaneous (dx, dt) refinement.

    Errors are measured against the finest level, or against ``reference``
    (a node vector on a grid nested with every level) when given.
    """
    if levels < 3:
        raise ValueError("a convergence study needs at least 3 levels")
    params = level_parameters(N0, dt0, levels, factor)
    finals = []
    for N, dt in params:
        _, _, ops, u0 = scenario.build(N)
        cfg = SolverConfig(dt=dt, T=T, scheme=scheme, nonlinear=scenario.nonlinear, stride=round(T / dt))
        finals.append(solve(u0, ops, cfg).final.u)
    if reference is None:
        truth, compared = finals[-1], range(levels - 1)
    else:
        truth, compared = np.asarray(getattr(reference, "u", reference)), range(levels)
    errors = [float(np.max(np.abs(finals[k] - restrict(truth, params[k][0])))) for k in compared]
    dxs = [scenario.L / (params[k][0] - 1) for k in compared]
    dts = [params[k][1] for k in compared]
    notes = []
    valid = all(e > 0 for e in errors) and all(b < a for a, b in zip(errors, errors[1:]))
    if not valid:
        notes.append("errors are not positive and strictly decreasing")
    order = fitted_order(dts, errors) if valid else float("nan")
    return ConvergenceStudy(dxs, dts, errors, order, valid, notes)
