"""Experiment orchestration: run, verify, sweep, spectrum and refit."""

import copy
import csv
import itertools
import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..core import trapezoid_weights, weight_from_key
from ..diagnostics import (
    corpus_report,
    fit_decay,
    higher_derivative_norms,
    identity_probes,
    identity_residual,
    lyapunov,
    lyapunov_series,
    observability_ratio,
    random_smooth_states,
    smoothing_probe,
    smoothing_statistic,
)
from ..errors import ConfigurationError, ExperimentError, InsufficientDataError, KdvError, UndefinedStatisticError
from ..oracle import fitted_order
from ..solver import SolverConfig, solve
from ..spectral import analyze_generator
from .config import load_config

log = logging.getLogger(__name__)

OUT_ENV = "KDVDECAY_OUT"
ORDER_TARGET = 1.8


def clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dumps(obj):
    return json.dumps(clean(obj), sort_keys=True, indent=2) + "\n"


def resolve_out(cli_out, cfg):
    """Output directory: --out flag, then the environment variable, then the config."""
    if cli_out:
        return Path(cli_out)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    return Path(cfg.raw["output"]["dir"])


@dataclass
class RunResult:
    columns: list
    table: np.ndarray
    summary: dict
    trajectory: object


def _norm_column(w):
    return "L2" if w.family == "unit" else f"L2[{w.label}]"


def _fit(t, y, window, name):
    try:
        return fit_decay(t, y, window, norm=name).to_dict()
    except InsufficientDataError as exc:
        return {"norm": name, "insufficient_signal": True, "message": str(exc)}


def _abscissa(ops, bs, constant):
    out = []
    for b in bs:
        ga = analyze_generator(ops, float(b))
        entry = ga.to_dict()
        entry["pass"] = bool(ga.margin >= 0)
        if constant:
            entry["damped_margin"] = ga.damped_bound + 10.0 * ga.dx**2 - ga.omega
            entry["pass"] = entry["pass"] and bool(entry["damped_margin"] >= 0)
        out.append(entry)
    return out


def _residuals(traj, grid, weights, time_weights, tol):
    out = []
    for key in weights:
        w = weight_from_key(grid, key)
        for tw in time_weights:
            r = identity_residual(traj, w, tw)
            out.append({"weight": key, "label": r.weight, "time_weight": tw, "residual": r.residual,
                        "scale": r.scale, "relative": r.relative, "pass": bool(abs(r.relative) <= tol)})
    return out


def execute(cfg, seed=None):
    """Solve the configured scenario and evaluate every requested diagnostic."""
    if not hasattr(cfg, "raw"):
        cfg = load_config(cfg)
    try:
        return _execute(cfg, seed)
    except KdvError as exc:
        if isinstance(exc, (ConfigurationError, ExperimentError)):
            raise
        raise ExperimentError(cfg.name, exc) from exc


def _execute(cfg, seed):
    dg = cfg.diagnostics
    seed = dg["seed"] if seed is None else seed
    scenario = cfg.scenario
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        grid, damping, ops, u0 = scenario.build(cfg.N)
    notes = [str(w.message) for w in caught]
    scfg = cfg.solver
    probes = identity_probes(grid, damping, [weight_from_key(grid, k) for k in dg["identity_weights"]])
    for sm in dg["smoothing"]:
        probes.update(smoothing_probe(grid, sm["norm"], sm["m"], sm["b"], sm["s"]))
    traj = solve(u0, ops, scfg, probes)
    notes += traj.warnings
    zero = not np.any(u0)

    t = traj.times
    k = np.rint(t / scfg.dt).astype(int)
    columns, data = ["t"], [t]
    fits = {}
    tw = trapezoid_weights(grid)
    window = tuple(dg["fit_window"]) if dg["fit_window"] else None
    for key in ["1"] + [n for n in dg["norms"] if n != "1"]:
        w = weight_from_key(grid, key)
        name = _norm_column(w)
        vals = np.sqrt(traj.states**2 @ (w.phi * tw))
        columns.append(name)
        data.append(vals)
        fits[name] = _fit(t, vals, window, name)
    lyap = []
    for entry in dg["lyapunov"]:
        ls = lyapunov_series(traj, entry["m"], entry["d"], dg["lyapunov_period"])
        lyap.append(ls.to_dict())
        columns.append(f"V{entry['m']}")
        data.append(np.array([lyapunov(u, grid, ls.m, ls.d) for u in traj.states]))
    columns += ["trace", "tail_mass"]
    data += [traj.trace[k], traj.tail_mass[k]]
    table = np.column_stack(data)

    residuals = _residuals(traj, grid, dg["identity_weights"], dg["time_weights"], dg["residual_tolerance"])

    inequalities = {}
    if dg["inequality_corpus"]:
        states = random_smooth_states(grid, int(dg["corpus_size"]), seed=seed)
        inequalities["corpus"] = corpus_report(states, grid, tuple(dg["corpus_b"]))
        inequalities["snapshots"] = corpus_report(traj.states, grid, tuple(dg["corpus_b"]))
        inequalities["seed"] = seed

    abscissa = _abscissa(ops, dg["abscissa_b"], damping.is_constant and damping.max_value > 0)

    observability = None
    if dg["observability"]:
        try:
            observability = observability_ratio(traj)
        except UndefinedStatisticError as exc:
            notes.append(f"observability ratio undefined: {exc}")

    smoothing = []
    for sm in dg["smoothing"]:
        entry = dict(sm)
        try:
            entry["value"] = smoothing_statistic(traj, sm["norm"], sm["mu"], sm["t_min"], sm["m"], sm["b"], sm["s"])
        except UndefinedStatisticError as exc:
            entry["value"], entry["message"] = None, str(exc)
        smoothing.append(entry)

    higher = None
    if dg["higher_derivatives"]:
        h = dg["higher_derivatives"]
        higher = {"eps": h["eps"], "k_max": h["k_max"], "m": h["m"],
                  "values": higher_derivative_norms(traj.final.u, grid, h["eps"], h["k_max"], h["m"])}

    fit_ok = [f.get("nu", 0.0) > 0 for f in fits.values() if not f.get("insufficient_signal")]
    flags = {
        "zero_datum": zero,
        "fit_positive": bool(fit_ok) and all(fit_ok) and len(fit_ok) == len(fits),
        "lyapunov_decrease": all(ls["nonincreasing"] for ls in lyap),
        "residuals_pass": all(r["pass"] for r in residuals),
        "inequalities_pass": all(v["all_pass"] for v in inequalities.values() if isinstance(v, dict)),
        "abscissa_pass": all(a["pass"] for a in abscissa),
        "tail_warning": bool(traj.warnings),
    }
    effective = cfg.to_dict()
    effective.pop("output", None)
    summary = {
        "name": cfg.name,
        "config": effective,
        "scenario_hash": f"{scenario.digest(N=cfg.N, dt=scfg.dt, T=scfg.T):016x}",
        "columns": columns,
        "n_rows": int(table.shape[0]),
        "fits": fits,
        "residuals": residuals,
        "lyapunov": lyap,
        "inequalities": inequalities,
        "abscissa": abscissa,
        "observability_ratio": observability,
        "smoothing": smoothing,
        "higher_derivatives": higher,
        "solver_info": traj.info,
        "flags": flags,
        "warnings": notes,
    }
    return RunResult(columns, table, clean(summary), traj)


def summary_schema():
    return json.loads(resources.files(__package__).joinpath("summary.schema.json").read_text())


def validate_summary(summary):
    """Raise jsonschema.ValidationError unless the summary matches the shipped schema."""
    jsonschema.validate(summary, summary_schema())


def write_csv(path, columns, table):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in table:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def write_run(result, out_dir, raw_config=None):
    validate_summary(result.summary)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "series.csv", result.columns, result.table)
    (out / "summary.json").write_text(dumps(result.summary))
    if raw_config is not None:
        (out / "config.json").write_text(dumps(raw_config))
    return out


def run(source, out_dir=None, seed=None):
    """Execute a config and write series.csv, summary.json and the effective config.json."""
    cfg = load_config(source)
    result = execute(cfg, seed)
    path = write_run(result, resolve_out(out_dir, cfg), cfg.to_dict())
    return result, path


def _coarse_levels(N, dt, T, levels):
    if levels < 3:
        raise ConfigurationError(f"--levels must be at least 3, got {levels}")
    top = 2 ** (levels - 1)
    if (N - 1) % top or (N - 1) // top + 1 < 8:
        raise ConfigurationError(f"grid.N - 1 = {N - 1} must be divisible by {top} for {levels} levels")
    n_coarse = T / (dt * top)
    if abs(n_coarse - round(n_coarse)) > 1e-9 * n_coarse:
        raise ConfigurationError(f"solver.T must be a multiple of {top} * solver.dt for {levels} levels")
    return [((N - 1) // 2**j + 1, dt * 2**j) for j in range(levels - 1, -1, -1)]


def verify(source, levels=3, seed=None):
    """Identity-residual matrix with a refinement study, inequality corpus and abscissa bounds."""
    cfg = load_config(source)
    dg = cfg.diagnostics
    scfg = cfg.solver
    params = _coarse_levels(cfg.N, scfg.dt, scfg.T, levels)
    result = execute(cfg, seed)
    scenario = cfg.scenario
    per_level = []
    for N, dt in params[:-1]:
        grid, damping, ops, u0 = scenario.build(N)
        weights = [weight_from_key(grid, key) for key in dg["identity_weights"]]
        c = SolverConfig(dt=dt, T=scfg.T, scheme=scfg.scheme, nonlinear=scfg.nonlinear,
                         stride=round(scfg.T / dt), tail_threshold=scfg.tail_threshold)
        try:
            traj = solve(u0, ops, c, identity_probes(grid, damping, weights))
        except KdvError as exc:
            raise ExperimentError(cfg.name, exc) from exc
        per_level.append(_residuals(traj, grid, dg["identity_weights"], dg["time_weights"],
                                    dg["residual_tolerance"]))
    per_level.append(result.summary["residuals"])
    orders = []
    for i, top in enumerate(per_level[-1]):
        rel = [abs(level[i]["relative"]) for level in per_level]
        p = fitted_order([dt for _, dt in params], rel)
        orders.append({"weight": top["weight"], "time_weight": top["time_weight"], "relative": rel,
                       "order": p, "order_ok": bool(np.isfinite(p) and p >= ORDER_TARGET)})
    s = result.summary
    zero = s["flags"]["zero_datum"]
    flags = []
    if zero:
        flags.append("zero datum: identities, inequalities and fits hold vacuously")
    coarse = [r for r in s["residuals"] if not r["pass"]]
    if coarse:
        flags.append(f"{len(coarse)} residual(s) above {dg['residual_tolerance']:g}; refine the grid")
    if not all(o["order_ok"] for o in orders) and not zero:
        flags.append(f"some measured orders below {ORDER_TARGET}")
    report = {
        "name": cfg.name,
        "levels": [{"N": N, "dt": dt} for N, dt in params],
        "residuals": s["residuals"],
        "convergence": orders,
        "inequalities": s["inequalities"],
        "abscissa": s["abscissa"],
        "flags": flags,
        "pass": bool(s["flags"]["residuals_pass"] and s["flags"]["inequalities_pass"]
                     and s["flags"]["abscissa_pass"]),
    }
    return clean(report)


def spectrum(source):
    """Numerical abscissa of the conjugated generator for each requested b."""
    cfg = load_config(source)
    _, damping, ops, _ = cfg.scenario.build(cfg.N)
    return clean({"name": cfg.name, "N": cfg.N, "damping": cfg.raw["damping"],
                  "abscissa": _abscissa(ops, cfg.diagnostics["abscissa_b"],
                                        damping.is_constant and damping.max_value > 0)})


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigurationError(f"{path}: empty CSV")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    except ValueError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    return header, data


def refit(csv_path, window=None, columns=None):
    """Decay fits of norm columns of an existing series CSV."""
    header, data = read_csv(csv_path)
    if "t" not in header:
        raise ConfigurationError(f"{csv_path}: no 't' column")
    t = data[:, header.index("t")]
    wanted = columns or [c for c in header if c.startswith("L2") or c.startswith("V")]
    fits = {}
    for c in wanted:
        if c not in header:
            raise ConfigurationError(f"{csv_path}: no column {c!r}; available: {header}")
        fits[c] = _fit(t, data[:, header.index(c)], window, c)
    return clean({"source": str(csv_path), "window": list(window) if window else None, "fits": fits})


def _set_path(raw, dotted, value):
    node = raw
    parts = dotted.split(".")
    for p in parts[:-1]:
        if p not in node or not isinstance(node[p], dict):
            raise ConfigurationError(f"sweep parameter {dotted!r} does not name a config field")
        node = node[p]
    if parts[-1] not in node:
        raise ConfigurationError(f"sweep parameter {dotted!r} does not name a config field")
    node[parts[-1]] = value


def expand_sweep(spec):
    """List of (parameter dict, raw config) pairs for the cross product of the ranges."""
    if "base" not in spec or "vary" not in spec:
        raise ConfigurationError("sweep config needs 'base' and 'vary'")
    base = load_config(spec["base"]).to_dict()
    vary = spec["vary"]
    cap = int(spec.get("max_runs", 64))
    names = sorted(vary)
    for n in names:
        if not isinstance(vary[n], list):
            raise ConfigurationError(f"sweep range {n!r} must be a list")
    total = math.prod(len(vary[n]) for n in names) if names else 0
    if total > cap:
        raise ConfigurationError(f"sweep would execute {total} runs, above the cap max_runs={cap}")
    runs = []
    for combo in itertools.product(*(vary[n] for n in names)) if total else ():
        raw = copy.deepcopy(base)
        params = dict(zip(names, combo))
        for name, value in params.items():
            if name == "b":
                key = f"exp:{float(value):g}"
                raw["diagnostics"]["norms"] = sorted(set(raw["diagnostics"]["norms"]) | {key})
            elif name == "m":
                raw["diagnostics"]["lyapunov"] = [{"m": int(value), "d": [10.0] * int(value)}]
            else:
                _set_path(raw, name, value)
        runs.append((params, raw))
    return runs


def _sweep_task(args):
    index, params, raw, out_dir, seed = args
    cfg = load_config(raw)
    result = execute(cfg, seed)
    write_run(result, out_dir, cfg.to_dict())
    s = result.summary
    row = {"run": index, **{f"param:{k}": v for k, v in params.items()}, "dir": str(out_dir)}
    l2 = s["fits"].get("L2", {})
    row["nu_L2"], row["r2_L2"] = l2.get("nu"), l2.get("r2")
    if "b" in params:
        b, a0 = float(params["b"]), float(cfg.raw["damping"]["a0"])
        fb = s["fits"].get(_norm_column(weight_from_key(result.trajectory.grid, f"exp:{b:g}")), {})
        row["threshold"] = bool(4 * b**3 + b < a0)
        row["nu_b"], row["r2_b"] = fb.get("nu"), fb.get("r2")
    row["lyapunov_decrease"] = s["flags"]["lyapunov_decrease"]
    row["lyapunov"] = [{"m": ls["m"], "nonincreasing": ls["nonincreasing"]} for ls in s["lyapunov"]]
    return row


def sweep(spec, out_dir, workers=1, seed=None):
    """Run the cross product of the varied parameters; one summary row per run."""
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text())
    runs = expand_sweep(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    warn = []
    if not runs:
        warn.append("empty parameter range: nothing to run")
        log.warning(warn[-1])
    tasks = [(i, p, raw, out / f"run_{i:03d}", seed) for i, (p, raw) in enumerate(runs)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    table = clean({"rows": rows, "warnings": warn, "count": len(rows)})
    (out / "sweep.json").write_text(dumps(table))
    return table
