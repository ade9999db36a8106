"""Experiment configuration: JSON parsing, defaults and validation."""

import copy
import json
from dataclasses import dataclass, fields
from pathlib import Path

from ..datum import InitialDatum
from ..errors import ConfigurationError
from ..scenario import DampingSpec, Scenario
from ..solver import SolverConfig

DEFAULTS = {
    "name": "custom",
    "grid": {"L": 50.0, "N": 2001},
    "damping": {"shape": "step", "a0": 1.5, "x0": 10.0, "ramp_width": 0.0},
    "datum": {"tag": "gaussian", "center": 5.0, "width": 1.0, "amplitude": 1.0, "samples": []},
    "solver": {
        "scheme": "imex-cn-ab2", "dt": 1e-3, "T": 40.0, "nonlinear": True, "stride": 100,
        "newton_tol": 1e-12, "newton_max_iter": 20, "picard_tol": 1e-10, "picard_max_iter": 60,
        "panel": 0.25, "panel_halvings": 3, "tail_fraction": 0.1, "tail_threshold": 1e-6,
    },
    "diagnostics": {
        "norms": ["1", "poly:1", "poly:2"],
        "fit_window": None,
        "identity_weights": ["1", "x", "poly:2", "poly:3", "exp:0.4"],
        "time_weights": ["none", "T-t"],
        "lyapunov": [{"m": 1, "d": [10.0]}, {"m": 2, "d": [10.0, 10.0]}],
        "lyapunov_period": 5.0,
        "smoothing": [],
        "observability": True,
        "higher_derivatives": None,
        "inequality_corpus": True,
        "corpus_size": 100,
        "corpus_b": [0.1, 0.25, 0.5],
        "seed": 0,
        "abscissa_b": [0.1, 0.25, 0.5],
        "residual_tolerance": 1e-3,
    },
    "output": {"dir": "results"},
}

SMOOTHING_DEFAULTS = {"norm": "H1-seminorm", "mu": 0.0, "t_min": None, "m": None, "b": None, "s": 1}


def merge(base, override, path=""):
    """Deep-merge ``override`` into a copy of ``base``; unknown keys are errors."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        where = f"{path}.{k}" if path else k
        if k not in base:
            raise ConfigurationError(f"unknown config field '{where}'")
        if isinstance(base[k], dict) and base[k] and isinstance(v, dict):
            out[k] = merge(base[k], v, where)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _num(d, key, path, positive=False, integer=False):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"field '{path}.{key}' must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigurationError(f"field '{path}.{key}' must be an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigurationError(f"field '{path}.{key}' must be positive, got {v!r}")
    return int(v) if integer else float(v)


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict

    @property
    def name(self):
        return self.raw["name"]

    @property
    def scenario(self):
        r = self.raw
        dm, dt = r["damping"], r["datum"]
        return Scenario(
            L=float(r["grid"]["L"]),
            damping=DampingSpec(dm["shape"], float(dm["a0"]), float(dm["x0"]), float(dm["ramp_width"])),
            datum=InitialDatum(dt["tag"], float(dt.get("center", 0.0)), float(dt.get("width", 1.0)),
                               float(dt.get("amplitude", 1.0)), tuple(dt.get("samples", ()))),
            nonlinear=bool(r["solver"]["nonlinear"]),
        )

    @property
    def N(self):
        return int(self.raw["grid"]["N"])

    @property
    def solver(self):
        s = self.raw["solver"]
        names = {f.name for f in fields(SolverConfig)}
        return SolverConfig(**{k: v for k, v in s.items() if k in names})

    @property
    def diagnostics(self):
        return self.raw["diagnostics"]

    def to_dict(self):
        return copy.deepcopy(self.raw)


def validate(raw):
    """Cross-field checks; raises ConfigurationError naming the offending field."""
    g, dm, dg, s = raw["grid"], raw["damping"], raw["diagnostics"], raw["solver"]
    L = _num(g, "L", "grid", positive=True)
    N = _num(g, "N", "grid", positive=True, integer=True)
    if N < 8:
        raise ConfigurationError(f"field 'grid.N' must be at least 8, got {N}")
    if dm["shape"] in ("step", "smooth-ramp"):
        x0 = _num(dm, "x0", "damping")
        if not 0 < x0 < L:
            raise ConfigurationError(f"field 'damping.x0'={x0} must lie in (0, grid.L={L})")
        if dm["shape"] == "smooth-ramp" and x0 + _num(dm, "ramp_width", "damping") >= L:
            raise ConfigurationError("field 'damping.ramp_width' pushes the ramp past grid.L")
    if dm["shape"] != "none":
        _num(dm, "a0", "damping", positive=True)
    for key in ("dt", "T"):
        _num(s, key, "solver", positive=True)
    for entry in dg["lyapunov"]:
        m = entry.get("m")
        if not isinstance(m, int) or not 0 <= m <= 4:
            raise ConfigurationError(f"field 'diagnostics.lyapunov.m' must be an integer in 0..4, got {m!r}")
        if len(entry.get("d", [])) != m:
            raise ConfigurationError(f"field 'diagnostics.lyapunov.d' needs {m} coefficients for m={m}")
    for key in list(dg["norms"]) + list(dg["identity_weights"]):
        fam, _, val = str(key).partition(":")
        if key in ("1", "x"):
            continue
        if fam == "poly" and val.isdigit() and int(val) <= 4:
            continue
        if fam == "exp":
            try:
                if float(val) > 0:
                    continue
            except ValueError:
                pass
        raise ConfigurationError(f"weight key {key!r} in 'diagnostics' is invalid (use 1, x, poly:m<=4, exp:b>0)")
    for tw in dg["time_weights"]:
        if tw not in ("none", "T-t", "t"):
            raise ConfigurationError(f"field 'diagnostics.time_weights' has unknown entry {tw!r}")
    for b in list(dg["abscissa_b"]) + list(dg["corpus_b"]):
        if not b > 0:
            raise ConfigurationError("weight rates b in 'diagnostics' must be positive")
    window = dg["fit_window"]
    if window is not None and (len(window) != 2 or not window[0] < window[1]):
        raise ConfigurationError("field 'diagnostics.fit_window' must be [t_a, t_b] with t_a < t_b")
    period, stride_t = float(dg["lyapunov_period"]), float(s["stride"]) * float(s["dt"])
    if dg["lyapunov"] and abs(period / stride_t - round(period / stride_t)) > 1e-9:
        raise ConfigurationError("field 'diagnostics.lyapunov_period' must be a multiple of solver.stride * dt")


def load_config(source):
    """Build a validated ExperimentConfig from a path, JSON text or dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    data = dict(data)
    if "scenario" in data:
        from .scenarios import scenario_config

        base = scenario_config(data.pop("scenario"))
        raw = merge(base, data)
    else:
        raw = merge(DEFAULTS, data)
    raw["diagnostics"]["smoothing"] = [merge(SMOOTHING_DEFAULTS, e, "diagnostics.smoothing")
                                       for e in raw["diagnostics"]["smoothing"]]
    validate(raw)
    try:
        cfg = ExperimentConfig(raw)
        cfg.scenario, cfg.solver  # construct once to surface errors
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc
    return cfg
