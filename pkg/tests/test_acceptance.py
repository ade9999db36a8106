"""Acceptance criteria 1-10 at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in a summary
section at the end of the pytest run.
"""

import json

import jsonschema
import numpy as np
import pytest

from kdvdecay.cli import experiments
from kdvdecay.cli.config import load_config
from kdvdecay.cli.scenarios import scenario_config, scenario_names
from kdvdecay.core import build_damping, build_grid, build_operators, constant_damping
from kdvdecay.datum import InitialDatum
from kdvdecay.oracle import fitted_order, reference_solve
from kdvdecay.scenario import DampingSpec, Scenario
from kdvdecay.solver import SolverConfig, solve
from kdvdecay.spectral import analyze_generator

pytestmark = pytest.mark.acceptance

R2_MIN = 0.98


@pytest.fixture(scope="module")
def runs():
    """One run of every shipped scenario, shared by several criteria."""
    return {name: experiments.execute(load_config(scenario_config(name))) for name in scenario_names()}


def test_c1_analytic_rate(runs, report):
    fit = runs["linear-const"].summary["fits"]["L2"]
    ok = 0.95 <= fit["nu"] <= 1.5
    report(1, "linear constant damping L2 rate in [0.95, 1.5]", ok, f"nu={fit['nu']:.4f}, R2={fit['r2']:.4f}")
    assert ok


def test_c2_gauge_equivalence(tmp_path, report):
    a0, T = 1.0, 1.0
    datum = InitialDatum("gaussian", 5.0, 1.0, 1.0)
    damped = Scenario(damping=DampingSpec("constant", a0), datum=datum, nonlinear=False)
    free = Scenario(damping=DampingSpec("none"), datum=datum, nonlinear=False)
    u_d = reference_solve(damped, T, N=4001, dt=1e-3, cache_dir=tmp_path).u
    u_f = reference_solve(free, T, N=4001, dt=1e-3, cache_dir=tmp_path).u
    scaled = np.exp(-a0 * T) * u_f
    rel = float(np.abs(u_d - scaled).max() / np.abs(scaled).max())
    ok = rel <= 1e-6
    report(2, "damped solution equals exp(-a0 T) times undamped", ok, f"relative difference {rel:.2e}")
    assert ok


def test_c3_identity_residuals(report):
    cfg = scenario_config("thm-decay")
    cfg["grid"] = {"N": 4001}
    cfg["solver"] = {"dt": 1e-3}
    cfg["diagnostics"] = {"identity_weights": ["1", "x", "poly:2", "poly:3", "exp:0.4"],
                          "time_weights": ["none", "T-t"]}
    rep = experiments.verify(cfg, levels=3)
    worst = max(abs(r["relative"]) for r in rep["residuals"])
    orders = [o["order"] for o in rep["convergence"]]
    ok = (len(rep["residuals"]) == 10 and worst <= 1e-3
          and all(p is not None and p >= 1.8 for p in orders))
    report(3, "identity residuals <= 1e-3 at N=4001 and order >= 1.8", ok,
           f"worst residual {worst:.2e}, min order {min(p for p in orders if p is not None):.2f}")
    assert ok


def test_c4_theorem_regime(runs, report):
    s = runs["thm-decay"].summary
    fits = {k: s["fits"][k] for k in ("L2", "L2[(x+1)^1]", "L2[(x+1)^2]")}
    fits_ok = all(f["nu"] > 0 and f["r2"] >= R2_MIN for f in fits.values())
    lyap = {f"V{ls['m']}": ls["nonincreasing"] for ls in s["lyapunov"]}
    lyap_ok = set(lyap) == {"V1", "V2"} and all(lyap.values())
    detail = ", ".join(f"{k}: nu={f['nu']:.4f} R2={f['r2']:.4f}" for k, f in fits.items())
    ok = fits_ok and lyap_ok
    report(4, "thm-decay positive rates with R2 >= 0.98, V1 and V2 nonincreasing", ok,
           f"{detail}; lyapunov {lyap}")
    assert ok


def test_c5_exponential_weight_regime(runs, report):
    assert 4 * 0.4**3 + 0.4 < 1.5
    fit = runs["expweight"].summary["fits"]["L2[exp(2*0.4*x)]"]
    ok = fit["nu"] > 0 and fit["r2"] >= R2_MIN
    report(5, "b=0.4 weighted rate positive with R2 >= 0.98", ok, f"nu={fit['nu']:.4f}, R2={fit['r2']:.4f}")
    assert ok


def test_c6_numerical_abscissa(report):
    grid = build_grid(50.0, 2001)
    a0 = 1.5
    profiles = {"step": build_damping(grid, a0, 10.0), "constant": constant_damping(grid, a0)}
    worst, ok = np.inf, True
    for name, damping in profiles.items():
        ops = build_operators(grid, damping)
        for b in (0.1, 0.25, 0.5):
            g = analyze_generator(ops, b)
            slack = 10 * grid.dx**2
            margin = g.bound + slack - g.omega
            if name == "constant":
                margin = min(margin, g.damped_bound + slack - g.omega)
            worst = min(worst, margin)
            ok &= margin >= 0
    report(6, "abscissa below b^3 + b (and b^3 + b - a0 when constant)", ok, f"smallest margin {worst:.3e}")
    assert ok


def _smoothing_values(amplitude, N):
    cfg = scenario_config("smoothing")
    cfg["grid"] = {"N": N}
    cfg["datum"] = dict(cfg["datum"], amplitude=amplitude)
    cfg["diagnostics"] = dict(cfg["diagnostics"], inequality_corpus=False, abscissa_b=[], identity_weights=[])
    return [entry["value"] for entry in experiments.execute(load_config(cfg)).summary["smoothing"]]


def test_c7_kato_smoothing(report):
    levels = (1001, 2001, 4001)
    large = np.array([_smoothing_values(1.0, N) for N in levels])
    small = np.array([_smoothing_values(0.1, N) for N in levels])
    spread = lambda v: float(v.max() / v.min())
    h1 = large[:, 0]
    weighted = small[:, 1]
    ok = (np.all(np.isfinite(h1)) and np.all(h1 > 0) and spread(h1) < 2
          and np.all(np.isfinite(weighted)) and np.all(weighted > 0) and spread(weighted) < 2)
    report(7, "smoothing statistics finite and stable within a factor 2", ok,
           f"H1 {np.round(h1, 4).tolist()}, weighted m=2 {np.round(weighted, 4).tolist()}")
    assert ok


def test_c8_inequality_corpus(runs, report):
    failures, worst = 0, {}
    for name, result in runs.items():
        ineq = result.summary["inequalities"]
        for part in ("corpus", "snapshots"):
            failures += ineq[part]["failures"]
            for k, v in ineq[part]["worst_ratio"].items():
                worst[k] = max(worst.get(k, 0.0), v)
    count = runs["thm-decay"].summary["inequalities"]["corpus"]["count"]
    ok = failures == 0 and count == 100
    report(8, "inequalities hold with slack 1.05 on corpus and snapshots", ok,
           "worst ratios " + ", ".join(f"{k}={v:.3f}" for k, v in sorted(worst.items())))
    assert ok


def test_c9_cross_solver(report):
    sc = Scenario()
    schemes = ("imex-cn-ab2", "cn-newton", "picard-duhamel")
    levels = [(1001, 4e-3), (2001, 2e-3), (4001, 1e-3)]
    diffs, bounds = {}, []
    for N, dt in levels:
        grid, _, ops, u0 = sc.build(N)
        amp = float(np.abs(u0).max())
        finals = {s: solve(u0, ops, SolverConfig(dt=dt, T=2.0, scheme=s, stride=500)).final.u for s in schemes}
        bounds.append(10 * (dt**2 + grid.dx**2) * amp)
        for i, a in enumerate(schemes):
            for b in schemes[i + 1:]:
                diffs.setdefault(f"{a}/{b}", []).append(float(np.abs(finals[a] - finals[b]).max()))
    h = np.array([dt for _, dt in levels])
    orders = {k: fitted_order(h, v) for k, v in diffs.items()}
    within = all(d <= bound for v in diffs.values() for d, bound in zip(v, bounds))
    ok = within and all(p >= 1.8 for p in orders.values())
    report(9, "pairwise scheme differences within 10(dt^2+dx^2) and order >= 1.8", ok,
           ", ".join(f"{k}: {v[-1]:.1e} p={orders[k]:.2f}" for k, v in diffs.items()))
    assert ok


def test_c10_determinism_and_schema(runs, tmp_path, report):
    identical = True
    for name in scenario_names():
        result = runs[name]
        experiments.write_run(result, tmp_path / name / "a", load_config(scenario_config(name)).to_dict())
        again = experiments.execute(load_config(scenario_config(name)))
        experiments.write_run(again, tmp_path / name / "b", load_config(scenario_config(name)).to_dict())
        for f in ("series.csv", "summary.json", "config.json"):
            identical &= (tmp_path / name / "a" / f).read_bytes() == (tmp_path / name / "b" / f).read_bytes()
    schema = experiments.summary_schema()
    valid = True
    for name in scenario_names():
        try:
            jsonschema.validate(json.loads((tmp_path / name / "a" / "summary.json").read_text()), schema)
        except jsonschema.ValidationError:
            valid = False
    ok = identical and valid
    report(10, "byte-identical reruns and schema-valid summaries", ok, f"identical={identical}, valid={valid}")
    assert ok
