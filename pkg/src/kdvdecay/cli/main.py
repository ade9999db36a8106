"""Command-line entry point: kdvdecay {run,verify,sweep,spectrum,fit,scenarios}."""

import argparse
import json
import logging
import sys
from pathlib import Path

from ..errors import ConfigurationError, KdvError
from . import experiments
from .config import load_config
from .scenarios import scenario_config, scenario_names


def _source(args):
    if args.config and args.scenario:
        raise ConfigurationError("give either --config or --scenario, not both")
    if args.scenario:
        return scenario_config(args.scenario)
    if args.config:
        return args.config
    raise ConfigurationError("one of --config or --scenario is required")


def _config_args(p):
    p.add_argument("--config", metavar="PATH", help="experiment config JSON")
    p.add_argument("--scenario", choices=scenario_names(), help="shipped scenario preset")
    p.add_argument("--out", metavar="DIR", help=f"output directory (overrides ${experiments.OUT_ENV})")


def _write(out, name, payload):
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(experiments.dumps(payload))
    return path


def cmd_run(args):
    result, out = experiments.run(_source(args), args.out, args.seed)
    s = result.summary
    for name, fit in s["fits"].items():
        if fit.get("insufficient_signal"):
            print(f"{name}: insufficient signal")
        else:
            print(f"{name}: nu={fit['nu']:.6g} R2={fit['r2']:.6f}")
    for key, val in sorted(s["flags"].items()):
        print(f"{key}: {val}")
    print(f"wrote {out}")
    return 0


def cmd_verify(args):
    source = _source(args)
    report = experiments.verify(source, args.levels, args.seed)
    out = experiments.resolve_out(args.out, load_config(source))
    path = _write(out, "verify.json", report)
    for r in report["residuals"]:
        print(f"residual {r['weight']:>8} {r['time_weight']:>5}: {r['relative']:+.3e} "
              f"{'ok' if r['pass'] else 'high'}")
    for o in report["convergence"]:
        p = "n/a" if o["order"] is None else f"{o['order']:.2f}"
        print(f"order {o['weight']:>8} {o['time_weight']:>5}: {p}")
    for f in report["flags"]:
        print(f"flag: {f}")
    print(f"pass: {report['pass']}")
    print(f"wrote {path}")
    return 0


def cmd_sweep(args):
    if not args.config:
        raise ConfigurationError("sweep needs --config with 'base' and 'vary'")
    try:
        spec = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{args.config}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    out = Path(args.out or experiments.resolve_out(None, load_config(spec.get("base", {}))))
    table = experiments.sweep(spec, out, args.workers, args.seed)
    for w in table["warnings"]:
        print(f"warning: {w}")
    for row in table["rows"]:
        print(json.dumps(row, sort_keys=True))
    print(f"wrote {out / 'sweep.json'}")
    return 0


def cmd_spectrum(args):
    source = _source(args)
    report = experiments.spectrum(source)
    path = _write(experiments.resolve_out(args.out, load_config(source)), "spectrum.json", report)
    for a in report["abscissa"]:
        print(f"b={a['b']:g}: omega={a['omega']:.10g} bound={a['bound']:.6g} margin={a['margin']:.3e}")
    print(f"wrote {path}")
    return 0


def cmd_fit(args):
    report = experiments.refit(args.csv, tuple(args.window) if args.window else None, args.columns)
    out = Path(args.out) if args.out else Path(args.csv).parent
    path = _write(out, "fits.json", report)
    for name, fit in report["fits"].items():
        if fit.get("insufficient_signal"):
            print(f"{name}: insufficient signal")
        else:
            print(f"{name}: nu={fit['nu']:.6g} R2={fit['r2']:.6f}")
    print(f"wrote {path}")
    return 0


def cmd_scenarios(args):
    if args.show:
        print(experiments.dumps(scenario_config(args.show)), end="")
    else:
        print("\n".join(scenario_names()))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="kdvdecay", description="Damped KdV decay experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve and write series.csv and summary.json")
    _config_args(p)
    p.add_argument("--seed", type=int, help="seed of the random inequality corpus")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="identity residuals with refinement, inequalities, abscissa")
    _config_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--levels", type=int, default=3, help="refinement levels (default 3)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="cross product of parameter ranges")
    p.add_argument("--config", metavar="PATH", required=True)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="numerical abscissa only")
    _config_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", help="refit decay rates from an existing series CSV")
    p.add_argument("csv")
    p.add_argument("--window", type=float, nargs=2, metavar=("T_A", "T_B"))
    p.add_argument("--columns", nargs="+")
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scenarios", help="list shipped scenarios or print one as a full config")
    p.add_argument("--show", choices=scenario_names())
    p.set_defaults(func=cmd_scenarios)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KdvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
