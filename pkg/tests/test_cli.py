import json
import warnings
from importlib import resources

import jsonschema
import numpy as np
import pytest

from kdvdecay.cli import experiments
from kdvdecay.cli.config import DEFAULTS, load_config
from kdvdecay.cli.main import main
from kdvdecay.cli.scenarios import scenario_config, scenario_names
from kdvdecay.errors import ConfigurationError

FAST = {
    "grid": {"N": 401},
    "solver": {"dt": 4e-3, "T": 2.0, "stride": 25},
    "diagnostics": {"corpus_size": 10, "lyapunov_period": 0.5, "fit_window": [0.5, 2.0],
                    "abscissa_b": [0.4], "corpus_b": [0.4]},
}


def fast(**over):
    raw = json.loads(json.dumps(FAST))
    for section, fields in over.items():
        raw.setdefault(section, {}).update(fields)
    return raw


class TestConfig:
    def test_parse_error_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"grid": {"N": 401,}}')
        with pytest.raises(ConfigurationError, match=r"line 1, column"):
            load_config(str(path))

    def test_unknown_field_named(self):
        with pytest.raises(ConfigurationError, match="grid.NN"):
            load_config({"grid": {"NN": 3}})

    def test_x0_outside_domain(self):
        with pytest.raises(ConfigurationError, match="damping.x0"):
            load_config({"grid": {"L": 20.0}, "damping": {"x0": 30.0}})

    @pytest.mark.parametrize("bad, field", [
        ({"solver": {"dt": 1.0, "T": 1.0}}, "dt"),
        ({"diagnostics": {"lyapunov": [{"m": 2, "d": [1.0]}]}}, "lyapunov.d"),
        ({"diagnostics": {"lyapunov": [{"m": 5, "d": [1.0] * 5}]}}, "lyapunov.m"),
        ({"diagnostics": {"norms": ["poly:7"]}}, "poly:7"),
        ({"diagnostics": {"fit_window": [5.0, 1.0]}}, "fit_window"),
    ])
    def test_invalid_fields(self, bad, field):
        with pytest.raises(ConfigurationError, match=field.replace(".", r"\.")):
            load_config(bad)

    def test_scenario_key_merges_over_preset(self):
        cfg = load_config({"scenario": "expweight", "grid": {"N": 401}})
        assert cfg.raw["damping"]["x0"] == 4.0 and cfg.N == 401

    def test_effective_config_roundtrip(self):
        cfg = load_config(fast())
        assert load_config(cfg.to_dict()).to_dict() == cfg.to_dict()

    def test_reference_config_matches_defaults(self):
        text = resources.files("kdvdecay.cli").joinpath("reference_config.json").read_text()
        assert json.loads(text) == json.loads(experiments.dumps(DEFAULTS))

    @pytest.mark.parametrize("name", scenario_names())
    def test_presets_validate(self, name):
        load_config(scenario_config(name))


class TestRun:
    def test_outputs_and_schema(self, tmp_path):
        result, out = experiments.run(fast(), tmp_path / "a")
        summary = json.loads((out / "summary.json").read_text())
        jsonschema.validate(summary, experiments.summary_schema())
        header = (out / "series.csv").read_text().splitlines()[0].split(",")
        assert header[:2] == ["t", "L2"] and "trace" in header
        assert summary["fits"]["L2"]["nu"] > 0
        assert load_config(json.loads((out / "config.json").read_text())).to_dict() == load_config(fast()).to_dict()

    def test_byte_identical_reruns(self, tmp_path):
        _, a = experiments.run(fast(), tmp_path / "a", seed=3)
        _, b = experiments.run(fast(), tmp_path / "b", seed=3)
        for name in ("series.csv", "summary.json", "config.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_zero_datum_reports_insufficient_signal(self, tmp_path):
        result, _ = experiments.run(fast(datum={"tag": "zero"}), tmp_path)
        assert result.summary["flags"]["zero_datum"]
        assert all(f.get("insufficient_signal") for f in result.summary["fits"].values())

    def test_refit_matches_run(self, tmp_path):
        result, out = experiments.run(fast(), tmp_path)
        report = experiments.refit(out / "series.csv", (0.5, 2.0), ["L2"])
        assert report["fits"]["L2"]["nu"] == pytest.approx(result.summary["fits"]["L2"]["nu"], rel=1e-12)
        with pytest.raises(ConfigurationError, match="no column"):
            experiments.refit(out / "series.csv", None, ["nope"])

    def test_output_precedence(self, tmp_path, monkeypatch):
        cfg = load_config(fast(output={"dir": str(tmp_path / "cfg")}))
        assert experiments.resolve_out(None, cfg) == tmp_path / "cfg"
        monkeypatch.setenv(experiments.OUT_ENV, str(tmp_path / "env"))
        assert experiments.resolve_out(None, cfg) == tmp_path / "env"
        assert experiments.resolve_out(str(tmp_path / "cli"), cfg) == tmp_path / "cli"

    def test_clean_handles_numpy_and_nan(self):
        assert experiments.clean({"a": np.float64(np.nan), "b": np.arange(2), "c": np.bool_(True)}) == \
            {"a": None, "b": [0, 1], "c": True}


class TestVerify:
    def test_zero_datum_is_vacuous(self):
        report = experiments.verify(fast(datum={"tag": "zero"}), levels=3)
        assert report["pass"] and any("vacuous" in f for f in report["flags"])

    def test_levels_validation(self):
        with pytest.raises(ConfigurationError, match="at least 3"):
            experiments.verify(fast(), levels=2)
        with pytest.raises(ConfigurationError, match="divisible"):
            experiments.verify(fast(grid={"N": 403}), levels=3)

    def test_coarse_run_reports_without_crashing(self):
        report = experiments.verify(fast(grid={"N": 201}, solver={"dt": 8e-3, "T": 1.6, "stride": 25},
                                         diagnostics={"lyapunov_period": 0.4, "fit_window": None}), levels=3)
        assert set(report) >= {"residuals", "convergence", "flags", "pass"}


class TestSweep:
    def base(self):
        return {"scenario": "expweight", "grid": {"N": 401}, "solver": {"dt": 4e-3, "T": 8.0, "stride": 25},
                "diagnostics": {"inequality_corpus": False, "abscissa_b": [], "identity_weights": [],
                                "norms": ["1"]}}

    def test_threshold_column(self, tmp_path):
        spec = {"base": self.base(), "vary": {"b": [0.2, 0.6], "damping.a0": [1.0]}}
        table = experiments.sweep(spec, tmp_path)
        assert [r["threshold"] for r in table["rows"]] == [True, False]
        assert (tmp_path / "sweep.json").exists() and (tmp_path / "run_001" / "summary.json").exists()

    def test_parallel_matches_serial(self, tmp_path):
        spec = {"base": self.base(), "vary": {"damping.a0": [1.0, 1.5]}}
        serial = experiments.sweep(spec, tmp_path / "s")
        parallel = experiments.sweep(spec, tmp_path / "p", workers=2)
        strip = lambda rows: [{k: v for k, v in r.items() if k != "dir"} for r in rows]
        assert strip(serial["rows"]) == strip(parallel["rows"])

    def test_empty_range_warns(self, tmp_path):
        table = experiments.sweep({"base": self.base(), "vary": {"damping.a0": []}}, tmp_path)
        assert table["count"] == 0 and table["warnings"]

    def test_cap_refuses(self, tmp_path):
        spec = {"base": self.base(), "vary": {"damping.a0": list(range(1, 9)), "b": [0.1] * 9}, "max_runs": 64}
        with pytest.raises(ConfigurationError, match="would execute 72 runs"):
            experiments.sweep(spec, tmp_path)
        assert not (tmp_path / "sweep.json").exists()

    def test_unknown_parameter(self, tmp_path):
        with pytest.raises(ConfigurationError, match="does not name"):
            experiments.expand_sweep({"base": self.base(), "vary": {"damping.zzz": [1]}})

    def test_m_key_sets_lyapunov(self):
        runs = experiments.expand_sweep({"base": self.base(), "vary": {"m": [2]}})
        assert runs[0][1]["diagnostics"]["lyapunov"] == [{"m": 2, "d": [10.0, 10.0]}]


class TestMain:
    def test_scenarios_listing(self, capsys):
        assert main(["scenarios"]) == 0
        assert capsys.readouterr().out.split() == scenario_names()

    def test_run_exit_zero(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(fast()))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        assert (tmp_path / "o" / "summary.json").exists()
        assert "L2: nu=" in capsys.readouterr().out

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"damping": {"x0": 99}}')
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 2
        assert "damping.x0" in capsys.readouterr().err

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(experiments.OUT_ENV, str(tmp_path / "env"))
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(fast()))
        assert main(["spectrum", "--config", str(cfg)]) == 0
        assert (tmp_path / "env" / "spectrum.json").exists()

    def test_fit_subcommand(self, tmp_path):
        _, out = experiments.run(fast(), tmp_path)
        assert main(["fit", str(out / "series.csv"), "--window", "0.5", "2"]) == 0
        assert "L2" in json.loads((out / "fits.json").read_text())["fits"]
