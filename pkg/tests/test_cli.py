"""CLI front-end: config parsing, table artifacts, single fits, exit codes."""

import json
import math

import pytest

from steinmde.cli import (
    ExperimentConfig,
    fit_once,
    main,
    parse_config,
    preset_config,
    run_experiment,
)
from steinmde.errors import ConfigError, DataFileError
from steinmde.models import Family


TABLE1_REPLICA = """
# exponential bias/MSE grid
family     = exponential
theta0     = 0.5; 2; 5; 10
n          = 10; 25; 50; 100; 200
estimators = ml; mse; cvm; stein
a          = 0.25; 0.5; 1; 2; 3
seed       = 20240817
"""


@pytest.fixture
def data_file(tmp_path):
    def make(lines):
        path = tmp_path / "data.txt"
        path.write_text("\n".join(lines) + "\n")
        return path

    return make


class TestConfigParsing:
    def test_replica_grid(self, tmp_path):
        path = tmp_path / "grid.txt"
        path.write_text(TABLE1_REPLICA)
        cfg = parse_config(path)
        assert cfg.family is Family.EXPONENTIAL
        assert len(cfg.theta0) == 4 and len(cfg.n) == 5
        assert cfg.reps == 10_000  # desk-scale default
        assert len(cfg.columns()) == 8  # ml, mse, cvm + five stein decays

    def test_diagnostics_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("family = exponential\nnonsense line\n")
        with pytest.raises(ConfigError, match="bad.txt:2"):
            parse_config(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("family = exponential\ncolor = red\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(path)

    def test_empty_estimators_rejected(self):
        with pytest.raises(ConfigError, match="empty"):
            ExperimentConfig(
                family=Family.EXPONENTIAL,
                theta0=(pytest.importorskip("steinmde").exponential(1.0),),
                n=(10,),
                estimators=(),
            )

    def test_estimator_family_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("family = rayleigh\ntheta0 = 1\nn = 10\nestimators = mse\n")
        with pytest.raises(ConfigError, match="not valid"):
            parse_config(path)

    def test_nonpositive_decay_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text(
            "family = exponential\ntheta0 = 1\nn = 10\nestimators = stein\na = -1\n"
        )
        with pytest.raises(ConfigError, match="positive"):
            parse_config(path)


class TestRunExperiment:
    def _small_cfg(self, tmp_path):
        path = tmp_path / "grid.txt"
        path.write_text(TABLE1_REPLICA)
        cfg = parse_config(path)
        return ExperimentConfig(**{**cfg.__dict__, "reps": 20})

    def test_table_structure(self, tmp_path):
        cfg = self._small_cfg(tmp_path)
        result = run_experiment(cfg, fmt="csv", out_dir=tmp_path / "out")
        lines = (tmp_path / "out" / "grid_bias.csv").read_text().splitlines()
        header = lines[0].split(",")
        data_rows = [l for l in lines[1:] if not l.startswith("#")]
        assert len(data_rows) == 20  # 4 parameter points x 5 sample sizes
        assert header[:3] == ["theta0", "n", "coord"]
        assert len(header) - 3 == 8  # one column per estimator
        assert len(result["summaries"]) == 20 * 8

    def test_cells_roundtrip_lossless(self, tmp_path):
        cfg = self._small_cfg(tmp_path)
        result = run_experiment(cfg, fmt="csv", out_dir=tmp_path / "out")
        by_key = {
            (s.theta0.values[0], s.n, s.estimator_id, s.tuning): s
            for s in result["summaries"]
        }
        assert len(by_key) == 20 * 8
        lines = (tmp_path / "out" / "grid_cells.csv").read_text().splitlines()
        header = lines[0].split(",")
        parsed = 0
        for line in lines[1:]:
            if line.startswith("#"):
                continue
            rec = dict(zip(header, line.split(",")))
            label = rec["estimator"]
            est = "stein" if label.startswith("stein_a") else label
            tuning = float(rec["tuning"]) if rec["tuning"] else None
            summ = by_key[(float(rec["theta0"]), int(rec["n"]), est, tuning)]
            assert float(rec["bias"]) == summ.bias[0]  # 17 significant digits
            assert float(rec["mse"]) == summ.mse[0]
            assert int(rec["failures"]) == summ.failure_count
            parsed += 1
        assert parsed == 20 * 8

    def test_rerun_byte_identical(self, tmp_path):
        cfg = ExperimentConfig(
            family=Family.EXPONENTIAL,
            theta0=(pytest.importorskip("steinmde").exponential(1.0),),
            n=(10,),
            estimators=("ml", "stein"),
            a_grid=(1.0,),
            reps=30,
            seed=3,
            name="twice",
        )
        run_experiment(cfg, fmt="csv", out_dir=tmp_path / "a")
        run_experiment(cfg, fmt="csv", out_dir=tmp_path / "b")
        for name in ("twice_cells.csv", "twice_bias.csv", "twice_mse.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_md_and_json_formats(self, tmp_path):
        cfg = ExperimentConfig(
            family=Family.RAYLEIGH,
            theta0=(pytest.importorskip("steinmde").rayleigh(1.0),),
            n=(10,),
            estimators=("ml", "mom"),
            reps=10,
            seed=1,
            name="fmt",
        )
        run_experiment(cfg, fmt="md", out_dir=tmp_path)
        assert (tmp_path / "fmt_bias.md").read_text().startswith("| theta0 |")
        run_experiment(cfg, fmt="json", out_dir=tmp_path)
        payload = json.loads((tmp_path / "fmt_mse.json").read_text())
        assert payload["columns"][:3] == ["theta0", "n", "coord"]
        assert len(payload["rows"]) == 1


class TestPresets:
    def test_all_eight_build(self):
        for table in range(1, 9):
            cfg, metric = preset_config(table, reps=10, seed=1)
            assert metric == ("bias" if table % 2 else "mse")
            assert cfg.columns()
        with pytest.raises(ConfigError):
            preset_config(9, reps=10, seed=1)

    def test_burr_preset_runs_tiny(self, tmp_path):
        cfg, metric = preset_config(5, reps=2, seed=1)
        cfg = ExperimentConfig(**{**cfg.__dict__, "theta0": cfg.theta0[:1], "n": (10,)})
        result = run_experiment(cfg, fmt="csv", out_dir=tmp_path, metrics=(metric,))
        assert (tmp_path / "table5_bias.csv").exists()
        assert len(result["summaries"]) == 7  # ml, cvm, five stein decays


class TestFitOnce:
    def test_exponential_ml(self, data_file):
        report = fit_once(Family.EXPONENTIAL, data_file(["1", "2", "3"]), "ml", None)
        assert report["params"]["theta"] == pytest.approx(0.5)
        assert report["converged"] is True

    def test_rayleigh_am(self, data_file):
        report = fit_once(Family.RAYLEIGH, data_file(["1", "1", "1"]), "am", None)
        assert report["params"]["theta"] == pytest.approx(1.0)

    def test_nonpositive_line_reported(self, data_file):
        with pytest.raises(DataFileError, match="line 2: nonpositive value"):
            fit_once(Family.EXPONENTIAL, data_file(["1", "-1", "3"]), "ml", None)

    def test_not_a_number_reported(self, data_file):
        with pytest.raises(DataFileError, match="line 3: not a number"):
            fit_once(Family.EXPONENTIAL, data_file(["1", "2", "zap"]), "ml", None)

    def test_stein_fit_reports_objective(self, data_file):
        report = fit_once(
            Family.EXPONENTIAL, data_file(["0.5", "1.5", "0.7", "2.2"]), "stein", 1.0
        )
        assert report["objective"] >= 0
        assert math.isfinite(report["params"]["theta"])


class TestMainExitCodes:
    def test_success(self, data_file, capsys):
        rc = main(["fit", "--family", "exponential", "--data", str(data_file(["1", "2", "3"])),
                   "--estimator", "ml"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["params"]["theta"] == pytest.approx(0.5)

    def test_config_error_is_1(self, tmp_path, capsys):
        bad = tmp_path / "cfg.txt"
        bad.write_text("family = exponential\n")  # missing required keys
        assert main(["bench", "--config", str(bad)]) == 1

    def test_data_error_is_1(self, data_file, capsys):
        rc = main(["fit", "--family", "exponential", "--data", str(data_file(["1", "-1"])),
                   "--estimator", "ml"])
        assert rc == 1

    def test_usage_error_is_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bench", "--format", "xml", "--config", "x"])
        assert exc.value.code == 1

    def test_bench_runs(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            "family = exponential\ntheta0 = 1\nn = 10\nestimators = ml\nreps = 5\nseed = 1\n"
        )
        rc = main(["bench", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 0
        assert (tmp_path / "o" / "cfg_bias.csv").exists()

    def test_reps_and_seed_override(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(
            "family = exponential\ntheta0 = 1\nn = 10\nestimators = ml\nreps = 5\nseed = 1\n"
        )
        rc = main(
            ["bench", "--config", str(cfg), "--out", str(tmp_path / "o"), "--reps", "7",
             "--seed", "9"]
        )
        assert rc == 0
        text = (tmp_path / "o" / "cfg_cells.csv").read_text()
        assert ",7,9," in text
