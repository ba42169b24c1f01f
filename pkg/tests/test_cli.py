"""Command-line surface: exit codes, artifact bytes, manifests, figures."""

import json
import os
import subprocess
import sys

import pytest

from heisenweyl.cli import emit_csv, load_run_config
from heisenweyl.kernel import ConfigurationError, IrrationalParameter


def run_cli(*argv, env=None, cwd=None):
    merged = dict(os.environ)
    if env:
        merged.update(env)
    return subprocess.run([sys.executable, "-m", "heisenweyl", *argv],
                          capture_output=True, text=True, env=merged, cwd=cwd)


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(
        {"theta": IrrationalParameter.sqrt2().to_config(), "l": 1}))
    return str(path)


class TestCount:
    def test_counting_point_at_t_16(self, cfg):
        # frozen: N(16) = 3 for l=1, theta = sqrt2
        proc = run_cli("count", "--config", cfg, "--t", "16")
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["count"] == 3
        assert payload["t"] == 16.0
        assert payload["remainder"] == pytest.approx(
            3.0 - payload["main"], abs=0.0)

    def test_x_form_matches_t_form(self, cfg):
        via_x = json.loads(run_cli("count", "--config", cfg,
                                   "--x", "2.0").stdout)
        assert via_x["count"] == via_x["main"] + via_x["remainder"]

    def test_t_and_x_together_is_usage_error(self, cfg):
        proc = run_cli("count", "--config", cfg, "--t", "16", "--x", "2")
        assert proc.returncode == 1

    def test_neither_t_nor_x_is_usage_error(self, cfg):
        assert run_cli("count", "--config", cfg).returncode == 1


class TestExitCodes:
    def test_unknown_flag_exits_1(self, cfg):
        assert run_cli("count", "--config", cfg, "--bogus").returncode == 1

    def test_missing_config_exits_1(self, tmp_path):
        proc = run_cli("count", "--config", str(tmp_path / "nope.json"),
                       "--t", "16")
        assert proc.returncode == 1
        assert "not found" in proc.stderr

    def test_malformed_config_exits_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        proc = run_cli("count", "--config", str(bad), "--t", "16")
        assert proc.returncode == 1

    def test_precondition_violation_exits_2(self, cfg, tmp_path):
        proc = run_cli("psi-check", "--config", cfg, "--xmin", "1000",
                       "--xmax", "100", "--samples", "5",
                       "--out", str(tmp_path / "p.csv"))
        assert proc.returncode == 2
        assert "precondition" in proc.stderr

    def test_budget_exhaustion_exits_3(self, tmp_path):
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps(
            {"theta": IrrationalParameter.sqrt2().to_config(), "l": 1,
             "budgets": {"tuples": 10}}))
        proc = run_cli("alpha-count", "--config", str(path), "--H1", "8",
                       "--H2", "8", "--N1", "16", "--N2", "16",
                       "--delta", "0.05", "--out", str(tmp_path / "g.json"))
        assert proc.returncode == 3
        assert "budget" in proc.stderr

    def test_rational_theta_refused_with_remark(self):
        proc = run_cli("metric-map", "--h11", "1", "--h12", "0", "--h22", "1",
                       "--g3", "4.44", "--rational")
        assert proc.returncode == 2
        assert "O(T^(9/4+eps))" in proc.stderr

    def test_garbage_precision_env_exits_1(self, cfg):
        proc = run_cli("count", "--config", cfg, "--t", "16",
                       env={"HW_PRECISION_BITS": "many"})
        assert proc.returncode == 1


class TestArtifacts:
    def test_spectrum_csv_manifest_and_figure(self, cfg, tmp_path):
        out = tmp_path / "runs" / "spec.csv"
        assert run_cli("spectrum", "--config", cfg, "--tmax", "60",
                       "--out", str(out)).returncode == 0
        lines = out.read_text().split("\n")
        assert lines[0] == "lambda_lo,lambda_hi,multiplicity,source,m,k,n"
        assert out.with_suffix(".png").exists()
        manifest = json.loads((tmp_path / "runs" /
                               "spec.csv.manifest.json").read_text())
        assert manifest["seed"] == 0
        assert manifest["config_hash"]
        assert manifest["registry"]["version"] == 1
        assert str(out) in manifest["artifacts"]

    def test_no_figure_opt_out(self, cfg, tmp_path):
        out = tmp_path / "spec.csv"
        run_cli("spectrum", "--config", cfg, "--tmax", "60",
                "--out", str(out), "--no-figure")
        assert out.exists() and not out.with_suffix(".png").exists()

    def test_no_temp_files_left_behind(self, cfg, tmp_path):
        out = tmp_path / "spec.csv"
        run_cli("spectrum", "--config", cfg, "--tmax", "60",
                "--out", str(out), "--no-figure")
        assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]

    def test_precision_flag_shortens_reals(self, cfg, tmp_path):
        out = tmp_path / "p.csv"
        run_cli("psi-check", "--config", cfg, "--xmin", "100", "--xmax", "300",
                "--samples", "4", "--out", str(out), "--no-figure",
                "--precision", "5")
        row = out.read_text().split("\n")[1].split(",")
        assert all(cell == format(float(cell), ".5g") for cell in row)

    def test_precision_env_recorded_in_manifest(self, cfg, tmp_path):
        out = tmp_path / "spec.csv"
        run_cli("spectrum", "--config", cfg, "--tmax", "30", "--out",
                str(out), "--no-figure", env={"HW_PRECISION_BITS": "256"})
        manifest = json.loads((tmp_path /
                               "spec.csv.manifest.json").read_text())
        assert manifest["precision_bits"] == 256

    def test_vaaler_check_optional_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        proc = run_cli("vaaler-check", "--H", "10", "--grid", "64",
                       "--out", str(out))
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["violations"] == 0
        assert out.read_text().split("\n")[0] == "u,value,envelope,abs_error"

    def test_vdc_check_json_report(self, cfg):
        proc = run_cli("vdc-check", "--config", cfg, "--x", "1e4",
                       "--h", "1", "--j1", "0", "--j", "1")
        payload = json.loads(proc.stdout)
        assert payload["difference"] <= payload["envelope"]
        assert set(payload["direct"]) == {"re", "im"}

    def test_metric_map_identity(self):
        proc = run_cli("metric-map", "--h11", "1", "--h12", "0", "--h22", "1",
                       "--g3", "4.442882938158366")
        payload = json.loads(proc.stdout)
        assert payload["d"] == 1.0
        assert payload["constant_scale"] == 1.0
        assert payload["theta_value"] == pytest.approx(2 ** 0.5, rel=1e-12)


class TestDeterminism:
    def test_spectrum_bytes_identical_across_runs(self, cfg, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            run_cli("spectrum", "--config", cfg, "--tmax", "80",
                    "--out", str(out), "--no-figure")
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_alpha_count_bytes_identical_across_workers(self, cfg, tmp_path):
        outs = []
        for w in ("1", "4"):
            out = tmp_path / f"g{w}.json"
            run_cli("alpha-count", "--config", cfg, "--H1", "4", "--H2", "4",
                    "--N1", "8", "--N2", "8", "--delta", "0.05",
                    "--workers", w, "--out", str(out))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_count_stdout_identical_across_runs(self, cfg):
        a = run_cli("count", "--config", cfg, "--t", "100").stdout
        b = run_cli("count", "--config", cfg, "--t", "100").stdout
        assert a == b


class TestEmitCsv:
    SCHEMA = [("x", "real"), ("n", "int"), ("tag", "str")]

    def test_empty_rows_give_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], self.SCHEMA, str(path))
        assert path.read_text() == "x,n,tag\n"

    def test_newlines_and_formatting(self, tmp_path):
        path = tmp_path / "rows.csv"
        emit_csv([(1.0 / 3.0, 7, "center")], self.SCHEMA, str(path),
                 precision=5)
        assert path.read_bytes() == b"x,n,tag\n0.33333,7,center\n"

    def test_row_width_mismatch_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            emit_csv([(1.0, 2)], self.SCHEMA, str(tmp_path / "w.csv"))


class TestRunConfig:
    def test_defaults_and_hash_stability(self, cfg):
        rc = load_run_config(cfg)
        assert rc.precision_bits == 192
        assert rc.workers == 1
        assert rc.config_hash() == load_run_config(cfg).config_hash()

    def test_flag_overrides(self, cfg):
        rc = load_run_config(cfg, workers=4, seed=7)
        assert rc.workers == 4 and rc.seed == 7

    def test_nonpositive_budget_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(
            {"theta": IrrationalParameter.sqrt2().to_config(), "l": 1,
             "budgets": {"seconds": -1}}))
        with pytest.raises(ConfigurationError):
            load_run_config(str(path))
