import json
import math
import subprocess
import sys

import pytest

from pemc_casimir import cli


def run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "pemc_casimir.cli", *args],
        capture_output=True,
        text=True,
    )


class TestEnergyCommand:
    def test_dimensionless_json(self, tmp_path):
        out = tmp_path / "energy.json"
        rc = cli.main(
            [
                "energy", "--x", "1.0", "--u", "0.25", "--delta", "0.5",
                "--temp", "tau=1.0", "--out", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["data"]["free_energy_hbar_c_over_L"] < 0.0
        assert payload["meta"]["x"] == 1.0

    def test_si_mode_reports_tau(self, tmp_path):
        # 300 K at L = 1.5 um sits at the attraction/repulsion switch scale
        out = tmp_path / "energy.json"
        rc = cli.main(
            [
                "energy", "--r1", "plane", "--r2", "15e-6", "--gap", "1.5e-6",
                "--delta", "0.0", "--temp", "300K", "--out", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        tau = payload["meta"]["tau"]
        # tau = 2 pi L k_B T/(hbar c): k_B T ~ 0.2 hbar c/L at this distance
        assert tau / (2 * math.pi) == pytest.approx(0.1965, rel=1e-2)
        assert "free_energy_joule" in payload["data"]

    def test_invalid_angle_exit_code(self):
        rc = cli.main(["energy", "--x", "1.0", "--u", "0.0", "--delta", "3.0", "--temp", "zero"])
        assert rc == cli.EXIT_CONFIG

    def test_conflicting_geometry(self):
        rc = cli.main(["energy", "--x", "1.0", "--u", "0.0", "--gap", "1e-6", "--temp", "zero"])
        assert rc == cli.EXIT_CONFIG


class TestOtherCommands:
    def test_force_trace(self, tmp_path):
        out = tmp_path / "force.json"
        rc = cli.main(
            [
                "force", "--x", "1.0", "--u", "0.25", "--delta", "0.0",
                "--temp", "inf", "--force-method", "trace", "--out", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["data"]["force"] < 0.0
        assert payload["data"]["units"] == "k_B T/L"

    def test_sumrule_pfa(self, tmp_path):
        out = tmp_path / "sr.json"
        rc = cli.main(
            [
                "sumrule", "--x", "0.001", "--u", "0.0", "--temp", "zero",
                "--method", "pfa", "--out", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        assert abs(payload["data"]["integral"]) < 1e-6

    def test_critical_angle_command(self, tmp_path):
        out = tmp_path / "dc.json"
        rc = cli.main(
            [
                "critical-angle", "--x", "300", "--u", "0.25", "--temp", "inf",
                "--out", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["data"]["delta_crit_quarterpi"] == pytest.approx(1.0709, abs=5e-3)


class TestFigureCommand:
    def test_figure2_outputs(self, tmp_path):
        base = tmp_path / "fig2"
        rc = cli.main(["figure", "2", "--points", "5", "--out", str(base)])
        assert rc == 0
        csv_text = (tmp_path / "fig2.csv").read_text()
        assert csv_text.startswith("#")
        assert "tau" in csv_text
        assert (tmp_path / "fig2.json").exists()
        assert (tmp_path / "fig2.png").exists()

    def test_figure5_no_plot_and_determinism(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for base in (a, b):
            rc = cli.main(["figure", "5", "--points", "4", "--no-plot", "--out", str(base)])
            assert rc == 0
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_subprocess_entry(self):
        res = run_cli(["--version"])
        assert res.returncode == 0
