import json
import math
from pathlib import Path

import pandas as pd
import pytest

from src.cli.main import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, build_parser, help_manifest, run

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden" / "cli_help.txt"


def summary_of(text: str) -> dict:
    line = text.strip().splitlines()[-1]
    return dict(token.split("=", 1) for token in line.split())


def error_of(text: str) -> dict:
    return json.loads(text.strip().splitlines()[-1])


class TestHelp:
    def test_manifest_matches_golden_file(self):
        assert help_manifest() == GOLDEN.read_text(encoding="utf-8")

    def test_every_flag_is_documented(self):
        parser = build_parser()
        sub = next(a for a in parser._actions if hasattr(a, "choices") and isinstance(a.choices, dict))
        for line in help_manifest(parser).splitlines()[1:]:
            name, flags = line.split(": ", 1)
            text = sub.choices[name].format_help()
            for flag in flags.split():
                if not flag.startswith("<"):
                    assert flag in text, f"{name} help lacks {flag}"


class TestPhaseCommands:
    def test_phase_of_pure_level2(self, capsys):
        assert run(["phase", "--theta", "0", "--phi1", "0.3", "--phi2", "1.1"]) == 0
        assert capsys.readouterr().out.strip() == "total_rad=1.1 dynamical_rad=0 geometric_rad=1.1"

    def test_phase_in_degrees(self, capsys):
        assert run(["phase", "--p2", "0.5", "--phi2", "90", "--deg"]) == 0
        values = summary_of(capsys.readouterr().out)
        assert float(values["total_rad"]) == pytest.approx(math.pi / 4)

    def test_singular_phase_exit_code(self, capsys):
        code = run(["phase", "--p2", "0.5", "--phi1", "0", "--phi2", str(math.pi)])
        assert code == EXIT_NUMERICAL
        err = error_of(capsys.readouterr().err)
        assert err["error"] == "SingularPhaseError"
        assert err["exit_code"] == EXIT_NUMERICAL

    def test_theta_out_of_range(self, capsys):
        assert run(["phase", "--theta", "4"]) == EXIT_NUMERICAL
        assert error_of(capsys.readouterr().err)["error"] == "InvalidParameterError"

    def test_visibility(self, capsys):
        assert run(["visibility", "--p2", "0.514", "--phi", str(math.pi)]) == 0
        assert float(summary_of(capsys.readouterr().out)["visibility"]) == pytest.approx(0.028, abs=1e-9)

    def test_budget(self, capsys):
        assert run(["budget", "--visibility", "1", "--n", "5000", "--a", "8", "--technical", "0"]) == 0
        assert capsys.readouterr().out.strip() == "dPhi_rad=0.005"


class TestArtifactCommands:
    def test_gain_writes_sweep_and_sidecar(self, tmp_path, capsys):
        assert run(["gain", "--p2", "0.514", "--out", str(tmp_path), "--seed", "1"]) == 0
        values = summary_of(capsys.readouterr().out)
        assert float(values["peak_gain_db"]) >= 13.49
        df = pd.read_csv(tmp_path / "gain_seed1_sweep.csv")
        assert list(df.columns) == ["phi_rad", "phase_rad", "slope", "dPhi_rad", "dphi_rad", "gain_db"]
        sidecar = json.loads((tmp_path / "gain_seed1.json").read_text())
        assert sidecar["reference"]["reference_p2"] == 1.0

    def test_reproduce_two_point_report(self, tmp_path, capsys):
        assert run(["reproduce", "sm_sensitivity", "--out", str(tmp_path)]) == 0
        values = summary_of(capsys.readouterr().out)
        assert values["scenario"] == "sm_sensitivity"
        assert float(values["gain_db"]) == pytest.approx(8.785, abs=0.01)
        assert (tmp_path / "sm_sensitivity_seed20240917.json").exists()

    def test_reproduce_needs_a_scenario(self, tmp_path, capsys):
        assert run(["reproduce", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_synth_then_fit(self, tmp_path, capsys):
        assert run(["synth", "--p2", "1", "--phi", "0.5", "--out", str(tmp_path), "--seed", "4"]) == 0
        capsys.readouterr()
        image = tmp_path / "synth_seed4_image.csv"
        assert image.exists()
        assert run(["fit", "--image", str(image), "--weighted", "--out", str(tmp_path), "--seed", "4"]) == 0
        values = summary_of(capsys.readouterr().out)
        assert values["converged"] == "true"
        assert abs(math.remainder(float(values["phase_rad"]) - 1.0, 2 * math.pi)) < 0.1
        assert (tmp_path / "synth_seed4_image_fit_seed4.json").exists()

    def test_missing_image_is_an_io_error(self, tmp_path, capsys):
        assert run(["fit", "--image", str(tmp_path / "none.csv"), "--out", str(tmp_path)]) == EXIT_IO
        assert error_of(capsys.readouterr().err)["exit_code"] == EXIT_IO


class TestValidateConfig:
    def test_example_config_is_valid(self, capsys):
        assert run(["validate-config", str(ROOT / "conf" / "example_fig2c.json")]) == 0
        assert capsys.readouterr().out.strip() == "valid=true violations=0 warnings=0"

    def test_out_of_range_population(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"scenario": "fig2d", "seed": 1, "population": {"p2": 1.5}}))
        assert run(["validate-config", str(path)]) == EXIT_CONFIG
        err = error_of(capsys.readouterr().err)
        assert err["exit_code"] == EXIT_CONFIG
        assert "/population/p2" in [v["pointer"] for v in err["violations"]]

    def test_missing_seed_is_a_warning(self, tmp_path, capsys):
        path = tmp_path / "noseed.json"
        path.write_text(json.dumps({"scenario": "fig3a"}))
        assert run(["validate-config", str(path)]) == 0
        assert summary_of(capsys.readouterr().out)["warnings"] == "1"

    def test_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "extra.json"
        path.write_text(json.dumps({"scenario": "fig3a", "colour": "blue"}))
        assert run(["validate-config", str(path)]) == EXIT_CONFIG
        assert error_of(capsys.readouterr().err)["violations"][0]["pointer"] == ""
