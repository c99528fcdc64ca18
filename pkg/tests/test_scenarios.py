import json
import math

import numpy as np
import pandas as pd
import pytest

from src.common.config import DEFAULTS
from src.common.errors import InvalidParameterError
from src.common.seeding import DEFAULT_SEED, split_seed
from src.interferogram.profile import default_grid
from src.noise.sensitivity import NoiseBudget, phase_noise
from src.scenarios import figures
from src.scenarios.end_to_end import PipelineSettings, end_to_end_experiment, measure_curve, replicate_gain
from src.scenarios.runner import ScenarioConfig, StageTimer, run_scenario


class TestPhiGrid:
    def test_default_grid_is_sorted_and_refined(self):
        grid = figures.default_phi_grid()
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(2 * math.pi)
        assert np.all(np.diff(grid) > 0)
        assert np.any(np.isclose(grid, math.pi))
        near = grid[np.abs(grid - math.pi) <= 0.1 * math.pi + 1e-9]
        assert np.max(np.diff(near)) <= 0.005 * math.pi + 1e-9

    def test_rejects_unsorted_grid(self):
        with pytest.raises(InvalidParameterError):
            figures.check_grid([0.0, 2.0, 1.0])


class TestModelScenarios:
    def test_phase_transition(self):
        result = figures.reproduce_fig2d()
        df = result.curves["phase"]
        phi = df["phi_rad"].to_numpy()
        np.testing.assert_allclose(df["P2=1"], 2 * phi, atol=1e-12)
        np.testing.assert_allclose(df["P2=0"], phi, atol=1e-12)
        assert result.summary["P2=0.514"]["transition_height_rad"] > 0.7 * math.pi
        assert result.summary["P2=0.514"]["slope_at_pi"] == pytest.approx(1 + 0.514 / 0.028)

    def test_transition_mirrors_about_equal_populations(self):
        df = figures.reproduce_fig2d().curves["phase"]
        phi = df["phi_rad"].to_numpy()
        np.testing.assert_allclose((df["P2=0.35"] - phi) + (df["P2=0.65"] - 2 * phi), 0.0, atol=1e-12)

    def test_decomposition_adds_up(self):
        df = figures.reproduce_fig2b().curves["decomposition"]
        np.testing.assert_allclose(df["dynamical_rad"] + df["geometric_rad"], df["total_rad"], atol=1e-12)
        assert df["geometric_rad"].iloc[0] == 0.0

    def test_geometric_phase_on_both_sides_of_equal_populations(self):
        summary = figures.reproduce_figS5().summary
        probe = {k: v["geometric_at_probe_rad"] for k, v in summary.items() if k.startswith("P2=")}
        assert probe["P2=0.35"] == pytest.approx(-1.83, abs=0.01)
        assert probe["P2=0.61"] == pytest.approx(2.13, abs=0.01)
        assert abs(probe["P2=0.09"]) < abs(probe["P2=0.35"])
        assert abs(probe["P2=0.78"]) < abs(probe["P2=0.61"])

    def test_visibility_and_noise_model(self):
        result = figures.reproduce_fig3()
        assert result.summary["min_visibility_grid"] == pytest.approx(0.028, abs=1e-9)
        assert result.summary["min_visibility_formula"] == pytest.approx(0.028)
        assert result.summary["dPhi_v0.025_tech0"] == pytest.approx(0.2)
        assert result.summary["dPhi_v1_tech0.1"] == pytest.approx(math.hypot(0.005, 0.1))
        noise = result.curves["noise_model"]
        assert noise["dPhi_tech0.1_rad"].is_monotonic_decreasing

    def test_gain_sweep(self):
        result = figures.reproduce_fig4a()
        assert result.summary["peak_gain_db"] >= 13.50 - 0.01
        assert result.summary["single_state_offset_db"] == pytest.approx(6.02, abs=0.01)
        band = result.curves["band"]
        assert {"gain_db_lo", "gain_db_hi", "gain_db_p2_0"} <= set(band.columns)

    def test_gain_vs_atoms(self):
        result = figures.reproduce_fig4b()
        df = result.curves["gain_vs_atoms"]
        assert set(df["p2"]) == {0.514, 0.501}
        assert set(df["technical"]) == {0.1, 0.01}
        assert result.summary["P2=0.501"]["asymptotic_gain_db"] == pytest.approx(41.99, abs=0.01)

    def test_two_point_report(self):
        summary = figures.sm_sensitivity_report().summary
        assert summary["gain_db"] == pytest.approx(8.785, abs=0.01)
        assert summary["clock_slope"] == pytest.approx(-13.846, abs=1e-3)


class TestRunner:
    def test_unknown_scenario(self):
        with pytest.raises(InvalidParameterError):
            ScenarioConfig("fig9")

    def test_pipeline_gets_no_default_grid(self):
        assert ScenarioConfig.from_dict({"scenario": "end_to_end"}, DEFAULTS).phi_grid is None
        assert ScenarioConfig.from_dict({"scenario": "fig2d"}, DEFAULTS).phi_grid is not None

    def test_grid_values_in_units_of_pi(self):
        doc = {"scenario": "fig2d", "phi_grid": {"units": "pi", "values": [0.5, 1.0, 1.5]}}
        config = ScenarioConfig.from_dict(doc, DEFAULTS)
        np.testing.assert_allclose(config.phi_grid, [0.5 * math.pi, math.pi, 1.5 * math.pi])

    def test_writes_named_artifacts(self, tmp_path):
        config = ScenarioConfig.from_dict({"scenario": "sm_sensitivity", "seed": 7}, DEFAULTS)
        _, written = run_scenario(config, DEFAULTS, tmp_path)
        names = sorted(p.name for p in written)
        assert names == ["sm_sensitivity_seed7.json", "sm_sensitivity_seed7_two_point.csv"]
        payload = json.loads((tmp_path / "sm_sensitivity_seed7.json").read_text())
        assert payload["config"]["seed"] == 7
        assert payload["summary"]["gain_db"] == pytest.approx(8.785, abs=0.01)

    def test_artifacts_are_byte_identical_across_runs(self, tmp_path):
        config = ScenarioConfig.from_dict({"scenario": "fig2d", "seed": 1}, DEFAULTS)
        run_scenario(config, DEFAULTS, tmp_path / "a")
        run_scenario(config, DEFAULTS, tmp_path / "b")
        for name in ("fig2d_seed1.json", "fig2d_seed1_phase.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_svg_output(self, tmp_path):
        doc = {"scenario": "fig2b", "seed": 3, "outputs": {"formats": ["svg"]}}
        _, written = run_scenario(ScenarioConfig.from_dict(doc, DEFAULTS), DEFAULTS, tmp_path)
        assert [p.name for p in written] == ["fig2b_seed3_decomposition.svg"]
        assert written[0].read_text().lstrip().startswith("<?xml")

    def test_stage_timer_records_stages(self):
        timer = StageTimer()
        run_scenario(ScenarioConfig("fig3a"), DEFAULTS, timer=timer)
        assert "fig3a:compute" in timer.performance


@pytest.mark.slow
class TestEndToEnd:
    def test_mean_gain_over_twenty_seeds(self):
        df = replicate_gain(PipelineSettings(), DEFAULTS, DEFAULT_SEED, 20)
        assert len(df) == 20
        assert 5.8 <= df["gain_db"].mean() <= 11.8

    def test_same_seed_gives_identical_report(self):
        first = end_to_end_experiment(PipelineSettings(), DEFAULTS, 17)
        second = end_to_end_experiment(PipelineSettings(), DEFAULTS, 17)
        assert first.summary == second.summary
        for name in ("clock", "reference"):
            pd.testing.assert_frame_equal(first.curves[name], second.curves[name])

    def test_reference_sem_matches_shot_noise(self):
        settings = PipelineSettings(p2=1.0, phi_points=tuple(np.linspace(0.2, 2.7, 6)), technical=0.0)
        schedule = [split_seed(s, settings.cycles) for s in split_seed(5, len(settings.phi_points))]
        df = measure_curve(1.0, settings, DEFAULTS, schedule, default_grid(DEFAULTS))
        pooled = math.sqrt(np.mean(df["sem_rad"] ** 2))
        expected = 1 / math.sqrt(settings.atoms * settings.cycles)
        assert 1 / 1.5 <= pooled / expected <= 1.5
        assert (df["n_fits"] >= settings.cycles - 1).all()

    def test_averaged_sem_matches_the_phase_noise_model(self):
        settings = PipelineSettings(p2=1.0, phi_points=tuple(np.linspace(0.2, 2.7, 6)), technical=0.1)
        schedule = [split_seed(s, settings.cycles) for s in split_seed(6, len(settings.phi_points))]
        df = measure_curve(1.0, settings, DEFAULTS, schedule, default_grid(DEFAULTS))
        pooled = math.sqrt(np.mean(df["sem_rad"] ** 2))
        expected = phase_noise(NoiseBudget(settings.atoms, settings.cycles, settings.technical, 1.0))
        assert 1 / 1.5 <= pooled / expected <= 1.5

    def test_replications_are_independent_runs(self):
        df = replicate_gain(PipelineSettings(), DEFAULTS, 9, 2)
        assert list(df["replication"]) == [0, 1]
        assert np.isfinite(df["gain_db"]).all()
        assert df["gain_db"].iloc[0] != df["gain_db"].iloc[1]
