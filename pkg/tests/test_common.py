import logging

import numpy as np
import pandas as pd
import pytest

from scripts.reproduce_all import reproduce_all
from src.benchmark.benchmark_scenarios import benchmark_scenarios
from src.common.config import DEFAULTS, OUTPUT_DIR_ENV, load_config
from src.common.errors import ConfigError, InvalidParameterError
from src.common.logging_utils import setup_logging
from src.common.seeding import DEFAULT_SEED, as_generator, split_seed


class TestConfig:
    def test_toml_overrides_defaults(self, tmp_path, monkeypatch):
        monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
        path = tmp_path / "config.toml"
        path.write_text('[run]\nseed = 11\noutput_dir = "out"\n\n[noise]\natoms = 2000\n')
        cfg = load_config(path)
        assert cfg["run"]["seed"] == 11
        assert cfg["noise"]["atoms"] == 2000
        assert cfg["noise"]["cycles"] == DEFAULTS["noise"]["cycles"]
        assert cfg["interferogram"] == DEFAULTS["interferogram"]

    def test_missing_file_falls_back_to_defaults(self, tmp_path, monkeypatch):
        monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
        assert load_config(tmp_path / "absent.toml") == DEFAULTS

    def test_environment_sets_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "elsewhere"))
        assert load_config(tmp_path / "absent.toml")["run"]["output_dir"] == str(tmp_path / "elsewhere")

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("[run\nseed = ")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_config_error_is_not_a_value_error(self):
        assert not issubclass(ConfigError, ValueError)
        assert issubclass(InvalidParameterError, ValueError)


class TestLogging:
    def test_file_handler_records_messages(self, tmp_path):
        logger = setup_logging("clockinterf_test", "DEBUG", tmp_path)
        logger.info("fit converged")
        logging.getLogger("src.interferogram.fitting").debug("library message")
        files = list(tmp_path.glob("clockinterf_test_*.log"))
        assert len(files) == 1
        text = files[0].read_text(encoding="utf-8")
        assert "fit converged" in text
        assert "library message" in text
        assert "|     INFO |" in text

    def test_repeated_setup_does_not_duplicate_handlers(self):
        setup_logging("clockinterf_test", "INFO")
        logger = setup_logging("clockinterf_test", "WARNING")
        assert len(logger.handlers) == 1
        assert logger.level == logging.WARNING


class TestSeeding:
    def test_split_count(self):
        assert len(split_seed(DEFAULT_SEED, 4)) == 4

    def test_default_seed(self):
        assert as_generator(None).random() == as_generator(DEFAULT_SEED).random()

    def test_generator_passes_through(self):
        rng = np.random.default_rng(0)
        assert as_generator(rng) is rng


class TestBenchmarkAndReproduce:
    def test_benchmark_records(self):
        records = benchmark_scenarios(DEFAULTS, ["sm_sensitivity", "fig3a"])
        df = pd.DataFrame(records)
        assert list(df.columns) == ["scenario", "seconds", "rows"]
        assert list(df["scenario"]) == ["sm_sensitivity", "fig3a"]
        assert (df["seconds"] >= 0).all()
        assert (df["rows"] > 0).all()

    def test_reproduce_selected_scenarios(self, tmp_path):
        paths = reproduce_all(tmp_path, 3, ("csv", "json"), ["sm_sensitivity", "fig2d"])
        names = {p.name for p in paths}
        assert "sm_sensitivity_seed3.json" in names
        assert "fig2d_seed3_phase.csv" in names
        assert all(p.exists() for p in paths)
