import logging
import os
from copy import deepcopy
from pathlib import Path

from dotenv import load_dotenv

from src.common.errors import ConfigError
from src.common.seeding import DEFAULT_SEED

logger = logging.getLogger(__name__)

CONFIG_PATH = Path("conf/config.toml")
OUTPUT_DIR_ENV = "CLOCKINTERF_OUTPUT_DIR"

DEFAULTS = {
    "run": {"seed": DEFAULT_SEED, "output_dir": "results", "log_level": "INFO", "log_to_file": False},
    "interferogram": {
        "separation_um": 7.26,
        "tof_s": 10e-3,
        "sigma_z_um": 12.0,
        "pixel_size_um": 1.0,
        "n_pixels": 128,
        "mass_kg": 1.44316060e-25,
    },
    "noise": {"atoms": 5000, "cycles": 8, "technical_rad": 0.1},
    "grid": {"n_points": 241, "refine_lo": 0.9, "refine_hi": 1.1, "refine_step": 0.005},
}

REQUIRED_KEYS = [("run", "seed"), ("run", "output_dir"), ("noise", "atoms"), ("noise", "cycles")]


def _read_toml(path: Path) -> dict:
    try:
        import tomllib  # Python 3.11+
        with path.open("rb") as f:
            cfg = tomllib.load(f)
            logger.debug("✅ Config loaded via tomllib")
    except ImportError:
        try:
            import tomli  # Python <3.11
            with path.open("rb") as f:
                cfg = tomli.load(f)
                logger.debug("✅ Config loaded via tomli")
        except ImportError:
            import toml  # fallback
            cfg = toml.load(str(path))
            logger.debug("✅ Config loaded via toml package")
    return cfg


def _merge(base: dict, override: dict) -> dict:
    out = deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: Path | str | None = None) -> dict:
    """
    Load toolkit defaults from conf/config.toml, layered over built-in defaults.
    The output directory may be overridden by CLOCKINTERF_OUTPUT_DIR (.env honoured).
    """
    load_dotenv()
    cfg_path = Path(path) if path is not None else CONFIG_PATH
    if cfg_path.exists():
        try:
            cfg = _merge(DEFAULTS, _read_toml(cfg_path))
        except Exception as e:
            raise ConfigError(f"could not parse {cfg_path}: {e}") from e
    else:
        logger.warning(f"⚠️  Config not found at {cfg_path}; using defaults")
        cfg = deepcopy(DEFAULTS)

    for section, key in REQUIRED_KEYS:
        if key not in cfg.get(section, {}):
            raise ConfigError(f"Missing required config key: {section}.{key}")

    env_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_dir:
        cfg["run"]["output_dir"] = env_dir
    return cfg
