import json
import logging
import math
import os
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.12g"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _finite(obj):
    """Replace non-finite floats by None so the output stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return None
    return obj


def dump_json(payload: dict) -> str:
    return json.dumps(_finite(payload), sort_keys=True, indent=2, default=_json_default) + "\n"


class ArtifactDir:
    """
    Context manager for one run's output directory.
    Creates it on entry, records every file written, logs the list on exit.
    File names embed scenario id and seed.
    """

    def __init__(self, root: str | Path, scenario: str, seed: int):
        self.root = Path(root)
        self.scenario = scenario
        self.seed = seed
        self.written: list[Path] = []

    def __enter__(self):
        os.makedirs(self.root, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            logger.info(f"✅ {len(self.written)} artifacts written to {self.root}")
        else:
            logger.error(f"❌ {self.scenario} failed after writing {len(self.written)} artifacts")

    @property
    def stem(self) -> str:
        return f"{self.scenario}_seed{self.seed}"

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.debug(f"wrote {path}")
        return path

    def write_csv(self, df: pd.DataFrame, curve: str) -> Path:
        path = self.root / f"{self.stem}_{curve}.csv"
        df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        return self._record(path)

    def write_json(self, payload: dict, name: str | None = None) -> Path:
        path = self.root / (f"{self.stem}_{name}.json" if name else f"{self.stem}.json")
        path.write_text(dump_json(payload), encoding="utf-8")
        return self._record(path)

    def write_svg(self, fig, curve: str) -> Path:
        from src.plots.quicklook import save_svg

        path = self.root / f"{self.stem}_{curve}.svg"
        save_svg(fig, path)
        return self._record(path)
