"""
Scenario dispatch: turns a validated config into a ScenarioResult, writes the
artifacts and records per-stage timings (logged only, never written to disk).
"""

import logging
import math
import time
from copy import deepcopy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.common.errors import InvalidParameterError
from src.common.seeding import DEFAULT_SEED
from src.io.artifacts import ArtifactDir
from src.plots import quicklook
from src.scenarios import end_to_end, figures

logger = logging.getLogger(__name__)

SCENARIO_IDS = (
    "fig2b",
    "fig2d",
    "fig3a",
    "fig3b",
    "fig4a",
    "fig4b",
    "figS2",
    "figS3",
    "figS5",
    "end_to_end",
    "sm_sensitivity",
)
DEFAULT_FORMATS = ("csv", "json")


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int = DEFAULT_SEED
    p2: list | None = None
    dp2: float = 0.004
    reference_p2: float = 1.0
    phi_grid: np.ndarray | None = None
    atoms: float = 5000
    cycles: int = 8
    technical: float = 0.1
    atom_grid: list | None = None
    trials: int = 100
    replications: int = 1
    weighted: bool = True
    interferogram: dict = field(default_factory=dict)
    formats: tuple = DEFAULT_FORMATS

    def __post_init__(self):
        if self.scenario not in SCENARIO_IDS:
            raise InvalidParameterError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIO_IDS)}")
        if self.phi_grid is not None:
            self.phi_grid = figures.check_grid(self.phi_grid)
        if self.p2 is not None and any(not 0.0 <= p <= 1.0 for p in self.p2):
            raise InvalidParameterError(f"populations must lie in [0, 1], got {self.p2}")

    @classmethod
    def from_dict(cls, doc: dict, toolkit_cfg: dict) -> "ScenarioConfig":
        """Build from a schema-validated document; absent values come from config.toml."""
        noise = {**toolkit_cfg["noise"], **doc.get("noise", {})}
        grid_defaults = toolkit_cfg["grid"]
        pop = doc.get("population", {})
        mc = doc.get("monte_carlo", {})

        p2 = pop.get("p2")
        if p2 is not None and not isinstance(p2, list):
            p2 = [p2]

        phi_grid = None
        grid_doc = doc.get("phi_grid", {})
        scale = math.pi if grid_doc.get("units", "rad") == "pi" else 1.0
        if "values" in grid_doc:
            phi_grid = np.asarray(grid_doc["values"], dtype=float) * scale
        elif doc["scenario"] != "end_to_end":
            phi_grid = figures.default_phi_grid(
                grid_doc.get("n_points", grid_defaults["n_points"]),
                grid_doc.get("refine_lo", grid_defaults["refine_lo"]),
                grid_doc.get("refine_hi", grid_defaults["refine_hi"]),
                grid_doc.get("refine_step", grid_defaults["refine_step"]),
            )

        return cls(
            scenario=doc["scenario"],
            seed=int(doc.get("seed", toolkit_cfg["run"]["seed"])),
            p2=p2,
            dp2=pop.get("dp2", 0.004),
            reference_p2=pop.get("reference_p2", 1.0),
            phi_grid=phi_grid,
            atoms=noise["atoms"],
            cycles=int(noise["cycles"]),
            technical=float(noise.get("technical", noise.get("technical_rad", 0.1))),
            atom_grid=noise.get("atom_grid"),
            trials=int(mc.get("trials", 100)),
            replications=int(mc.get("replications", 1)),
            weighted=bool(mc.get("weighted", True)),
            interferogram=doc.get("interferogram", {}),
            formats=tuple(doc.get("outputs", {}).get("formats", DEFAULT_FORMATS)),
        )

    def echo(self) -> dict:
        """Config as recorded in the JSON summary."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "p2": self.p2,
            "dp2": self.dp2,
            "reference_p2": self.reference_p2,
            "phi_points": None if self.phi_grid is None else len(self.phi_grid),
            "atoms": self.atoms,
            "cycles": self.cycles,
            "technical": self.technical,
            "trials": self.trials,
            "replications": self.replications,
            "weighted": self.weighted,
            "interferogram": self.interferogram,
        }


def _working_p2(config: ScenarioConfig) -> float:
    return config.p2[0] if config.p2 else figures.WORKING_P2


def _merged_cfg(config: ScenarioConfig, toolkit_cfg: dict) -> dict:
    cfg = deepcopy(toolkit_cfg)
    cfg["interferogram"].update(config.interferogram)
    return cfg


def _dispatch(config: ScenarioConfig, cfg: dict, progress: bool) -> figures.ScenarioResult:
    sid = config.scenario
    grid = config.phi_grid
    if sid == "fig2d":
        return figures.reproduce_fig2d(config.p2 or figures.FIG2D_P2, grid)
    if sid == "fig2b":
        return figures.reproduce_fig2b(_working_p2(config), grid)
    if sid == "figS5":
        return figures.reproduce_figS5(config.p2 or figures.FIGS5_P2, grid)
    if sid in ("fig3a", "fig3b"):
        result = figures.reproduce_fig3(_working_p2(config), config.atoms, config.cycles, (0.0, config.technical), grid)
        keep = "visibility" if sid == "fig3a" else "noise_model"
        return figures.ScenarioResult(sid, {keep: result.curves[keep]}, result.summary)
    if sid == "fig4a":
        return figures.reproduce_fig4a(_working_p2(config), config.atoms, config.cycles, config.technical, grid, config.dp2)
    if sid == "fig4b":
        return figures.reproduce_fig4b(config.p2 or figures.FIG4B_P2, atom_grid=config.atom_grid, cycles=config.cycles)
    if sid == "sm_sensitivity":
        return figures.sm_sensitivity_report()
    if sid == "figS2":
        return end_to_end.single_shots(cfg, config.seed, _working_p2(config), int(config.atoms))
    if sid == "figS3":
        return end_to_end.fit_error_study(
            cfg, config.seed, _working_p2(config), int(config.atoms), config.trials, config.weighted, progress
        )
    if sid == "end_to_end":
        points = end_to_end.E2E_PHI if grid is None else tuple(float(x) for x in grid)
        settings = end_to_end.PipelineSettings(
            p2=_working_p2(config),
            phi_points=points,
            atoms=int(config.atoms),
            cycles=config.cycles,
            technical=config.technical,
            reference_p2=config.reference_p2,
            weighted=config.weighted,
        )
        result = end_to_end.end_to_end_experiment(settings, cfg, config.seed, progress)
        if config.replications > 1:
            reps = end_to_end.replicate_gain(settings, cfg, config.seed, config.replications, progress)
            result.curves["replications"] = reps
            result.summary["replication_mean_gain_db"] = float(reps["gain_db"].mean())
            result.summary["replication_std_gain_db"] = float(reps["gain_db"].std(ddof=1))
        return result
    raise InvalidParameterError(f"unknown scenario {sid!r}")


def _figures(result: figures.ScenarioResult) -> dict:
    out = {}
    for name, df in result.curves.items():
        if name == "band":
            out[name] = quicklook.plot_band(
                df["phi_rad"], df["gain_db"], df["gain_db_lo"], df["gain_db_hi"], f"{result.scenario}: gain band"
            )
        elif name == "gain_vs_atoms":
            for (p2, tech), grp in df.groupby(["p2", "technical"]):
                out[f"{name}_p2{p2:g}_tech{tech:g}"] = quicklook.plot_semilogx(
                    grp["atoms"], grp["gain_db"], f"P2={p2:g}, technical={tech:g} rad", "atoms per cycle", "gain (dB)"
                )
        elif {"position_um", "counts"} <= set(df.columns):
            out[name] = quicklook.plot_image(df["counts"], df["position_um"], title=f"{result.scenario}: {name}")
        elif "phi_rad" in df.columns and len(df) > 2 and name != "shots":
            ys = {c: df[c] for c in df.columns if c != "phi_rad" and np.issubdtype(df[c].dtype, np.number)}
            out[name] = quicklook.plot_curves(df["phi_rad"], ys, f"{result.scenario}: {name}")
        elif "visibility" in df.columns and name == "noise_model":
            ys = {c: df[c] for c in df.columns if c.startswith("dPhi")}
            out[name] = quicklook.plot_curves(
                df["visibility"], ys, f"{result.scenario}: {name}", "visibility", "ΔΦ_T (rad)", x_in_pi=False
            )
    return out


class StageTimer:
    """Collects wall-clock seconds per stage, reported at DEBUG."""

    def __init__(self):
        self.performance: dict[str, float] = {}

    def run(self, label: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        except Exception as e:
            logger.error(f"❌ Failed: {label} after {time.perf_counter() - t0:.2f}s | {e}")
            raise
        finally:
            dt = time.perf_counter() - t0
            self.performance[label] = dt
            logger.debug(f"⏱️  {label}: {dt:.3f}s")


def run_scenario(
    config: ScenarioConfig,
    toolkit_cfg: dict,
    out_dir: str | Path | None = None,
    progress: bool = False,
    timer: StageTimer | None = None,
) -> tuple[figures.ScenarioResult, list[Path]]:
    """Compute the scenario and write its artifacts (CSV per curve, JSON summary, optional SVG)."""
    timer = timer or StageTimer()
    cfg = _merged_cfg(config, toolkit_cfg)
    logger.info(f"⏳ Running scenario {config.scenario} (seed={config.seed})")
    result = timer.run(f"{config.scenario}:compute", _dispatch, config, cfg, progress)

    if out_dir is None:
        return result, []
    with ArtifactDir(out_dir, config.scenario, config.seed) as art:
        if "csv" in config.formats:
            for name, df in result.curves.items():
                art.write_csv(df, name)
        if "json" in config.formats:
            art.write_json({"scenario": config.scenario, "config": config.echo(), "summary": result.summary})
        if "svg" in config.formats:
            for name, fig in timer.run(f"{config.scenario}:plots", _figures, result).items():
                art.write_svg(fig, name)
    logger.info(f"✅ Scenario {config.scenario} done")
    return result, art.written
