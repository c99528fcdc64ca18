"""
Synthetic experiment: clock states -> interferogram images -> fitted phases ->
two-point sensitivity, and the single-shot / Monte Carlo fit studies built on
the same pipeline.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.clock.clock_state import CLOCK_MAPPING, minimum_visibility, theta_from_p2, total_phase_array, visibility
from src.common.errors import DegenerateImageError, InvalidParameterError, ScenarioAbortedError
from src.common.seeding import SeedLike, as_generator, split_seed
from src.interferogram.fitting import fit_interferogram, wrap_phase
from src.interferogram.montecarlo import mc_fit_error
from src.interferogram.profile import CameraGrid, default_grid, default_params
from src.interferogram.sampling import synthesize_image
from src.noise.sensitivity import NoiseBudget, gain_db, phase_noise, two_point_sensitivity
from src.scenarios.figures import WORKING_P2, ScenarioResult

logger = logging.getLogger(__name__)

E2E_PHI = (0.94 * math.pi, 1.04 * math.pi)


@dataclass(frozen=True)
class PipelineSettings:
    """Everything one run of the synthetic experiment needs besides the seed."""

    p2: float = WORKING_P2
    phi_points: tuple = E2E_PHI
    atoms: int = 5000
    cycles: int = 8
    technical: float = 0.1
    reference_p2: float = 1.0
    weighted: bool = True

    def __post_init__(self):
        grid = np.asarray(self.phi_points, dtype=float)
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise InvalidParameterError("phi points must be strictly increasing with at least two entries")
        NoiseBudget(self.atoms, self.cycles, self.technical)


def _bracket(phi_points) -> tuple[int, int]:
    """Indices of the grid points on either side of phi = pi."""
    grid = np.asarray(phi_points, dtype=float)
    below = np.flatnonzero(grid < math.pi)
    above = np.flatnonzero(grid > math.pi)
    if below.size and above.size:
        return int(below[-1]), int(above[0])
    return 0, len(grid) - 1


def measure_curve(
    p2: float,
    settings: PipelineSettings,
    cfg: dict,
    seeds: list,
    grid: CameraGrid,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Mean fitted phase and SEM at every phi point. Each cycle adds a common-mode
    technical phase drawn from N(0, technical * sqrt(cycles)), so the averaged
    point carries the technical noise the phase-noise model adds in quadrature.
    Fitted phases are put on the branch nearest the model phase before averaging.
    """
    theta = theta_from_p2(p2)
    jitter_sd = settings.technical * math.sqrt(settings.cycles)
    rows = []
    failed = 0
    total = 0
    for i, phi in enumerate(tqdm(settings.phi_points, desc=f"P2={p2:g}", disable=not progress)):
        model_phase = float(total_phase_array(theta, *CLOCK_MAPPING.phases(phi)))
        vis = float(visibility(theta, phi))
        measured = []
        for child in seeds[i]:
            rng = as_generator(child)
            jitter = rng.normal(0.0, jitter_sd) if jitter_sd > 0 else 0.0
            params = default_params(cfg, vis, model_phase + jitter)
            image = synthesize_image(params, settings.atoms, grid, rng)
            total += 1
            try:
                fit = fit_interferogram(image.counts, grid, wavelength=params.wavelength, weighted=settings.weighted)
            except DegenerateImageError:
                failed += 1
                continue
            if not fit.converged:
                failed += 1
                continue
            measured.append(model_phase + float(wrap_phase(fit.phase - model_phase)))
        n = len(measured)
        mean = float(np.mean(measured)) if n else math.nan
        sem = float(np.std(measured, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
        rows.append(
            {
                "phi_rad": float(phi),
                "model_phase_rad": model_phase,
                "visibility": vis,
                "phase_rad": mean,
                "sem_rad": sem,
                "n_fits": n,
            }
        )
    if total and failed > 0.5 * total:
        raise ScenarioAbortedError(f"{failed}/{total} fits failed for P2={p2}")
    if failed:
        logger.warning(f"⚠️  {failed}/{total} fits failed for P2={p2}")
    return pd.DataFrame(rows)


def end_to_end_experiment(settings: PipelineSettings, cfg: dict, seed: SeedLike, progress: bool = False) -> ScenarioResult:
    """
    Run the clock configuration and the single-state reference with the same
    seed schedule, then compare their two-point sensitivities around phi = pi.
    """
    grid = default_grid(cfg)
    schedule = [split_seed(child, settings.cycles) for child in split_seed(seed, len(settings.phi_points))]
    clock = measure_curve(settings.p2, settings, cfg, schedule, grid, progress)
    reference = measure_curve(settings.reference_p2, settings, cfg, schedule, grid, progress)

    a, b = _bracket(settings.phi_points)
    for name, df in (("clock", clock), ("reference", reference)):
        if (df.n_fits[[a, b]] < 2).any():
            raise ScenarioAbortedError(f"{name} curve has fewer than two fits at a bracketing point; no SEM")

    def two_point(df):
        return two_point_sensitivity(
            df.phase_rad[a], df.sem_rad[a], df.phase_rad[b], df.sem_rad[b], df.phi_rad[a], df.phi_rad[b]
        )

    clock_tp = two_point(clock)
    ref_tp = two_point(reference)
    summary = {
        "p2": settings.p2,
        "reference_p2": settings.reference_p2,
        "atoms": settings.atoms,
        "cycles": settings.cycles,
        "technical": settings.technical,
        "cycle_jitter_rad": settings.technical * math.sqrt(settings.cycles),
        "bracket_phi_rad": [float(settings.phi_points[a]), float(settings.phi_points[b])],
        "clock_slope": clock_tp.slope,
        "clock_delta2_phi": clock_tp.delta2_phi,
        "reference_slope": ref_tp.slope,
        "reference_delta2_phi": ref_tp.delta2_phi,
        "gain_db": gain_db(clock_tp.delta2_phi, ref_tp.delta2_phi),
    }
    return ScenarioResult("end_to_end", {"clock": clock, "reference": reference}, summary)


def replicate_gain(settings: PipelineSettings, cfg: dict, seed: SeedLike, replications: int, progress: bool = False):
    """Inferred gain over independent master seeds split from `seed`."""
    gains = []
    for child in tqdm(split_seed(seed, replications), desc="replications", disable=not progress):
        gains.append(end_to_end_experiment(settings, cfg, child).summary["gain_db"])
    return pd.DataFrame({"replication": np.arange(replications), "gain_db": gains})


def single_shots(cfg: dict, seed: SeedLike, p2: float = WORKING_P2, atoms: int = 5000) -> ScenarioResult:
    """
    Four single shots: the single-state (P2 = 1) and clock interferograms at the
    two phi points on either side of the working point.
    """
    grid = default_grid(cfg)
    shots = [
        ("single_before", 1.0, E2E_PHI[0]),
        ("single_after", 1.0, E2E_PHI[1]),
        ("clock_before", p2, E2E_PHI[0]),
        ("clock_after", p2, E2E_PHI[1]),
    ]
    rows = []
    curves = {}
    for (name, pop, phi), child in zip(shots, split_seed(seed, len(shots))):
        theta = theta_from_p2(pop)
        true_phase = float(total_phase_array(theta, *CLOCK_MAPPING.phases(phi)))
        vis = float(visibility(theta, phi))
        params = default_params(cfg, vis, true_phase)
        image = synthesize_image(params, atoms, grid, child)
        fit = fit_interferogram(image.counts, grid, wavelength=params.wavelength)
        curves[name] = image.to_frame()
        rows.append(
            {
                "shot": name,
                "p2": pop,
                "phi_rad": phi,
                "visibility": vis,
                "true_phase_rad": float(wrap_phase(true_phase)),
                "fit_phase_rad": fit.phase,
                "phase_error_rad": fit.phase_error,
                "chi2": fit.chi2,
                "converged": fit.converged,
            }
        )
    table = pd.DataFrame(rows)
    curves["shots"] = table
    summary = {row["shot"]: {"phase_error_rad": row["phase_error_rad"], "chi2": row["chi2"]} for row in rows}
    return ScenarioResult("figS2", curves, summary)


def fit_error_study(
    cfg: dict,
    seed: SeedLike,
    p2: float = WORKING_P2,
    atoms: int = 5000,
    trials: int = 100,
    weighted: bool = True,
    progress: bool = False,
) -> ScenarioResult:
    """Monte Carlo fitted-phase error at the working-point visibility and at unit visibility."""
    grid = default_grid(cfg)
    rows = []
    for label, vis, child in zip(("working_point", "unit"), (minimum_visibility(p2), 1.0), split_seed(seed, 2)):
        params = default_params(cfg, vis, 0.3)
        mc = mc_fit_error(params, atoms, trials, child, grid=grid, weighted=weighted, progress=progress)
        budget = NoiseBudget(atoms, 1, 0.0, vis)
        rows.append({"case": label, "visibility": vis, "quantum_limit_rad": phase_noise(budget), **mc.to_dict()})
    table = pd.DataFrame(rows)
    summary = {row["case"]: {k: v for k, v in row.items() if k != "case"} for row in rows}
    return ScenarioResult("figS3", {"mc": table}, summary)
