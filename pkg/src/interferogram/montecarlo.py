import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from tqdm import tqdm

from src.common.errors import DegenerateImageError, InvalidParameterError
from src.common.seeding import SeedLike, split_seed
from src.interferogram.fitting import DEFAULT_FIXED, fit_interferogram, wrap_phase
from src.interferogram.profile import CameraGrid, InterferogramParams
from src.interferogram.sampling import synthesize_image

logger = logging.getLogger(__name__)

MIN_TRIALS = 30


@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    excluded: int
    mean_abs_error: float
    std_error: float
    rms_error: float
    mean_reported_error: float
    mean_chi2: float

    def to_dict(self) -> dict:
        return asdict(self)


def mc_fit_error(
    p: InterferogramParams,
    n_atoms: int,
    trials: int,
    seed: SeedLike = None,
    grid: CameraGrid | None = None,
    fixed=DEFAULT_FIXED,
    weighted: bool = False,
    progress: bool = False,
) -> MonteCarloSummary:
    """
    Repeat sample -> bin -> fit `trials` times and summarise the fitted-phase error.
    Each trial draws from its own child seed; failed fits are excluded and counted.
    """
    if trials < MIN_TRIALS:
        raise InvalidParameterError(f"need at least {MIN_TRIALS} trials, got {trials}")
    grid = grid or CameraGrid.centered()

    errors, reported, chi2 = [], [], []
    excluded = 0
    for child in tqdm(split_seed(seed, trials), desc="MC trials", disable=not progress):
        image = synthesize_image(p, n_atoms, grid, child)
        try:
            fit = fit_interferogram(image.counts, grid, wavelength=p.wavelength, z_ref=p.z_ref, fixed=fixed, weighted=weighted)
        except DegenerateImageError:
            excluded += 1
            continue
        if not fit.converged or not math.isfinite(fit.phase_error):
            excluded += 1
            continue
        errors.append(float(wrap_phase(fit.phase - p.phase)))
        reported.append(fit.phase_error)
        chi2.append(fit.chi2)

    if excluded:
        logger.info(f"⚠️  {excluded}/{trials} MC fits excluded")
    if not errors:
        nan = math.nan
        return MonteCarloSummary(trials, excluded, nan, nan, nan, nan, nan)

    err = np.asarray(errors)
    return MonteCarloSummary(
        trials=trials,
        excluded=excluded,
        mean_abs_error=float(np.mean(np.abs(err))),
        std_error=float(np.std(err, ddof=1)) if err.size > 1 else 0.0,
        rms_error=float(np.sqrt(np.mean(err**2))),
        mean_reported_error=float(np.mean(reported)),
        mean_chi2=float(np.nanmean(chi2)),
    )
