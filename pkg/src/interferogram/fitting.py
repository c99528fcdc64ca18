"""
Least-squares fit of the pixel-averaged interferogram model to a camera image.

The optimiser is scipy's trust-region reflective solver with box bounds
(visibility in [0, 1], amplitude >= 0, sigma_z > 0). Parameter errors are the
1-sigma diagonal of pinv(J^T J) scaled by the residual variance.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from src.common.errors import DegenerateImageError, InvalidParameterError
from src.interferogram.profile import PARAM_FIELDS, CameraGrid, InterferogramParams, pixel_model

logger = logging.getLogger(__name__)

DEFAULT_FIXED = frozenset({"wavelength", "z_ref"})
PHASE_STARTS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
MAX_NFEV = 2000

_LOWER = {"amplitude": 0.0, "sigma_z": 1e-6, "visibility": 0.0, "wavelength": 1e-6}
_UPPER = {"visibility": 1.0}


@dataclass(frozen=True)
class FitResult:
    params: InterferogramParams
    param_errors: dict
    chi2: float
    converged: bool
    free: tuple = ()
    cost: float = math.nan
    n_starts: int = 1
    message: str = ""

    @property
    def phase(self) -> float:
        return self.params.phase

    @property
    def phase_error(self) -> float:
        return self.param_errors.get("phase", math.nan)

    def to_record(self) -> dict:
        """JSON-ready record."""
        return {
            "params": self.params.to_dict(),
            "param_errors": {k: (None if not math.isfinite(v) else v) for k, v in self.param_errors.items()},
            "chi2": self.chi2 if math.isfinite(self.chi2) else None,
            "converged": self.converged,
            "free": list(self.free),
            "n_starts": self.n_starts,
            "message": self.message,
        }


def wrap_phase(phase):
    """Map onto (-pi, pi]."""
    return -((-np.asarray(phase) + np.pi) % (2.0 * np.pi) - np.pi)


def initial_guess(counts: np.ndarray, grid: CameraGrid, wavelength: float, z_ref: float = 0.0) -> InterferogramParams:
    """Moment-based starting point; phase is left at zero for the caller to scan."""
    counts = np.asarray(counts, dtype=float)
    if counts.size != grid.n_pixels:
        raise InvalidParameterError(f"image has {counts.size} pixels, grid has {grid.n_pixels}")
    if not np.all(np.isfinite(counts)) or counts.sum() <= 0 or np.ptp(counts) == 0:
        raise DegenerateImageError("image is empty or flat; nothing to fit")

    background = max(float(np.percentile(counts, 5)), 0.0)
    signal = np.clip(counts - background, 0.0, None)
    if signal.sum() <= 0:
        signal = counts
    z = grid.centers
    z_com = float(np.average(z, weights=signal))
    sigma = float(np.sqrt(np.average((z - z_com) ** 2, weights=signal)))
    sigma = max(sigma, grid.pixel_size)
    return InterferogramParams(
        amplitude=float(max(signal.max(), 1e-12)),
        z_com=z_com,
        sigma_z=sigma,
        visibility=0.5,
        wavelength=wavelength,
        z_ref=z_ref,
        phase=0.0,
        background=background,
    )


def _bounds(free: list[str]):
    lo = np.array([_LOWER.get(f, -np.inf) for f in free])
    hi = np.array([_UPPER.get(f, np.inf) for f in free])
    return lo, hi


def _reduced_chi2(counts, model, n_free) -> float:
    """Pearson chi^2 per degree of freedom, Poisson variance floored at one count."""
    dof = counts.size - n_free
    if dof <= 0:
        return math.nan
    return float(np.sum((counts - model) ** 2 / np.maximum(model, 1.0)) / dof)


def fit_interferogram(
    counts,
    grid: CameraGrid,
    init: InterferogramParams | None = None,
    fixed=DEFAULT_FIXED,
    *,
    wavelength: float | None = None,
    z_ref: float = 0.0,
    weighted: bool = False,
    max_nfev: int = MAX_NFEV,
) -> FitResult:
    """
    Fit the pixel-averaged model to `counts`.

    Without `init` the start comes from image moments and the phase is scanned
    over four starting values; `wavelength` (and `z_ref`) then supply the fixed
    values. With `weighted` each residual is divided by the Poisson standard
    deviation of the current model, floored at one count.
    """
    counts = np.asarray(counts, dtype=float)
    fixed = frozenset(fixed)
    unknown = fixed - set(PARAM_FIELDS)
    if unknown:
        raise InvalidParameterError(f"unknown parameters in fixed mask: {sorted(unknown)}")

    if init is None:
        if wavelength is None:
            raise InvalidParameterError("wavelength is required when no initial parameters are given")
        base = initial_guess(counts, grid, wavelength, z_ref)
        phase_starts = PHASE_STARTS
    else:
        if counts.size != grid.n_pixels:
            raise InvalidParameterError(f"image has {counts.size} pixels, grid has {grid.n_pixels}")
        if np.ptp(counts) == 0:
            raise DegenerateImageError("image is flat; nothing to fit")
        base = init
        phase_starts = (init.phase,)

    free = [f for f in PARAM_FIELDS if f not in fixed]
    free_idx = np.array([PARAM_FIELDS.index(f) for f in free])
    lo, hi = _bounds(free)

    def full_vector(x, template):
        vec = template.copy()
        vec[free_idx] = x
        return vec

    best = None
    for phase0 in phase_starts:
        template = base.replace(phase=phase0).as_vector()
        # least_squares needs a strictly feasible start
        x0 = np.clip(template[free_idx], lo + 1e-9, hi - 1e-9)

        def residuals(x, template=template):
            model = pixel_model(full_vector(x, template), grid)
            if weighted:
                return (model - counts) / np.sqrt(np.maximum(model, 1.0))
            return model - counts

        try:
            res = least_squares(residuals, x0, bounds=(lo, hi), method="trf", max_nfev=max_nfev, x_scale="jac")
        except (ValueError, FloatingPointError) as e:
            logger.debug(f"start phase={phase0:.3f} failed: {e}")
            continue
        if best is None or res.cost < best[0].cost:
            best = (res, template)

    if best is None:
        return FitResult(
            params=base,
            param_errors={f: math.nan for f in free},
            chi2=math.nan,
            converged=False,
            free=tuple(free),
            n_starts=len(phase_starts),
            message="all starts failed",
        )

    res, template = best
    vec = full_vector(res.x, template)
    vec[PARAM_FIELDS.index("phase")] = float(wrap_phase(vec[PARAM_FIELDS.index("phase")]))
    params = InterferogramParams.from_vector(vec)
    converged = bool(res.success and res.status > 0)

    n_free = len(free)
    dof = counts.size - n_free
    if converged and dof > 0:
        jac = res.jac
        s2 = 2.0 * res.cost / dof
        cov = np.linalg.pinv(jac.T @ jac) * s2
        errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        param_errors = {f: float(e) for f, e in zip(free, errors)}
    else:
        param_errors = {f: math.nan for f in free}

    model = pixel_model(vec, grid)
    chi2 = _reduced_chi2(counts, model, n_free)
    if not converged:
        logger.debug(f"fit did not converge: {res.message}")
    return FitResult(
        params=params,
        param_errors=param_errors,
        chi2=chi2,
        converged=converged,
        free=tuple(free),
        cost=float(res.cost),
        n_starts=len(phase_starts),
        message=str(res.message),
    )
