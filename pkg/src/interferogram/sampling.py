import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid

from src.common.errors import InvalidParameterError
from src.common.seeding import SeedLike, as_generator
from src.interferogram.profile import CameraGrid, InterferogramParams, density_profile

logger = logging.getLogger(__name__)

# sampling window half-width in units of sigma_z
SAMPLING_HALF_WIDTH = 8.0
# fine-grid step as a fraction of the fringe period
STEPS_PER_FRINGE = 50


def sample_atoms(p: InterferogramParams, n_atoms: int, seed: SeedLike = None) -> np.ndarray:
    """
    Draw n_atoms positions from (n(z) - c), normalised, by inverse CDF on a fine grid.
    The background c is not part of the atom density.
    """
    if n_atoms < 1:
        raise InvalidParameterError(f"need at least one atom, got {n_atoms}")
    step = min(p.wavelength / STEPS_PER_FRINGE, p.sigma_z / 20.0)
    lo = p.z_com - SAMPLING_HALF_WIDTH * p.sigma_z
    hi = p.z_com + SAMPLING_HALF_WIDTH * p.sigma_z
    z = np.linspace(lo, hi, int(np.ceil((hi - lo) / step)) + 1)

    density = np.clip(density_profile(p.replace(background=0.0), z), 0.0, None)
    cdf = cumulative_trapezoid(density, z, initial=0.0)
    total = cdf[-1]
    if not np.isfinite(total) or total <= 0:
        raise InvalidParameterError("atom density is not normalisable (zero amplitude?)")
    cdf /= total

    rng = as_generator(seed)
    u = rng.random(n_atoms)
    return np.interp(u, cdf, z)


@dataclass(frozen=True)
class CameraImage:
    counts: np.ndarray
    grid: CameraGrid
    dropped: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "pixel_index": np.arange(self.grid.n_pixels),
                "position_um": self.grid.centers,
                "counts": self.counts,
            }
        )

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "CameraImage":
        """Inverse of to_frame; the grid is recovered from the pixel centres."""
        missing = {"pixel_index", "position_um", "counts"} - set(df.columns)
        if missing:
            raise InvalidParameterError(f"image table lacks columns {sorted(missing)}")
        df = df.sort_values("pixel_index")
        centers = df["position_um"].to_numpy(dtype=float)
        if len(centers) < 2:
            raise InvalidParameterError("image table needs at least two pixels")
        pixel = float(np.median(np.diff(centers)))
        grid = CameraGrid(pixel, len(centers), float(centers[0] - 0.5 * pixel))
        return cls(df["counts"].to_numpy(dtype=float), grid)


def bin_to_image(positions, grid: CameraGrid) -> CameraImage:
    """Histogram of atom positions; atoms outside the grid are counted in `dropped`."""
    positions = np.asarray(positions, dtype=float)
    counts, _ = np.histogram(positions, bins=grid.edges)
    dropped = int(positions.size - counts.sum())
    if positions.size and dropped > 0.01 * positions.size:
        logger.warning(f"⚠️  {dropped}/{positions.size} atoms fall outside the camera grid")
    return CameraImage(counts.astype(float), grid, dropped)


def synthesize_image(p: InterferogramParams, n_atoms: int, grid: CameraGrid, seed: SeedLike = None) -> CameraImage:
    grid.check_coverage(p)
    return bin_to_image(sample_atoms(p, n_atoms, seed), grid)
