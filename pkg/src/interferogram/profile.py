"""
Interferogram model: a sinusoidally modulated Gaussian envelope on a 1D camera grid.
Units are micrometres for positions and radians for phases.
"""

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.constants import h as PLANCK

from src.common.errors import InvalidParameterError

PARAM_FIELDS = ("amplitude", "z_com", "sigma_z", "visibility", "wavelength", "z_ref", "phase", "background")
MIN_PIXELS = 16
# Gauss-Legendre nodes per pixel for the pixel-averaged model
PIXEL_NODES = 5


def fringe_wavelength(t: float, d: float, mass: float) -> float:
    """lambda = h t / (m d) in micrometres; t in s, d in micrometres, mass in kg."""
    if t <= 0 or d <= 0 or mass <= 0:
        raise InvalidParameterError(f"t, d and mass must be positive, got t={t}, d={d}, mass={mass}")
    return PLANCK * t / (mass * d * 1e-6) * 1e6


@dataclass(frozen=True)
class InterferogramParams:
    amplitude: float
    z_com: float
    sigma_z: float
    visibility: float
    wavelength: float
    z_ref: float = 0.0
    phase: float = 0.0
    background: float = 0.0

    def __post_init__(self):
        if self.sigma_z <= 0:
            raise InvalidParameterError(f"sigma_z must be positive, got {self.sigma_z}")
        if self.wavelength <= 0:
            raise InvalidParameterError(f"wavelength must be positive, got {self.wavelength}")
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidParameterError(f"visibility must lie in [0, 1], got {self.visibility}")
        if self.amplitude < 0:
            raise InvalidParameterError(f"amplitude must be non-negative, got {self.amplitude}")

    def replace(self, **changes) -> "InterferogramParams":
        return replace(self, **changes)

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in PARAM_FIELDS], dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "InterferogramParams":
        return cls(**{f: float(v) for f, v in zip(PARAM_FIELDS, vec)})

    def to_dict(self) -> dict:
        return asdict(self)


def _profile(vec, z):
    amplitude, z_com, sigma_z, vis, wavelength, z_ref, phase, background = vec
    envelope = np.exp(-((z - z_com) ** 2) / (2.0 * sigma_z**2))
    fringe = 1.0 + vis * np.sin(2.0 * np.pi * (z - z_ref) / wavelength + phase)
    return amplitude * envelope * fringe + background


def density_profile(p: InterferogramParams, z):
    """n(z) = A exp[-(z - z_com)^2 / (2 sigma_z^2)] {1 + v sin[2 pi (z - z_ref)/lambda + Phi]} + c."""
    return _profile(p.as_vector(), np.asarray(z, dtype=float))


@dataclass(frozen=True)
class CameraGrid:
    """Uniform pixel row; origin is the left edge of pixel 0."""

    pixel_size: float
    n_pixels: int
    origin: float

    def __post_init__(self):
        if self.pixel_size <= 0:
            raise InvalidParameterError(f"pixel_size must be positive, got {self.pixel_size}")
        if self.n_pixels < MIN_PIXELS:
            raise InvalidParameterError(f"need at least {MIN_PIXELS} pixels, got {self.n_pixels}")

    @classmethod
    def centered(cls, pixel_size: float = 1.0, n_pixels: int = 128, center: float = 0.0) -> "CameraGrid":
        return cls(pixel_size, n_pixels, center - 0.5 * pixel_size * n_pixels)

    @property
    def span(self) -> float:
        return self.pixel_size * self.n_pixels

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.pixel_size * np.arange(self.n_pixels + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.origin + self.pixel_size * (np.arange(self.n_pixels) + 0.5)

    def check_coverage(self, p: InterferogramParams) -> None:
        """The grid must span at least 4 sigma_z and contain the envelope centre."""
        if self.span < 4.0 * p.sigma_z:
            raise InvalidParameterError(f"grid spans {self.span} um, needs at least 4 sigma_z = {4 * p.sigma_z} um")
        if not self.origin <= p.z_com <= self.origin + self.span:
            raise InvalidParameterError(f"z_com={p.z_com} lies outside the camera grid")


def pixel_model(vec, grid: CameraGrid) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(PIXEL_NODES)
    half = 0.5 * grid.pixel_size
    z = grid.centers[:, None] + half * nodes[None, :]
    return 0.5 * (_profile(vec, z) @ weights)


def pixel_integrated_profile(p: InterferogramParams, grid: CameraGrid) -> np.ndarray:
    """Mean of n(z) over each pixel."""
    return pixel_model(p.as_vector(), grid)


def default_params(cfg: dict, visibility: float, phase: float, amplitude: float = 1.0) -> InterferogramParams:
    """Params from the [interferogram] config section, centred on the camera."""
    section = cfg["interferogram"]
    wavelength = fringe_wavelength(section["tof_s"], section["separation_um"], section["mass_kg"])
    return InterferogramParams(
        amplitude=amplitude,
        z_com=0.0,
        sigma_z=float(section["sigma_z_um"]),
        visibility=float(visibility),
        wavelength=wavelength,
        z_ref=0.0,
        phase=float(math.remainder(phase, 2.0 * math.pi)),
        background=0.0,
    )


def default_grid(cfg: dict) -> CameraGrid:
    section = cfg["interferogram"]
    return CameraGrid.centered(float(section["pixel_size_um"]), int(section["n_pixels"]))
