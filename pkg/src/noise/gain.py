"""
Metrological gain of the clock configuration against a single-state reference.

The reference runs with the same atom number, cycle count and technical noise.
Under the phi2 = 2 phi1 mapping a pure |2> reference (P2 = 1) has unit
visibility and slope 2 everywhere; P2 = 0 has slope 1.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from src.clock.clock_state import (
    CLOCK_MAPPING,
    PhaseMapping,
    minimum_visibility,
    phase_slope,
    theta_from_p2,
    total_phase_array,
    visibility,
)
from src.common.errors import InvalidParameterError
from src.noise.sensitivity import phase_noise_array

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["phi_rad", "phase_rad", "slope", "dPhi_rad", "dphi_rad", "gain_db"]
POPULATION_UNCERTAINTY = 0.004


@dataclass(frozen=True)
class SensitivityPoint:
    phi: float
    total_phase: float
    slope: float
    dPhi: float
    dphi: float
    gain_db: float


def _delta_phi(p2, phi, atoms, cycles, technical, mapping):
    theta = theta_from_p2(p2)
    phi = np.asarray(phi, dtype=float)
    phi1, phi2 = mapping.phases(phi)
    vis = visibility(theta, phi1 - phi2)
    dPhi = phase_noise_array(vis, atoms, cycles, technical)
    slope = phase_slope(theta, phi, mapping)
    with np.errstate(divide="ignore"):
        dphi = dPhi / np.abs(slope)
    return theta, dPhi, np.atleast_1d(slope), dphi


def reference_dphi(phi, atoms, cycles, technical, mapping: PhaseMapping = CLOCK_MAPPING, reference_p2: float = 1.0):
    """Delta phi of the single-state reference evaluated at the same phi."""
    _, _, _, dphi = _delta_phi(reference_p2, phi, atoms, cycles, technical, mapping)
    return dphi


def gain_curve(
    p2: float,
    atoms: float,
    cycles: int,
    technical: float,
    phi_grid,
    mapping: PhaseMapping = CLOCK_MAPPING,
    reference_p2: float = 1.0,
) -> list[SensitivityPoint]:
    """Sensitivity and gain vs the reference at every phi of the grid."""
    if abs(p2 - 0.5) < 1e-12:
        raise InvalidParameterError("P2 = 0.5 has a singular working point; choose P2 != 0.5")
    phi = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    theta, dPhi, slope, dphi = _delta_phi(p2, phi, atoms, cycles, technical, mapping)
    ref = reference_dphi(phi, atoms, cycles, technical, mapping, reference_p2)
    phase = np.atleast_1d(total_phase_array(theta, *mapping.phases(phi)))
    gain = 20.0 * np.log10(ref / dphi)
    dPhi = np.broadcast_to(dPhi, phi.shape)
    return [
        SensitivityPoint(float(a), float(b), float(c), float(d), float(e), float(g))
        for a, b, c, d, e, g in zip(phi, phase, slope, dPhi, dphi, gain)
    ]


def sweep_frame(points: list[SensitivityPoint]) -> pd.DataFrame:
    df = pd.DataFrame([asdict(p) for p in points])
    df.columns = SWEEP_COLUMNS
    return df


def reference_convention(mapping: PhaseMapping = CLOCK_MAPPING, reference_p2: float = 1.0) -> dict:
    """Metadata describing how the gain reference is evaluated."""
    return {
        "reference_p2": reference_p2,
        "mapping": mapping.name,
        "evaluated_at": "same phi",
        "shared": ["atoms", "cycles", "technical"],
        "gain": "20*log10(dphi_ref/dphi)",
    }


def gain_band(
    p2: float,
    atoms: float,
    cycles: int,
    technical: float,
    phi_grid,
    dp2: float = POPULATION_UNCERTAINTY,
    mapping: PhaseMapping = CLOCK_MAPPING,
) -> pd.DataFrame:
    """
    Gain at P2 and at P2 +/- dp2; gain_db_lo/hi are the pointwise extremes.
    Band edges that land on P2 = 0.5 are nudged by 1e-6.
    """
    curves = []
    for p in (p2 - dp2, p2, p2 + dp2):
        if abs(p - 0.5) < 1e-9:
            p = p + 1e-6 if p2 > 0.5 else p - 1e-6
        p = min(max(p, 0.0), 1.0)
        curves.append([pt.gain_db for pt in gain_curve(p, atoms, cycles, technical, phi_grid, mapping)])
    arr = np.asarray(curves)
    return pd.DataFrame(
        {
            "phi_rad": np.asarray(phi_grid, dtype=float),
            "gain_db": arr[1],
            "gain_db_lo": arr.min(axis=0),
            "gain_db_hi": arr.max(axis=0),
        }
    )


def visibility_band(p2: float, dp2: float = POPULATION_UNCERTAINTY) -> tuple[float, float]:
    """Range of the working-point visibility |P2 - P1| over P2 +/- dp2."""
    lo, hi = max(p2 - dp2, 0.0), min(p2 + dp2, 1.0)
    edges = (minimum_visibility(lo), minimum_visibility(hi))
    v_min = 0.0 if lo <= 0.5 <= hi else min(edges)
    return v_min, max(edges)


def gain_vs_atoms(
    p2: float,
    atom_grid,
    cycles: int = 8,
    technical: float = 0.1,
    phi: float = math.pi,
    mapping: PhaseMapping = CLOCK_MAPPING,
) -> pd.DataFrame:
    """Gain at a fixed phi as a function of atom number per cycle."""
    atoms = np.asarray(atom_grid, dtype=float)
    gains = [gain_curve(p2, n, cycles, technical, [phi], mapping)[0].gain_db for n in atoms]
    return pd.DataFrame({"atoms": atoms, "gain_db": gains})


def asymptotic_gain(p2: float, phi: float = math.pi, mapping: PhaseMapping = CLOCK_MAPPING) -> float:
    """Large-N limit 20 log10(|slope| / slope_ref) where technical noise dominates."""
    slope = abs(phase_slope(theta_from_p2(p2), phi, mapping))
    ref = abs(phase_slope(theta_from_p2(1.0), phi, mapping))
    return 20.0 * math.log10(slope / ref)


def technical_noise_derivative(
    p2: float,
    phi: float,
    atoms: float,
    cycles: int,
    technical: float,
    step: float = 1e-6,
    mapping: PhaseMapping = CLOCK_MAPPING,
) -> float:
    """Central difference of Delta phi with respect to the technical noise level."""
    if technical - step < 0:
        raise InvalidParameterError("technical noise must exceed the difference step")
    up = _delta_phi(p2, phi, atoms, cycles, technical + step, mapping)[3]
    down = _delta_phi(p2, phi, atoms, cycles, technical - step, mapping)[3]
    return float((up - down) / (2.0 * step))
