"""
Model-curve scenarios: phase transition, phase decomposition, visibility and
noise model, gain curves and the fixed two-point sensitivity arithmetic.
Every function returns a ScenarioResult of DataFrames plus a summary dict.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from src.clock.clock_state import (
    CLOCK_MAPPING,
    minimum_visibility,
    phase_curve,
    phase_slope,
    theta_from_p2,
    visibility,
    working_point_slope,
)
from src.common.errors import InvalidParameterError
from src.noise.gain import (
    POPULATION_UNCERTAINTY,
    asymptotic_gain,
    gain_band,
    gain_curve,
    gain_vs_atoms,
    reference_convention,
    sweep_frame,
    visibility_band,
)
from src.noise.sensitivity import (
    SM_CLOCK,
    SM_PHI,
    SM_SINGLE,
    NoiseBudget,
    gain_db,
    phase_noise,
    phase_noise_array,
    two_point_sensitivity,
)

logger = logging.getLogger(__name__)

WORKING_P2 = 0.514
FIG2D_P2 = (0.0, 0.35, 0.486, 0.514, 0.65, 1.0)
FIGS5_P2 = (0.09, 0.35, 0.61, 0.78)
FIG4B_P2 = (0.514, 0.501)
FIG4B_TECHNICAL = (0.1, 0.01)


@dataclass
class ScenarioResult:
    scenario: str
    curves: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def default_phi_grid(n_points: int = 241, refine_lo: float = 0.9, refine_hi: float = 1.1, refine_step: float = 0.005):
    """[0, 2pi] in n_points, merged with a 0.005pi-step refinement of [0.9pi, 1.1pi]."""
    coarse = np.linspace(0.0, 2.0 * math.pi, n_points)
    n_fine = int(round((refine_hi - refine_lo) / refine_step)) + 1
    fine = math.pi * np.linspace(refine_lo, refine_hi, n_fine)
    return np.unique(np.round(np.concatenate([coarse, fine]), 12))


def check_grid(phi_grid) -> np.ndarray:
    grid = np.asarray(phi_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidParameterError("phi grid must be one-dimensional and strictly increasing")
    return grid


def _label(p2: float) -> str:
    return f"P2={p2:g}"


def reproduce_fig2d(p2_list=FIG2D_P2, phi_grid=None) -> ScenarioResult:
    """Total phase vs phi under phi2 = 2 phi1, each curve referenced to phi = 0."""
    grid = check_grid(default_phi_grid() if phi_grid is None else phi_grid)
    table = {"phi_rad": grid}
    summary = {}
    window = np.abs(grid - math.pi) <= 0.1 * math.pi + 1e-12
    for p2 in p2_list:
        curve = phase_curve(theta_from_p2(p2), grid, CLOCK_MAPPING)
        table[_label(p2)] = curve.total
        baseline = 2.0 * grid if p2 >= 0.5 else grid
        excess = curve.total - baseline
        entry = {"transition_height_rad": float(np.ptp(excess[window])) if window.any() else 0.0}
        if abs(p2 - 0.5) > 1e-9:
            entry["slope_at_pi"] = working_point_slope(p2)
        summary[_label(p2)] = entry
    return ScenarioResult("fig2d", {"phase": pd.DataFrame(table)}, summary)


def reproduce_fig2b(p2: float = WORKING_P2, phi_grid=None) -> ScenarioResult:
    """Phi_T, Phi_D and Phi_G (geodesic convention), referenced so Phi_G starts at zero."""
    grid = check_grid(default_phi_grid() if phi_grid is None else phi_grid)
    curve = phase_curve(theta_from_p2(p2), grid, CLOCK_MAPPING, convention="geodesic")
    df = pd.DataFrame(
        {"phi_rad": grid, "total_rad": curve.total, "dynamical_rad": curve.dynamical, "geometric_rad": curve.geometric}
    )
    summary = {
        "p2": p2,
        "convention": "geodesic",
        "geometric_span_rad": float(np.ptp(curve.geometric)),
        "geometric_at_end_rad": float(curve.geometric[-1]),
    }
    return ScenarioResult("fig2b", {"decomposition": df}, summary)


def reproduce_figS5(p2_list=FIGS5_P2, phi_grid=None, probe_phi: float = 1.2 * math.pi) -> ScenarioResult:
    """Total and geometric phase for populations on both sides of P2 = 0.5."""
    grid = check_grid(default_phi_grid() if phi_grid is None else phi_grid)
    total = {"phi_rad": grid}
    geometric = {"phi_rad": grid}
    summary = {"probe_phi_rad": probe_phi, "convention": "geodesic"}
    for p2 in p2_list:
        theta = theta_from_p2(p2)
        curve = phase_curve(theta, grid, CLOCK_MAPPING, convention="geodesic")
        total[_label(p2)] = curve.total
        geometric[_label(p2)] = curve.geometric
        probe = phase_curve(theta, [0.0, probe_phi], CLOCK_MAPPING, convention="geodesic")
        summary[_label(p2)] = {
            "geometric_at_probe_rad": float(probe.geometric[-1]),
            "max_abs_geometric_rad": float(np.max(np.abs(curve.geometric))),
        }
    curves = {"total": pd.DataFrame(total), "geometric": pd.DataFrame(geometric)}
    return ScenarioResult("figS5", curves, summary)


def reproduce_fig3(
    p2: float = WORKING_P2,
    atoms: float = 5000,
    cycles: int = 8,
    technical_levels=(0.0, 0.1),
    phi_grid=None,
) -> ScenarioResult:
    """Visibility along the scan, and the phase-noise model as a function of visibility."""
    grid = check_grid(default_phi_grid() if phi_grid is None else phi_grid)
    theta = theta_from_p2(p2)
    vis = visibility(theta, grid)
    v_axis = np.logspace(-2, 0, 201)
    noise = {"visibility": v_axis}
    for tech in technical_levels:
        noise[f"dPhi_tech{tech:g}_rad"] = phase_noise_array(v_axis, atoms, cycles, tech)
    cutoff = minimum_visibility(p2)
    noise["reachable"] = v_axis >= cutoff
    summary = {
        "p2": p2,
        "min_visibility_grid": float(vis.min()),
        "min_visibility_formula": cutoff,
        "visibility_band": list(visibility_band(p2)),
        "dPhi_v0.025_tech0": phase_noise(NoiseBudget(atoms, cycles, 0.0, 0.025)),
        "dPhi_v1_tech0.1": phase_noise(NoiseBudget(atoms, cycles, 0.1, 1.0)),
        "dPhi_at_cutoff_tech0.1": phase_noise(NoiseBudget(atoms, cycles, 0.1, cutoff)),
    }
    curves = {"visibility": pd.DataFrame({"phi_rad": grid, "visibility": vis}), "noise_model": pd.DataFrame(noise)}
    return ScenarioResult("fig3", curves, summary)


def reproduce_fig4a(
    p2: float = WORKING_P2,
    atoms: float = 5000,
    cycles: int = 8,
    technical: float = 0.1,
    phi_grid=None,
    dp2: float = POPULATION_UNCERTAINTY,
) -> ScenarioResult:
    """Gain vs phi with the P2 +/- dp2 band, plus the P2 = 0 single-state curve."""
    grid = check_grid(default_phi_grid() if phi_grid is None else phi_grid)
    points = gain_curve(p2, atoms, cycles, technical, grid)
    sweep = sweep_frame(points)
    band = gain_band(p2, atoms, cycles, technical, grid, dp2)
    single = gain_curve(0.0, atoms, cycles, technical, grid)
    band["gain_db_p2_0"] = [pt.gain_db for pt in single]
    gains = sweep["gain_db"].to_numpy()
    peak = int(np.argmax(gains))
    summary = {
        "p2": p2,
        "atoms": atoms,
        "cycles": cycles,
        "technical": technical,
        "peak_gain_db": float(gains[peak]),
        "peak_phi_rad": float(grid[peak]),
        "single_state_offset_db": float(-np.mean(band["gain_db_p2_0"])),
        "reference": reference_convention(),
    }
    return ScenarioResult("fig4a", {"sweep": sweep, "band": band}, summary)


def reproduce_fig4b(
    p2_list=FIG4B_P2,
    technical_levels=FIG4B_TECHNICAL,
    atom_grid=None,
    cycles: int = 8,
    phi: float = math.pi,
) -> ScenarioResult:
    """Gain at the working point vs atom number, long format."""
    atoms = np.logspace(3, 9, 25) if atom_grid is None else np.asarray(atom_grid, dtype=float)
    frames = []
    summary = {"phi_rad": phi, "cycles": cycles, "reference": reference_convention()}
    for p2 in p2_list:
        for tech in technical_levels:
            df = gain_vs_atoms(p2, atoms, cycles, tech, phi)
            df.insert(0, "technical", tech)
            df.insert(0, "p2", p2)
            frames.append(df)
        summary[_label(p2)] = {
            "asymptotic_gain_db": asymptotic_gain(p2, phi),
            "slope_at_phi": float(phase_slope(theta_from_p2(p2), phi)),
        }
    return ScenarioResult("fig4b", {"gain_vs_atoms": pd.concat(frames, ignore_index=True)}, summary)


def sm_sensitivity_report() -> ScenarioResult:
    """Two-point slopes, Delta^2 phi and dB gain from the recorded clock and single-state scans."""
    (ca, ea), (cb, eb) = SM_CLOCK
    (sa, fa), (sb, fb) = SM_SINGLE
    clock = two_point_sensitivity(ca, ea, cb, eb, *SM_PHI)
    single = two_point_sensitivity(sa, fa, sb, fb, *SM_PHI)
    gain = gain_db(clock.delta2_phi, single.delta2_phi)
    summary = {
        "phi_rad": list(SM_PHI),
        "clock_slope": clock.slope,
        "clock_delta2_phi": clock.delta2_phi,
        "single_slope": single.slope,
        "single_delta2_phi": single.delta2_phi,
        "gain_db": gain,
    }
    table = pd.DataFrame(
        {
            "scan": ["clock", "single"],
            "slope": [clock.slope, single.slope],
            "delta2_phi": [clock.delta2_phi, single.delta2_phi],
        }
    )
    logger.debug(f"two-point gain {gain:.3f} dB")
    return ScenarioResult("sm_sensitivity", {"two_point": table}, summary)
