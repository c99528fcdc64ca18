"""
Phase-noise model and the sensitivity arithmetic built on it.

Quantum projection noise (v sqrt(N A))^-1 is combined in quadrature with a
constant technical phase noise; the phase sensitivity is the interference-phase
noise divided by the phase-response slope.
"""

import math
from dataclasses import dataclass

import numpy as np

from src.common.errors import InvalidParameterError

# two-point scans around the working point, phases in rad (value, 1-sigma error)
SM_PHI = (0.94 * math.pi, 1.04 * math.pi)
SM_CLOCK = ((-1.36, 0.186), (-5.71, 0.192))
SM_SINGLE = ((-2.93, 0.085), (-3.68, 0.094))


@dataclass(frozen=True)
class NoiseBudget:
    atoms: float
    cycles: int = 8
    technical: float = 0.1
    visibility: float = 1.0

    def __post_init__(self):
        if self.atoms < 1:
            raise InvalidParameterError(f"need at least one atom per cycle, got {self.atoms}")
        if self.cycles < 1:
            raise InvalidParameterError(f"need at least one cycle, got {self.cycles}")
        if self.technical < 0:
            raise InvalidParameterError(f"technical noise must be non-negative, got {self.technical}")
        if not 0.0 <= self.visibility <= 1.0:
            raise InvalidParameterError(f"visibility must lie in [0, 1], got {self.visibility}")


def quantum_noise(budget: NoiseBudget) -> float:
    if budget.visibility == 0.0:
        return math.inf
    return 1.0 / (budget.visibility * math.sqrt(budget.atoms * budget.cycles))


def phase_noise(budget: NoiseBudget) -> float:
    """Delta Phi_T = sqrt[(v sqrt(N A))^-2 + technical^2]; inf at zero visibility."""
    q = quantum_noise(budget)
    if math.isinf(q):
        return math.inf
    return math.hypot(q, budget.technical)


def phase_noise_array(visibility, atoms, cycles, technical):
    """Vectorised phase_noise over a visibility array."""
    v = np.asarray(visibility, dtype=float)
    with np.errstate(divide="ignore"):
        q = np.where(v > 0, 1.0 / (v * np.sqrt(atoms * cycles)), np.inf)
    return np.sqrt(q**2 + technical**2)


def sensitivity(dPhi: float, slope: float) -> float:
    """Delta phi = Delta Phi_T / |slope|."""
    if slope == 0:
        raise InvalidParameterError("zero phase-response slope: phase is insensitive to phi")
    return dPhi / abs(slope)


@dataclass(frozen=True)
class TwoPointResult:
    slope: float
    delta2_phi: float

    @property
    def delta_phi(self) -> float:
        return math.sqrt(self.delta2_phi)


def two_point_sensitivity(
    phase_a: float, err_a: float, phase_b: float, err_b: float, phi_a: float, phi_b: float
) -> TwoPointResult:
    """Finite-difference slope between two measured phases and the propagated Delta^2 phi."""
    if not all(math.isfinite(x) for x in (phase_a, err_a, phase_b, err_b, phi_a, phi_b)):
        raise InvalidParameterError("two-point inputs must be finite")
    if phi_a == phi_b:
        raise InvalidParameterError("two-point slope needs distinct abscissae")
    slope = (phase_b - phase_a) / (phi_b - phi_a)
    if slope == 0:
        raise InvalidParameterError("measured phases are equal; slope is zero")
    return TwoPointResult(slope=slope, delta2_phi=(err_a**2 + err_b**2) / slope**2)


def gain_db(delta2_test: float, delta2_ref: float) -> float:
    """10 log10(ref / test) of squared phase uncertainties."""
    if not (math.isfinite(delta2_test) and math.isfinite(delta2_ref)):
        raise InvalidParameterError("squared uncertainties must be finite")
    if delta2_test <= 0 or delta2_ref <= 0:
        raise InvalidParameterError("squared uncertainties must be positive")
    return 10.0 * math.log10(delta2_ref / delta2_test)


def population_noise_amplification(G0: float, n1: float, n2: float, dphi_sig: float) -> float:
    """Extra phase 2 G0^2 (n2 - n1) dphi_sig from a relative population imbalance n1, n2."""
    return 2.0 * G0**2 * (n2 - n1) * dphi_sig


def correlated_phase_noise(G: float, dphi_A: float, dphi_B: float) -> float:
    """Total-phase error G (dphi_B - dphi_A) + dphi_A; common-mode noise is not amplified."""
    return G * (dphi_B - dphi_A) + dphi_A


def signal_uncertainty_budget(dI_over_I: float, dT_over_T: float, dz_over_z: float) -> float:
    """Relative signal uncertainty; the field gradient goes as 1/z^2, hence the factor 2."""
    if min(dI_over_I, dT_over_T, dz_over_z) < 0:
        raise InvalidParameterError("relative uncertainties must be non-negative")
    return dI_over_I + dT_over_T + 2.0 * dz_over_z
