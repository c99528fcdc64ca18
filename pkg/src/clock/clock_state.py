"""
Phase algebra of the two-level clock interferometer.

Wave packet A carries cos(theta/2)|2> + sin(theta/2)|1>; wave packet B the same
superposition with phases phi2 on |2> and phi1 on |1>. The interference phase
is arg<A|B> = arg[P2 exp(i phi2) + P1 exp(i phi1)] with P2 = cos^2(theta/2).
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.common.errors import InvalidParameterError, SingularPhaseError

# visibility below this is treated as the zero-visibility singular point
SINGULAR_TOL = 1e-12
POPULATION_TOL = 1e-12

Convention = Literal["printed", "geodesic"]


def p2_from_theta(theta):
    return np.cos(np.asarray(theta) / 2.0) ** 2


def theta_from_p2(p2: float) -> float:
    if not 0.0 <= p2 <= 1.0:
        raise InvalidParameterError(f"population P2 must lie in [0, 1], got {p2}")
    return 2.0 * math.acos(math.sqrt(p2))


def _check_theta(theta) -> None:
    t = np.asarray(theta, dtype=float)
    if np.any(t < -POPULATION_TOL) or np.any(t > math.pi + POPULATION_TOL):
        raise InvalidParameterError(f"theta must lie in [0, pi], got {theta}")


@dataclass(frozen=True)
class PhaseMapping:
    """
    Linear dependence of the level phases on the scanned relative rotation phi:
    phi1 = a1*phi + b1, phi2 = a2*phi + b2.
    """

    a1: float
    a2: float
    b1: float = 0.0
    b2: float = 0.0
    name: str = "custom"

    def phases(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.a1 * phi + self.b1, self.a2 * phi + self.b2


# |2> = m_F=2 has twice the magnetic projection of |1> = m_F=1
CLOCK_MAPPING = PhaseMapping(a1=1.0, a2=2.0, name="phi2=2*phi1")
LEVEL2_ONLY = PhaseMapping(a1=0.0, a2=1.0, name="phi1=0")


@dataclass(frozen=True)
class ClockState:
    theta: float
    phi1: float
    phi2: float

    def __post_init__(self):
        _check_theta(self.theta)

    @classmethod
    def from_populations(cls, p2: float, phi1: float, phi2: float) -> "ClockState":
        return cls(theta_from_p2(p2), phi1, phi2)

    @property
    def p2(self) -> float:
        return math.cos(self.theta / 2.0) ** 2

    @property
    def p1(self) -> float:
        return math.sin(self.theta / 2.0) ** 2

    @property
    def phi(self) -> float:
        """Relative rotation phi2 - phi1."""
        return self.phi2 - self.phi1

    @property
    def ratio(self) -> float:
        """R = P2/P1 (inf when P1 = 0)."""
        return math.inf if self.p1 == 0.0 else self.p2 / self.p1

    def overlap(self) -> complex:
        return self.p2 * complex(math.cos(self.phi2), math.sin(self.phi2)) + self.p1 * complex(
            math.cos(self.phi1), math.sin(self.phi1)
        )

    def bloch_vector(self) -> np.ndarray:
        """Bloch vector of packet B, |2> at the north pole, azimuth -(phi2 - phi1)."""
        s = math.sin(self.theta)
        return np.array([s * math.cos(self.phi), -s * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class PhaseDecomposition:
    total: float
    dynamical: float
    geometric: float


def total_phase_array(theta, phi1, phi2):
    """
    Vectorised Phi_T = phi2 + atan2(P1 sin(phi1 - phi2), P2 + P1 cos(phi1 - phi2)).
    The branch is anchored on the majority level, which keeps the result
    continuous in phi everywhere except the singular point.
    """
    theta, phi1, phi2 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (theta, phi1, phi2)))
    p2 = np.cos(theta / 2.0) ** 2
    p1 = np.sin(theta / 2.0) ** 2
    psi = phi1 - phi2
    vis = np.abs(p2 + p1 * np.exp(1j * psi))
    bad = vis < SINGULAR_TOL
    if np.any(bad):
        idx = np.argmax(bad)
        raise SingularPhaseError(float(theta.flat[idx]), float(-psi.flat[idx]))

    anchored_2 = phi2 + np.arctan2(p1 * np.sin(psi), p2 + p1 * np.cos(psi))
    anchored_1 = phi1 + np.arctan2(p2 * np.sin(-psi), p1 + p2 * np.cos(-psi))
    return np.where(p2 >= p1, anchored_2, anchored_1)


def total_phase(state: ClockState) -> float:
    """Interference phase Phi_T of the state; raises SingularPhaseError at zero visibility."""
    return float(total_phase_array(state.theta, state.phi1, state.phi2))


def visibility(theta, phi):
    """v = sqrt(1 - 4 sin^2(theta/2) cos^2(theta/2) sin^2(phi/2))."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    v2 = 1.0 - 4.0 * np.sin(theta / 2.0) ** 2 * np.cos(theta / 2.0) ** 2 * np.sin(phi / 2.0) ** 2
    v = np.sqrt(np.clip(v2, 0.0, None))
    return float(v) if v.ndim == 0 else v


def minimum_visibility(p2: float) -> float:
    """Visibility at the working point phi = pi, |P2 - P1|."""
    return abs(2.0 * p2 - 1.0)


def slope_G(p2: float) -> float:
    """
    Linearised slope G = 1/(1 - R), R = P2/(1 - P2).
    P2 = 0.5 returns math.inf; P2 = 1 returns 0.
    """
    if not 0.0 <= p2 <= 1.0:
        raise InvalidParameterError(f"population P2 must lie in [0, 1], got {p2}")
    if p2 == 1.0:
        return 0.0
    if abs(p2 - 0.5) < POPULATION_TOL:
        return math.inf
    ratio = p2 / (1.0 - p2)
    return 1.0 / (1.0 - ratio)


def phase_slope(theta, phi, mapping: PhaseMapping = CLOCK_MAPPING):
    """
    dPhi_T/dphi along the mapping, from the derivative of arg z:
    Im(z'/z) with z = P2 exp(i phi2) + P1 exp(i phi1).
    """
    _check_theta(theta)
    phi = np.asarray(phi, dtype=float)
    p2 = p2_from_theta(theta)
    p1 = 1.0 - p2
    phi1, phi2 = mapping.phases(phi)
    e1, e2 = np.exp(1j * phi1), np.exp(1j * phi2)
    z = p2 * e2 + p1 * e1
    if np.any(np.abs(z) < SINGULAR_TOL):
        idx = int(np.argmax(np.abs(z) < SINGULAR_TOL))
        raise SingularPhaseError(float(np.asarray(theta, dtype=float)), float(np.atleast_1d(phi)[idx]))
    dz = mapping.a2 * p2 * e2 + mapping.a1 * p1 * e1
    slope = np.real(dz * np.conj(z)) / np.abs(z) ** 2
    return float(slope) if slope.ndim == 0 else slope


def working_point_slope(p2: float) -> float:
    """Slope at phi = pi under CLOCK_MAPPING: 1 + P2/(P2 - P1)."""
    if abs(2.0 * p2 - 1.0) < POPULATION_TOL:
        raise SingularPhaseError(theta_from_p2(p2), math.pi)
    return 1.0 + p2 / (2.0 * p2 - 1.0)


def _dynamical(theta, phi1, phi2, convention: Convention):
    if convention == "printed":
        return (phi2 - phi1) * (1.0 - np.cos(theta)) / 2.0
    if convention == "geodesic":
        p2 = np.cos(np.asarray(theta) / 2.0) ** 2
        return p2 * phi2 + (1.0 - p2) * phi1
    raise InvalidParameterError(f"unknown dynamical-phase convention {convention!r}")


def decompose_phase(state: ClockState, convention: Convention = "printed") -> PhaseDecomposition:
    """
    Split Phi_T into dynamical and geometric parts, Phi_G := Phi_T - Phi_D.

    "printed":  Phi_D = phi (1 - cos theta)/2 with phi = phi2 - phi1.
    "geodesic": Phi_D = P1 phi1 + P2 phi2, so Phi_G is the Pancharatnam phase
                and equals minus half the solid angle of the closed Bloch loop.
    """
    total = total_phase(state)
    dyn = float(_dynamical(state.theta, state.phi1, state.phi2, convention))
    return PhaseDecomposition(total=total, dynamical=dyn, geometric=total - dyn)


@dataclass(frozen=True)
class PhaseCurve:
    phi: np.ndarray
    total: np.ndarray
    dynamical: np.ndarray
    geometric: np.ndarray
    mapping: str
    convention: str


def phase_curve(
    theta: float,
    phi_grid,
    mapping: PhaseMapping = CLOCK_MAPPING,
    convention: Convention = "printed",
    reference: bool = True,
) -> PhaseCurve:
    """
    Total, dynamical and geometric phase over a phi grid. With reference=True every
    curve is shifted so it starts at zero on the first grid point.
    """
    phi = np.asarray(phi_grid, dtype=float)
    phi1, phi2 = mapping.phases(phi)
    total = total_phase_array(theta, phi1, phi2)
    dyn = np.broadcast_to(_dynamical(theta, phi1, phi2, convention), total.shape).astype(float)
    geo = total - dyn
    if reference:
        total, dyn, geo = total - total[0], dyn - dyn[0], geo - geo[0]
    return PhaseCurve(phi=phi, total=total, dynamical=dyn, geometric=geo, mapping=mapping.name, convention=convention)
