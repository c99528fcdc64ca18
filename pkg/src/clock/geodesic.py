"""
Bloch-sphere trajectories and the solid angle they enclose.

|2> sits on the north pole, so the clock state cos(theta/2)|2> + sin(theta/2)|1>
has polar angle theta, and advancing the relative rotation phi = phi2 - phi1
turns its Bloch vector clockwise seen from above. Loops are closed with the
shortest great-circle arc between the last and first sample. The enclosed area
is summed as a fan of spherical triangles from an apex; each triangle uses
L'Huilier's theorem for its excess and the triple product for its orientation.
Counter-clockwise seen from above the north pole counts positive.
"""

import math
from dataclasses import dataclass

import numpy as np

from src.common.errors import DegeneratePoleError, InvalidParameterError, UndefinedGeodesicError

ANTIPODAL_TOL = 1e-6
UNIT_TOL = 1e-9
POLE_TOL = 1e-12
HEMISPHERE_TOL = 1e-9


@dataclass(frozen=True)
class BlochTrajectory:
    """Ordered unit vectors; consecutive samples must subtend less than pi/2."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise InvalidParameterError(f"trajectory needs shape (n>=2, 3), got {pts.shape}")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise InvalidParameterError("trajectory samples must be unit vectors")
        steps = _arc_length(pts[:-1], pts[1:])
        if np.any(steps >= math.pi / 2):
            raise InvalidParameterError("consecutive trajectory samples subtend pi/2 or more; refine the sampling")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _arc_length(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.arctan2(cross, dot)


def latitude_arc(theta: float, phi_span: float, n: int) -> BlochTrajectory:
    """
    n samples of the clock state at polar angle theta while phi advances 0 -> phi_span.
    The azimuth of the Bloch vector is -phi.
    """
    if theta <= POLE_TOL or theta >= math.pi - POLE_TOL:
        raise DegeneratePoleError(f"latitude arc at a pole (theta={theta}) has no azimuthal extent")
    if n < 2:
        raise InvalidParameterError(f"need at least two samples, got n={n}")
    phi = np.linspace(0.0, phi_span, n)
    s, c = math.sin(theta), math.cos(theta)
    pts = np.column_stack([s * np.cos(phi), -s * np.sin(phi), np.full(n, c)])
    return BlochTrajectory(pts)


def _fan_apex(pts: np.ndarray) -> np.ndarray:
    closed = np.vstack([pts, pts[:1]])
    normal = np.sum(np.cross(closed[:-1], closed[1:]), axis=0)
    norm = np.linalg.norm(normal)
    if norm > 1e-9:
        return normal / norm
    centroid = pts.mean(axis=0)
    norm = np.linalg.norm(centroid)
    if norm > 1e-9:
        return centroid / norm
    # loop is both flat and balanced; any vertex works as an apex
    return pts[0]


def _orientation_sign(apex: np.ndarray) -> float:
    """+1 when the loop normal points north; loops through the poles fall back to x, then y."""
    for component in (apex[2], apex[0], apex[1]):
        if abs(component) > POLE_TOL:
            return math.copysign(1.0, component)
    return 1.0


def _signed_excess(apex: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """L'Huilier excess of triangles (apex, b_i, c_i) signed by orientation."""
    a = np.broadcast_to(apex, b.shape)
    sa = _arc_length(b, c)
    sb = _arc_length(a, c)
    sc = _arc_length(a, b)
    s = 0.5 * (sa + sb + sc)
    prod = np.tan(s / 2) * np.tan((s - sa) / 2) * np.tan((s - sb) / 2) * np.tan((s - sc) / 2)
    excess = 4.0 * np.arctan(np.sqrt(np.clip(prod, 0.0, None)))
    orient = np.sign(np.einsum("ij,ij->i", a, np.cross(b, c)))
    return orient * excess


def enclosed_solid_angle(traj: BlochTrajectory) -> float:
    """
    Signed solid angle of the trajectory closed by the shortest geodesic.
    Returned in [-2pi, 2pi]; sign follows the traversal orientation, so a
    reversed loop gives the negated value, hemispheres included.
    """
    pts = traj.points
    if _arc_length(pts[-1], pts[0]) > math.pi - ANTIPODAL_TOL:
        raise UndefinedGeodesicError("closing geodesic is undefined: endpoints are antipodal")

    apex = _fan_apex(pts)
    closed = np.vstack([pts, pts[:1]])
    omega = float(np.sum(_signed_excess(apex, closed[:-1], closed[1:])))
    # area is only defined modulo the full sphere
    omega = math.remainder(omega, 4.0 * math.pi)
    if abs(abs(omega) - 2.0 * math.pi) < HEMISPHERE_TOL:
        # a great circle bounds two hemispheres; take the one the traversal circles counter-clockwise
        omega = math.copysign(2.0 * math.pi, _orientation_sign(apex))
    return omega


def geometric_phase_area(traj: BlochTrajectory) -> float:
    """
    Geometric phase accumulated around the closed loop, -Omega/2.
    For traj = latitude_arc(theta, phi, n) this equals the geodesic-convention
    Phi_G of decompose_phase at phi1 = 0, phi2 = phi, modulo 2pi.
    """
    return -0.5 * enclosed_solid_angle(traj)
