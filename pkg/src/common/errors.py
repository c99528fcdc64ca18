"""Exception hierarchy shared by every module of the toolkit."""


class ClockInterferometryError(Exception):
    """Base class for toolkit errors."""


class InvalidParameterError(ClockInterferometryError, ValueError):
    """A precondition on an input value does not hold."""


class SingularPhaseError(ClockInterferometryError):
    """The interference phase is undefined because the visibility vanishes
    (theta = pi/2 and phi = pi mod 2pi)."""

    def __init__(self, theta: float, phi: float):
        self.theta = theta
        self.phi = phi
        super().__init__(f"undefined phase: zero visibility at theta={theta:.6g}, phi={phi:.6g}")


class DegeneratePoleError(ClockInterferometryError):
    """A latitude arc was requested on a pole of the Bloch sphere."""


class UndefinedGeodesicError(ClockInterferometryError):
    """Geodesic closure requested between (near-)antipodal points."""


class DegenerateImageError(ClockInterferometryError):
    """Interferogram image is empty or flat and cannot be fitted."""


class ConfigError(ClockInterferometryError):
    """Configuration file missing keys or violating the schema."""

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


class ScenarioAbortedError(ClockInterferometryError):
    """More than half of the fits of a scenario failed."""
