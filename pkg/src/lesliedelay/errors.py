"""Exception hierarchy shared by all modules."""


class LeslieDelayError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(LeslieDelayError):
    """Malformed or incomplete configuration file."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DegenerateAngleError(LeslieDelayError):
    """A^2 + B^2 vanishes, so the switching angles are undefined."""


class MultipleRootError(LeslieDelayError):
    """i*omega is a multiple characteristic root (dD/dlambda = 0)."""


class OffCurveError(LeslieDelayError):
    """The supplied (tau1, tau2, omega) does not satisfy D_n(i omega) = 0."""


class PathThroughIntersectionError(LeslieDelayError):
    """A probe path passes too close to an intersection of switching curves."""


class DegenerateUnfoldingError(LeslieDelayError):
    """Normal-form coefficients sit on a boundary of the classification."""


class SingularMapError(LeslieDelayError):
    """The linear map from delay offsets to unfolding parameters is singular."""


class ChartRangeError(LeslieDelayError):
    """Point lies outside the local chart around a double-Hopf point."""


class OnBoundaryError(LeslieDelayError):
    """Point lies on a bifurcation semi-line within angular tolerance."""


class UnsupportedModeError(LeslieDelayError):
    """Requested computation is only available for spatial mode 0."""


class SimulationError(LeslieDelayError):
    """Integrator diagnostic: positivity loss or non-finite state."""

    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} at t={t:.6g}")


class SingularDenominatorError(LeslieDelayError, ZeroDivisionError):
    """Leslie-Gower term evaluated with (near) zero prey density."""
