"""Exception hierarchy shared by all map families."""


class EqCavityError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(EqCavityError, ValueError):
    """Invalid geometry or run configuration."""


class NullLoading(EqCavityError, ValueError):
    """The effective loading parameter ``a`` vanishes."""


class DegenerateLoading(EqCavityError):
    """``gamma == 1``: contours collapse onto segments."""


class DegenerateGeometry(EqCavityError):
    pass


class OnCutError(EqCavityError, ValueError):
    """A point strictly inside a slit was passed to an off-cut evaluator."""


class NotOnCutError(EqCavityError, ValueError):
    pass


class NonConvergence(EqCavityError, ArithmeticError):
    """Quadrature error estimate stalled above the requested tolerance."""


class PoleHit(EqCavityError, ArithmeticError):
    pass


class SingularPeriods(EqCavityError, ArithmeticError):
    """Period matrix is numerically singular (slits nearly merged)."""


class OnContourZero(EqCavityError, ArithmeticError):
    """``eta`` (nearly) vanishes on a slit side; the count is ill-defined."""


class NonIntegerCount(EqCavityError, ArithmeticError):
    pass


class RootSelectionError(EqCavityError, ArithmeticError):
    pass


class BoundarySampleFailure(EqCavityError, ArithmeticError):
    pass


class PoleProximity(EqCavityError, ArithmeticError):
    pass


__all__ = [
    "EqCavityError",
    "ConfigError",
    "NullLoading",
    "DegenerateLoading",
    "DegenerateGeometry",
    "OnCutError",
    "NotOnCutError",
    "NonConvergence",
    "PoleHit",
    "SingularPeriods",
    "OnContourZero",
    "NonIntegerCount",
    "RootSelectionError",
    "BoundarySampleFailure",
    "PoleProximity",
]
