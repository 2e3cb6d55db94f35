"""Exception types shared across the package."""


class BandtraceError(Exception):
    """Base class for all package-specific errors."""


class OverlappingBands(BandtraceError):
    pass


class MassInsideHull(BandtraceError):
    pass


class NonpositiveWeight(BandtraceError):
    pass


class NonpositiveMass(BandtraceError):
    pass


class EvaluationTooCloseToSupport(BandtraceError):
    pass


class BranchPointEvaluation(BandtraceError):
    pass


class InsufficientNodes(BandtraceError):
    pass


class HankelBreakdown(BandtraceError):
    """Moment-based coefficient recursion hit a non-positive pivot."""


class NoZeroNearMass(BandtraceError):
    """No polynomial zero found near a point mass (expected for small degree)."""


class SingularPeriodSystem(BandtraceError):
    """Period linear system is numerically singular for this band layout."""


class NewtonDivergence(BandtraceError):
    """Torus Newton iteration failed to converge after restarts."""


class StepCollapse(BandtraceError):
    """Divisor-flow integrator failed to advance."""


class EvaluationOffSupportedRay(BandtraceError):
    """Operation only supported on the real ray to the right of the support."""


class MissingSpuriousPole(BandtraceError):
    """Exact-degree target requested before spurious zeros are identifiable."""
