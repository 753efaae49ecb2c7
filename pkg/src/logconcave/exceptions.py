"""Exception and warning classes raised by logconcave."""


class LogConcaveError(Exception):
    """Base class for every error raised by this package."""


class InvariantViolation(LogConcaveError, ValueError):
    """A grid function fails a structural invariant (convexity, log-concavity, decay)."""


class MassOutOfRange(LogConcaveError, ValueError):
    """Mass underflows 1e-300 or overflows 1e300."""


class GridCapExceeded(LogConcaveError, ValueError):
    pass


class OffsetNotOnGrid(LogConcaveError, ValueError):
    """A hyperplane offset does not coincide with a grid node."""


class AllInfinite(LogConcaveError, ValueError):
    """A convex function has no finite value (it is not proper)."""


class PlanMismatch(LogConcaveError, ValueError):
    pass


class GridMismatch(LogConcaveError, ValueError):
    pass


class CenterTooCloseToEdge(LogConcaveError, ValueError):
    """A symmetrized profile would spill significant mass off the grid."""


class SubspaceOutsideSupport(LogConcaveError, ValueError):
    pass


class DegenerateMarginal(LogConcaveError, ValueError):
    pass


class SliceOutOfRange(LogConcaveError, ValueError):
    pass


class HypothesisFailed(LogConcaveError):
    """The harmonic-mean hypothesis of the three-function lemma fails.

    ``witness`` holds ``(x, y, lhs, rhs)`` at the worst sampled pair.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotUnconditional(LogConcaveError, ValueError):
    pass


class ParseError(LogConcaveError, ValueError):
    """Malformed grid-function file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class NotConvergedWarning(UserWarning):
    """The Santalo-point optimizer hit its iteration cap."""


class BoundaryArgmaxWarning(UserWarning):
    """The conjugate's maximizer sits on the source-grid boundary too often."""


class SupportWarning(UserWarning):
    """A polar center lies outside the interior of the support."""
