"""Exception types raised across curvspec."""


class CurvSpecError(Exception):
    """Base class for all curvspec errors."""


class InvalidInput(CurvSpecError, ValueError):
    """Arguments outside the documented preconditions."""


class DomainViolation(CurvSpecError, ValueError):
    """A point outside the admissible (lambda, xi) or slope domain."""


class NonConvergence(CurvSpecError, RuntimeError):
    """An iterative routine exhausted its budget before meeting tolerance."""


class NoSolution(CurvSpecError):
    """No root of the time-map equation in the admissible domain.

    ``diagnostic`` carries the signs of (J - target) at the domain ends.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = dict(diagnostic or {})


class MultipleRoots(CurvSpecError):
    """More than one sign change of J - target on the uniqueness scan."""

    def __init__(self, message, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)


class NotASolution(CurvSpecError):
    """The supplied amplitude does not satisfy the time-map equation."""


class GradientBlowup(CurvSpecError, RuntimeError):
    """Euclidean slope exceeded the configured cap."""


class ConstraintViolation(CurvSpecError, RuntimeError):
    """Minkowski slope reached the light-cone bound 1/sqrt(-kappa)."""


class StepUnderflow(CurvSpecError, RuntimeError):
    """The step-size controller stalled."""


class DegenerateZero(CurvSpecError, RuntimeError):
    """u and u' vanish simultaneously: a double zero, impossible for exact solutions."""


class InvariantViolation(CurvSpecError, AssertionError):
    """A structural invariant of a computed object failed."""
