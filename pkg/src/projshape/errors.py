"""Exception hierarchy shared by all modules."""


class ProjShapeError(Exception):
    """Base class for domain errors raised by projshape."""


class ParseError(ProjShapeError, ValueError):
    pass


class InvariantViolation(ProjShapeError, ValueError):
    pass


class ZeroVector(InvariantViolation):
    pass


class DimensionMismatch(ProjShapeError, ValueError):
    pass


class InvalidSubspaceNumbers(ProjShapeError, ValueError):
    pass


class InstanceTooLarge(ProjShapeError):
    pass


class Cancelled(ProjShapeError):
    """Raised when a caller-supplied cancellation check returns True."""


class NotHausdorffInput(ProjShapeError, ValueError):
    pass


class SingularBase(ProjShapeError, ValueError):
    pass


class NotAFrame(ProjShapeError, ValueError):
    pass


class PseudoFrameAbsent(ProjShapeError, ValueError):
    pass


class NotFree(ProjShapeError, ValueError):
    pass


class RankDeficient(ProjShapeError, ValueError):
    pass


class NotStandardized(ProjShapeError, ValueError):
    pass


class NotStandardizable(ProjShapeError):
    """The Tyler iteration hit ``max_iter`` without reaching the tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ZeroRow(NotStandardizable):
    pass


class NotSplittable(ProjShapeError, ValueError):
    pass


class InvalidBlockPair(ProjShapeError, ValueError):
    pass


class InfeasibleConstraint(ProjShapeError, ValueError):
    pass


def check_cancel(cancel):
    if cancel is not None and cancel():
        raise Cancelled("operation cancelled by caller")
