"""Exception hierarchy.

Validation errors reject bad inputs; ComputationFailure subclasses signal
that a numerical procedure could not meet its accuracy/termination contract
(the CLI maps the former to exit code 2 and the latter to exit code 3).
"""


class AttrarithError(Exception):
    pass


# --- input validation ---

class NotPositiveDefinite(AttrarithError):
    pass


class InvalidDiscriminant(AttrarithError):
    pass


class NotAttractor(AttrarithError):
    pass


class DegenerateCharge(AttrarithError):
    pass


class UnsupportedWeight(AttrarithError):
    pass


class NotUpperHalfPlane(AttrarithError):
    pass


class ZeroTwist(AttrarithError):
    pass


class InvalidWeights(AttrarithError):
    pass


class NotUnit(AttrarithError):
    pass


class InvalidIndex(AttrarithError):
    pass


class DegreeTooSmall(AttrarithError):
    pass


class NotCoprime(AttrarithError):
    pass


class OutOfRange(AttrarithError):
    pass


class InvalidStep(AttrarithError):
    pass


class UnsupportedRange(AttrarithError):
    pass


# --- computation failures ---

class ComputationFailure(AttrarithError):
    pass


class PrecisionExhausted(ComputationFailure):
    pass


class RoundingFailed(ComputationFailure):
    pass


class AmbiguousCase(ComputationFailure):
    pass


class StepUnderflow(ComputationFailure):
    pass


class NonConvergence(ComputationFailure):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
