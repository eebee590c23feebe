"""Exception hierarchy.

Two families matter to the command line: malformed input (exit 2) and
well-formed input that violates a mathematical precondition (exit 3).
"""


class GmdetError(Exception):
    """Base class for every error raised by this package."""


class InputError(GmdetError):
    """Malformed document or expression, with an optional position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class PreconditionError(GmdetError):
    """Input is well formed but outside the domain of the algorithms."""


class ZeroArgument(PreconditionError):
    pass


class UncoveredPole(PreconditionError):
    pass


class StructureError(PreconditionError):
    """Violated structural invariant of a connection datum."""


class NotVertical(PreconditionError):
    pass


class AllLogarithmic(PreconditionError):
    pass


class DeligneFailure(PreconditionError):
    pass


class SingularGauge(PreconditionError):
    pass


class PointAtInfinity(PreconditionError):
    pass


class BadSection(PreconditionError):
    pass


class ReductionFailed(PreconditionError):
    pass


class SingularLeadingMatrix(PreconditionError):
    pass


class ConstraintViolated(PreconditionError):
    pass


class GenerationFailed(GmdetError):
    pass
