"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(WorkbenchError):
    """Matrix or vector dimensions do not conform."""


class SingularMatrix(WorkbenchError):
    """Inversion was requested for a matrix without an inverse."""


class NotADivisor(WorkbenchError):
    """Conductor lift requested into a field that does not contain the source."""


class ProductNotOne(WorkbenchError):
    """Slot matrices (or character values) do not multiply to the identity."""


class LabelMismatch(WorkbenchError):
    """Two tuples with different puncture labels were combined."""


class NotRankOne(WorkbenchError):
    """A rank-1 tuple was required."""


class BadLambda(WorkbenchError):
    """Convolution parameter is 0 or 1."""


class DegenerateQuotient(WorkbenchError):
    """Middle convolution collapsed to a zero-dimensional quotient."""


class NotQuasiUnipotent(WorkbenchError):
    """Eigenvalue search exhausted the root-of-unity bound before accounting
    for the full dimension; the caller may raise the bound."""


class DegenerateDatum(WorkbenchError):
    """A Lie algebra was requested for a degenerate form or trivector."""


class NotInGroup(WorkbenchError):
    """A matrix fails the structure check for the ambient group."""


class NotRankSeven(WorkbenchError):
    """An operation specific to seven-dimensional tuples received another rank."""


class UnknownScenario(WorkbenchError):
    """No scenario is registered under the requested name."""


class ParseError(WorkbenchError):
    """Syntax error in a scalar, tuple, or pipeline document."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
