"""Exception hierarchy.

``ValidationError`` subclasses signal bad user input (CLI exit 1);
``ConsistencyError`` subclasses signal an engine invariant failure (CLI exit 2).
"""


class BraidlegError(Exception):
    pass


class ValidationError(BraidlegError):
    pass


class ConsistencyError(BraidlegError):
    pass


class DimensionError(ValidationError):
    pass


class IncompleteAssignmentError(ValidationError):
    pass


class DivisionDomainError(ValidationError):
    pass


class NegativeExponentError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)
        self.pos = pos


class DegenerateHessianError(ValidationError):
    pass


class SubstitutionWeightError(ConsistencyError):
    pass


class BraidingError(ConsistencyError):
    """Stripped HJ coefficient carries phase letters or the wrong weight."""


class CancellationError(ConsistencyError):
    """Kappa/Theta exponents survived a unit-bookkept computation."""


class TruncationError(ConsistencyError):
    pass


class TermLimitError(ConsistencyError):
    pass
