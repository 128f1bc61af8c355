"""Exception hierarchy shared by all modules."""


class DecompError(Exception):
    """Base class for every error raised by symdecomp."""


class ValidationError(DecompError):
    pass


class ObddConditionError(ValidationError):
    """An OBDD layer sequence violates one of the three structural conditions."""

    condition = 0

    def __init__(self, index, reason):
        self.index = index
        self.reason = reason
        super().__init__(f"condition {self.condition} violated at layer {index}: {reason}")


class Condition1Violation(ObddConditionError):
    condition = 1


class Condition2Violation(ObddConditionError):
    condition = 2


class Condition3Violation(ObddConditionError):
    condition = 3


class WidthViolation(ValidationError):
    """A state index does not fit the declared width bound."""


class LengthMismatch(DecompError):
    pass


class IndexOutOfRange(DecompError):
    pass


class ArityMismatch(DecompError):
    pass


class PositionOutOfRange(DecompError):
    pass


class ArityTooLarge(DecompError):
    pass


class CircuitError(ValidationError):
    pass


class DuplicateVariable(CircuitError):
    pass


class MissingVariable(CircuitError):
    pass


class ForwardReference(CircuitError):
    pass


class MultipleOutputs(CircuitError):
    pass


class ResourceLimit(DecompError):
    pass


class InvalidParameters(DecompError):
    pass


class ParseError(DecompError):
    def __init__(self, file, line, reason):
        self.file = file
        self.line = line
        self.reason = reason
        super().__init__(f"{file}:{line}: {reason}")
