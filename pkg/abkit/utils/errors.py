class AbkitError(Exception):
    """Base class for every error raised by abkit computations."""


class ScalarRingMismatchError(AbkitError, ValueError):
    pass


class ArityMismatchError(AbkitError, ValueError):
    pass


class NonUnitError(AbkitError, ValueError):
    pass


class TruncationMismatchError(AbkitError, ValueError):
    pass


class TruncationInsufficientError(AbkitError):
    """The requested truncation is too small to decide the question."""


class NonFlatFamilyError(TruncationInsufficientError):
    """Unit-pivot elimination over the parameter ring left nilpotent residue rows."""


class SingularChangeOfBasisError(AbkitError):
    pass


class NotCriticalPointError(AbkitError, ValueError):
    pass


class NonIsolatedSingularityError(AbkitError):
    def __init__(self, message: str = "non-isolated singularity"):
        if "non-isolated singularity" not in message:
            message = f"non-isolated singularity: {message}"
        super().__init__(message)


class ExpressionParseError(AbkitError, ValueError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        self.line = text.count("\n", 0, position) + 1
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


class UnknownVariableError(ExpressionParseError):
    pass
