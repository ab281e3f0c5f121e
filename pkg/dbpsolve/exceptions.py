"""Exceptions raised by the dbpsolve library.

Library code raises these and never exits; the `cli` package maps them
to process exit codes."""


class DbpError(Exception):
    pass


class ValidationError(DbpError):
    """Instance (or polytope) fails a load-time check."""


class EmptySetError(ValidationError):
    pass


class UnboundedSetError(ValidationError):
    pass


class RankDeficientError(ValidationError):
    pass


class NonIntegerInstanceError(ValidationError):
    pass


class MalformedProblemError(DbpError):
    pass


class SingularMatrixError(DbpError):
    pass


class SingularBasisError(DbpError):
    pass


class ZeroPivotError(DbpError):
    pass


class PivotBudgetExceeded(DbpError):
    pass


class PatternViolationError(DbpError):
    pass


class PreconditionViolatedError(DbpError):
    pass


class VerificationFailedError(DbpError):
    """A constructed certificate does not satisfy its system.

    :param message: human readable reason
    :param data: raw values dumped for the discrepancy log"""

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data or {}


class InternalInconsistencyError(DbpError):
    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data or {}


class RecoveryFailedError(DbpError):
    pass


class GroupTooSmallError(DbpError):
    pass


class InstanceParseError(DbpError):
    """Input file could not be parsed.

    `lineno` and `colno` point at the offending position when known."""

    def __init__(self, message, lineno=None, colno=None):
        if lineno is not None:
            message = f"{message} (line {lineno}, column {colno})"
        super().__init__(message)
        self.lineno = lineno
        self.colno = colno
