"""Exception hierarchy shared by all modules."""


class SolverError(Exception):
    pass


class InputError(SolverError, ValueError):
    """Malformed argument: wrong dimension, letter outside the alphabet, ..."""


class PreconditionError(SolverError, ValueError):
    """An operation was called outside its domain (e.g. overlapping registers)."""


class UnsupportedError(SolverError):
    """The input uses a construct outside the supported fragment."""


class NotStraightLine(UnsupportedError):
    """The program is not in single static assignment form."""


class ParseError(SolverError, ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"{msg}{where}")
        self.line = line
        self.col = col


class FunctionalityError(SolverError):
    """A transducer declared functional produced two outputs for one input."""


class ResourceLimit(SolverError):
    """Timeout, product-size cap or disjunct cap exceeded."""


class InternalError(SolverError, AssertionError):
    """A self-check failed; this is a bug, never a user error."""
