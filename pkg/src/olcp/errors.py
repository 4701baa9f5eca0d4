"""Exception types shared across the package."""


class OlcpError(Exception):
    """Base class for all package errors."""


class RelationError(OlcpError):
    """A requested order relation is inconsistent with the existing poset."""


class StrategyInvariantError(OlcpError):
    """An adversary strategy broke one of its own structural guarantees.

    This always indicates an implementation bug, never partitioner
    misbehavior, and is therefore fatal.
    """


class IllegalMoveError(OlcpError):
    """A partitioner produced a color that does not keep its class a chain."""


class TranscriptError(OlcpError):
    """A transcript file could not be parsed or fails basic schema checks."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
