"""Exception types shared across the package."""

from __future__ import annotations


class TsError(Exception):
    """Base class for all package errors."""


class ParseError(TsError, ValueError):
    """Malformed structured text. Carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(f"{where}{message}")


class PreconditionError(TsError, ValueError):
    """An operation was called outside its documented domain."""

    def __init__(self, message: str, reasons: list[str] | None = None):
        self.reasons = list(reasons or [message])
        super().__init__(message)


class MissingPerversityError(TsError, KeyError):
    def __init__(self, stratum_id: str, codim: int | None = None):
        self.stratum_id = stratum_id
        self.codim = codim
        detail = f" (codim {codim})" if codim is not None else ""
        super().__init__(f"no perversity value for stratum {stratum_id!r}{detail}")

    def __str__(self) -> str:
        return self.args[0]


class UnknownStratumError(TsError, LookupError):
    pass
