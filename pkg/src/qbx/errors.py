"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` (``E_NO_PATH``,
``E_SYNTAX`` ...) so callers and the CLI can dispatch on it without parsing
messages.
"""

from __future__ import annotations


class QbxError(Exception):
    """Base class for all errors raised by qbx."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}")


class ModelError(QbxError):
    """Invalid use of the cube model or a failed oracle precondition."""


class AlgebraError(QbxError):
    """Parse or typecheck failure in an algebra program."""

    def __init__(self, code: str, message: str = "", line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(code, message)


class MappingError(QbxError):
    """QB4OLAP mapping, Turtle, or catalog lookup failure."""


class CompileError(QbxError):
    """SPARQL generation failure."""


class EndpointError(QbxError):
    """Transport or protocol failure talking to a SPARQL endpoint."""

    def __init__(self, code: str, message: str = "", status: int | None = None):
        self.status = status
        super().__init__(code, message)
