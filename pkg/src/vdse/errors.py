"""Exception types shared across the package."""
from __future__ import annotations

__all__ = [
    "VdseError",
    "GraphError",
    "DuplicateIdError",
    "DanglingReferenceError",
    "UnknownTypeError",
    "AttributeMisuseError",
    "PackageConflictError",
    "SelfLoopError",
    "IdentifierError",
    "MalformedGraphError",
    "AnalysisError",
    "ParseError",
]


class VdseError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(VdseError):
    """A scenario mutation was rejected; the graph is left unchanged."""


class DuplicateIdError(GraphError):
    """An id is already taken within its namespace."""


class DanglingReferenceError(GraphError):
    """A statement refers to an id that does not exist."""


class UnknownTypeError(GraphError):
    """An entity type, flow edge type, or relation name is not registered."""


class AttributeMisuseError(GraphError):
    """An attribute violates the reserved-name typing rules."""


class PackageConflictError(GraphError):
    """A package id is redeclared with different content."""


class SelfLoopError(GraphError):
    """A flow connects an entity to itself."""


class IdentifierError(GraphError):
    """An id does not match the identifier lexicon."""


class MalformedGraphError(VdseError):
    """A graph handed to a serializer or exporter is not well formed."""


class AnalysisError(VdseError):
    """An analysis query has invalid arguments."""


class ParseError(VdseError):
    """Scenario text is not well formed.

    Carries the 1-based line and column of the offending token together
    with the source line it appeared on.
    """

    def __init__(self, message: str, line: int, column: int, snippet: str = ""):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.snippet = snippet

    def __str__(self) -> str:
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.snippet:
            text += f"\n  {self.snippet}"
        return text
