"""Exception hierarchy shared by all dtgraph modules."""

from __future__ import annotations


class DtGraphError(Exception):
    """Base class for every error raised by dtgraph."""


class ValidationError(DtGraphError, ValueError):
    """Input violates a documented precondition (empty label, bad parameter...)."""


class DuplicateError(ValidationError):
    """An explicit id or an edge key already exists."""


class IntegrityError(DtGraphError):
    """Referential integrity would be broken (dangling endpoint, bad port)."""


class UnsupportedSizeError(DtGraphError):
    """Graph exceeds the bound of an exact (exponential) routine."""


class TaxonomyError(ValidationError):
    """Taxonomy document is inconsistent."""

    def __init__(self, message: str, entry: str | None = None):
        super().__init__(message)
        self.entry = entry


class UnknownParentError(TaxonomyError):
    pass


class CycleError(TaxonomyError):
    pass


class DuplicateTypeError(TaxonomyError):
    pass


class AliasConflictError(TaxonomyError):
    pass


class UnknownTypeError(TaxonomyError):
    pass


class ParseError(ValidationError):
    """A source file does not match its schema.

    ``index`` is the zero-based record index when the problem is local to
    one record, ``None`` for document-level problems.
    """

    def __init__(self, message: str, *, path: str | None = None, index: int | None = None):
        where = []
        if path:
            where.append(str(path))
        if index is not None:
            where.append(f"record {index}")
        prefix = f"{': '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.path = path
        self.index = index


class ConflictError(ParseError):
    """One name declared with contradictory types inside one source."""


class MiningError(ValidationError):
    """Bad mining parameters or malformed DFS code."""


class PatternOverflowError(MiningError):
    """The number of frequent patterns exceeded the safety cap."""


class TemplateError(IntegrityError):
    """Patterns do not belong to the graph being templatized, or a broken library."""
