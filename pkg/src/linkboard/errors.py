"""Exception taxonomy shared by every linkboard module.

Errors carry a stable machine-readable ``code`` (the class name) plus a
human message; the HTTP facade maps codes onto status codes without
string-matching messages.
"""

from __future__ import annotations

from typing import Any


class LinkboardError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, **locus: Any) -> None:
        super().__init__(message)
        self.message = message
        self.locus = locus

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.locus:
            out["locus"] = self.locus
        return out


# -- data package loading ----------------------------------------------------

class MissingResource(LinkboardError):
    """A descriptor references a resource file that does not exist."""


class SchemaViolation(LinkboardError):
    """A value (CSV cell or structured document) fails its declared schema."""


class DanglingForeignKey(LinkboardError):
    """A foreign key names an unknown entity/field or a non-key target."""


class DuplicatePrimaryKey(LinkboardError):
    """Two rows of one entity share a primary-key tuple."""


class UnknownEntity(LinkboardError):
    """An entity name does not exist in the package."""


class UnknownField(LinkboardError):
    """A field name does not exist on the entity."""


class AmbiguousRelation(LinkboardError):
    """More than one direct foreign key links the requested entity pair."""


# -- grammar parsing ---------------------------------------------------------

class MalformedDocument(LinkboardError):
    """Document is not structurally a visualization spec."""


class UnknownTransformKind(MalformedDocument):
    pass


class UnknownMark(MalformedDocument):
    pass


class UnknownChannel(MalformedDocument):
    pass


class DuplicateAlias(MalformedDocument):
    pass


# -- execution ---------------------------------------------------------------

class UnresolvedSelection(LinkboardError):
    """A filter references a selection name absent from the registry."""


class JoinKeyMismatch(LinkboardError):
    """A join's relationship does not connect the named aliases."""


class EmptyGroupby(LinkboardError):
    """groupby was given zero fields."""


# -- selections --------------------------------------------------------------

class InvalidInterval(LinkboardError):
    """Interval payload with min > max."""


class KindMismatch(LinkboardError):
    """A field's kind is incompatible with the requested operation."""


# -- session -----------------------------------------------------------------

class StaleVersion(LinkboardError):
    """Optimistic-concurrency check failed; client state is outdated."""


class InvalidAction(LinkboardError):
    """Action cannot be applied to the current session state."""


class VersionSkew(LinkboardError):
    """Snapshot document schema is newer than this build understands."""


# -- agents ------------------------------------------------------------------

class BackendTimeout(LinkboardError):
    """Completion backend did not answer within its deadline."""


class ScriptMiss(LinkboardError):
    """Scripted backend has no entry for the submitted message."""


class UnresolvableField(LinkboardError):
    """Agent named an entity/field that is absent from its context."""


class ContextBudgetExceeded(LinkboardError):
    """Serialized agent context exceeds the configured size budget."""
