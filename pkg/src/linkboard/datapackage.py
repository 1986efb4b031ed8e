"""Frictionless-style data package loading.

A package is a JSON descriptor (``datapackage.json``) plus one CSV file per
entity. The loader types every cell, checks primary keys, extracts the
foreign-key graph, and exposes per-field statistics used everywhere else:
widget domains, agent context, and brush defaults all come from
:func:`field_profile`.

Descriptor subset understood here:
``resources[].{name, path, description, schema.fields[].{name, type,
description, constraints.enum, constraints.minimum/maximum},
schema.primaryKey, schema.foreignKeys[]}``. Unknown keys are ignored with a
warning.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import (
    AmbiguousRelation,
    DanglingForeignKey,
    DuplicatePrimaryKey,
    MissingResource,
    SchemaViolation,
    UnknownEntity,
)

logger = logging.getLogger(__name__)

#: CSV cell spellings that load as null.
NULL_TOKENS = frozenset({"", "NA"})

#: Descriptor keys the loader understands at each level, for unknown-key warnings.
_KNOWN_PACKAGE_KEYS = {"name", "title", "description", "resources"}
_KNOWN_RESOURCE_KEYS = {"name", "path", "title", "description", "schema", "format", "mediatype"}
_KNOWN_FIELD_KEYS = {"name", "type", "description", "constraints"}


class FieldKind(str, Enum):
    QUANTITATIVE = "quantitative"
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    IDENTIFIER = "identifier"


#: Cell value after typing: number, string, or null.
Cell = float | int | str | None


@dataclass(frozen=True)
class FieldSchema:
    """One column of an entity, as declared by the descriptor."""

    name: str
    kind: FieldKind
    description: str | None = None
    declared_range: tuple[float | None, float | None] | None = None
    declared_categories: tuple[str, ...] | None = None
    #: original descriptor type, kept so integers stay integers on output
    storage_type: str = "string"


@dataclass(frozen=True)
class Relationship:
    """A direct foreign key: ``from_entity.from_fields -> to_entity.to_fields``."""

    from_entity: str
    from_fields: tuple[str, ...]
    to_entity: str
    to_fields: tuple[str, ...]

    def endpoints(self) -> frozenset[str]:
        return frozenset({self.from_entity, self.to_entity})

    def other(self, entity: str) -> str:
        if entity == self.from_entity:
            return self.to_entity
        if entity == self.to_entity:
            return self.from_entity
        raise UnknownEntity(f"entity {entity!r} is not an endpoint of {self}")

    def to_dict(self) -> dict:
        return {
            "from_entity": self.from_entity,
            "from_fields": list(self.from_fields),
            "to_entity": self.to_entity,
            "to_fields": list(self.to_fields),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Relationship":
        return cls(
            from_entity=doc["from_entity"],
            from_fields=tuple(doc["from_fields"]),
            to_entity=doc["to_entity"],
            to_fields=tuple(doc["to_fields"]),
        )


@dataclass
class EntityTable:
    """One table of the package with typed rows."""

    name: str
    path: str
    fields: list[FieldSchema]
    primary_key: tuple[str, ...]
    rows: list[tuple[Cell, ...]]
    description: str | None = None

    def __post_init__(self) -> None:
        self._index = {f.name: i for i, f in enumerate(self.fields)}

    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def has_field(self, name: str) -> bool:
        return name in self._index

    def field_schema(self, name: str) -> FieldSchema:
        try:
            return self.fields[self._index[name]]
        except KeyError:
            raise UnknownEntity(f"entity {self.name!r} has no field {name!r}") from None

    def column_index(self, name: str) -> int:
        return self._index[name]

    def column(self, name: str) -> list[Cell]:
        i = self._index[name]
        return [row[i] for row in self.rows]

    def pk_tuple(self, row: tuple[Cell, ...]) -> tuple[Cell, ...]:
        return tuple(row[self._index[k]] for k in self.primary_key)


@dataclass
class Package:
    """A loaded, validated data package. Immutable after load."""

    name: str
    entities: list[EntityTable]
    relations: list[Relationship]

    def __post_init__(self) -> None:
        self._by_name = {e.name: e for e in self.entities}

    def entity(self, name: str) -> EntityTable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownEntity(f"no entity named {name!r}", entity=name) from None

    def has_entity(self, name: str) -> bool:
        return name in self._by_name

    def entity_names(self) -> list[str]:
        return [e.name for e in self.entities]


@dataclass(frozen=True)
class FieldStats:
    """Observed per-field summary over the loaded rows."""

    entity: str
    field: str
    kind: FieldKind
    observed_min: float | None = None
    observed_max: float | None = None
    categories: tuple[tuple[Cell, int], ...] = ()
    null_count: int = 0
    distinct_count: int = 0


def _map_kind(ftype: str, identifier: bool) -> FieldKind:
    if identifier:
        return FieldKind.IDENTIFIER
    if ftype in ("integer", "number"):
        return FieldKind.QUANTITATIVE
    # string, boolean, and anything else fall back to nominal
    return FieldKind.NOMINAL


def _parse_cell(raw: str, schema: FieldSchema, entity: str, row: int) -> Cell:
    if raw in NULL_TOKENS:
        return None
    if schema.kind is FieldKind.QUANTITATIVE or (
        schema.kind is FieldKind.IDENTIFIER and schema.storage_type in ("integer", "number")
    ):
        try:
            value = int(raw) if schema.storage_type == "integer" else float(raw)
        except ValueError:
            raise SchemaViolation(
                f"cell {raw!r} is not a valid {schema.storage_type}",
                entity=entity, row=row, field=schema.name,
            ) from None
        if isinstance(value, float) and not math.isfinite(value):
            raise SchemaViolation(
                f"cell {raw!r} is not finite", entity=entity, row=row, field=schema.name,
            )
        return value
    return raw


def _warn_unknown_keys(doc: dict, known: set[str], where: str) -> None:
    for key in doc:
        if key not in known:
            logger.warning("ignoring unknown descriptor key %r in %s", key, where)


def load_package(descriptor_path: str | Path) -> Package:
    """Load and validate ``datapackage.json`` and its CSV resources.

    Raises :class:`MissingResource`, :class:`SchemaViolation`,
    :class:`DanglingForeignKey`, or :class:`DuplicatePrimaryKey`.
    """
    descriptor_path = Path(descriptor_path)
    if descriptor_path.is_dir():
        descriptor_path = descriptor_path / "datapackage.json"
    if not descriptor_path.exists():
        raise MissingResource(f"descriptor not found: {descriptor_path}")
    with open(descriptor_path, encoding="utf-8") as fh:
        try:
            descriptor = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"descriptor is not valid JSON: {exc}") from exc

    _warn_unknown_keys(descriptor, _KNOWN_PACKAGE_KEYS, "package")
    resources = descriptor.get("resources", [])
    if not resources:
        raise MissingResource("descriptor declares zero resources")

    base = descriptor_path.parent
    entities: list[EntityTable] = []
    fk_docs: list[tuple[str, dict]] = []
    for resource in resources:
        _warn_unknown_keys(resource, _KNOWN_RESOURCE_KEYS, f"resource {resource.get('name')!r}")
        name = resource.get("name")
        path = resource.get("path")
        if not name or not path:
            raise SchemaViolation("every resource needs a name and a path")
        if any(e.name == name for e in entities):
            raise SchemaViolation(f"duplicate entity name {name!r}")
        schema = resource.get("schema", {})
        primary_key = schema.get("primaryKey", [])
        if isinstance(primary_key, str):
            primary_key = [primary_key]
        foreign_keys = schema.get("foreignKeys", [])
        key_fields = set(primary_key)
        for fk in foreign_keys:
            fk_fields = fk.get("fields", [])
            key_fields.update([fk_fields] if isinstance(fk_fields, str) else fk_fields)
            fk_docs.append((name, fk))

        field_schemas: list[FieldSchema] = []
        seen: set[str] = set()
        for fdoc in schema.get("fields", []):
            _warn_unknown_keys(fdoc, _KNOWN_FIELD_KEYS, f"field {fdoc.get('name')!r}")
            fname = fdoc.get("name")
            if not fname:
                raise SchemaViolation(f"unnamed field in resource {name!r}")
            if fname in seen:
                raise SchemaViolation(f"duplicate field {fname!r} in resource {name!r}")
            seen.add(fname)
            ftype = fdoc.get("type", "string")
            constraints = fdoc.get("constraints", {})
            declared_range = None
            if "minimum" in constraints or "maximum" in constraints:
                declared_range = (constraints.get("minimum"), constraints.get("maximum"))
            enum = constraints.get("enum")
            field_schemas.append(
                FieldSchema(
                    name=fname,
                    kind=_map_kind(ftype, fname in key_fields),
                    description=fdoc.get("description"),
                    declared_range=declared_range,
                    declared_categories=tuple(enum) if enum else None,
                    storage_type=ftype,
                )
            )

        csv_path = base / path
        if not csv_path.exists():
            raise MissingResource(f"resource file not found: {csv_path}", entity=name)
        entities.append(
            _load_rows(name, path, csv_path, field_schemas, tuple(primary_key),
                       resource.get("description"))
        )

    package = Package(
        name=descriptor.get("name", descriptor_path.parent.name),
        entities=entities,
        relations=[_resolve_fk(owner, fk, entities) for owner, fk in fk_docs],
    )
    return package


def _load_rows(
    name: str,
    rel_path: str,
    csv_path: Path,
    fields: list[FieldSchema],
    primary_key: tuple[str, ...],
    description: str | None,
) -> EntityTable:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaViolation("resource file has no header row", entity=name) from None
        declared = [f.name for f in fields]
        if header != declared:
            raise SchemaViolation(
                f"CSV header {header} does not match declared fields {declared}", entity=name,
            )
        rows: list[tuple[Cell, ...]] = []
        for row_no, raw in enumerate(reader):
            if len(raw) != len(fields):
                raise SchemaViolation(
                    f"row has {len(raw)} cells, expected {len(fields)}", entity=name, row=row_no,
                )
            rows.append(tuple(
                _parse_cell(raw[i], fields[i], name, row_no) for i in range(len(fields))
            ))

    table = EntityTable(
        name=name, path=rel_path, fields=fields, primary_key=primary_key,
        rows=rows, description=description,
    )
    if primary_key:
        seen: set[tuple[Cell, ...]] = set()
        for row_no, row in enumerate(rows):
            key = table.pk_tuple(row)
            if any(v is None for v in key):
                raise DuplicatePrimaryKey(
                    "primary key contains null", entity=name, row=row_no,
                )
            if key in seen:
                raise DuplicatePrimaryKey(
                    f"primary key {key} repeats", entity=name, row=row_no,
                )
            seen.add(key)
    return table


def _resolve_fk(owner: str, fk: dict, entities: list[EntityTable]) -> Relationship:
    from_fields = fk.get("fields", [])
    if isinstance(from_fields, str):
        from_fields = [from_fields]
    ref = fk.get("reference", {})
    to_entity = ref.get("resource")
    to_fields = ref.get("fields", [])
    if isinstance(to_fields, str):
        to_fields = [to_fields]
    if not from_fields or not to_entity or not to_fields:
        raise DanglingForeignKey(f"incomplete foreignKey on {owner!r}: {fk}")
    if len(from_fields) != len(to_fields):
        raise DanglingForeignKey(
            f"foreignKey on {owner!r} maps {len(from_fields)} fields to {len(to_fields)}",
        )
    by_name = {e.name: e for e in entities}
    if to_entity not in by_name:
        raise DanglingForeignKey(f"foreignKey on {owner!r} references unknown entity {to_entity!r}")
    owner_table = by_name[owner]
    target = by_name[to_entity]
    for f in from_fields:
        if not owner_table.has_field(f):
            raise DanglingForeignKey(f"foreignKey field {owner}.{f} does not exist")
    for f in to_fields:
        if not target.has_field(f):
            raise DanglingForeignKey(f"foreignKey target {to_entity}.{f} does not exist")
        if f not in target.primary_key:
            raise DanglingForeignKey(
                f"foreignKey target {to_entity}.{f} is not part of its primary key",
            )
    return Relationship(
        from_entity=owner,
        from_fields=tuple(from_fields),
        to_entity=to_entity,
        to_fields=tuple(to_fields),
    )


def field_profile(package: Package, entity: str) -> list[FieldStats]:
    """Observed statistics for every non-identifier field of ``entity``."""
    table = package.entity(entity)
    stats: list[FieldStats] = []
    for fs in table.fields:
        if fs.kind is FieldKind.IDENTIFIER:
            continue
        values = table.column(fs.name)
        nulls = sum(1 for v in values if v is None)
        present = [v for v in values if v is not None]
        if fs.kind is FieldKind.QUANTITATIVE:
            stats.append(FieldStats(
                entity=entity, field=fs.name, kind=fs.kind,
                observed_min=min(present) if present else None,
                observed_max=max(present) if present else None,
                null_count=nulls, distinct_count=len(set(present)),
            ))
        else:
            counts = Counter(present)
            stats.append(FieldStats(
                entity=entity, field=fs.name, kind=fs.kind,
                categories=tuple(sorted(counts.items(), key=lambda kv: str(kv[0]))),
                null_count=nulls, distinct_count=len(counts),
            ))
    return stats


def relation_between(package: Package, a: str, b: str) -> Relationship | None:
    """The direct foreign-key relation between two entities, if any.

    Only direct relations are searched; entities linked through an
    intermediate table yield ``None``. Two distinct direct relations raise
    :class:`AmbiguousRelation` rather than guessing.
    """
    package.entity(a)
    package.entity(b)
    if a == b:
        return None
    matches = [r for r in package.relations if r.endpoints() == frozenset({a, b})]
    if not matches:
        return None
    if len(set(matches)) > 1:
        raise AmbiguousRelation(
            f"{len(matches)} distinct relations between {a!r} and {b!r}", a=a, b=b,
        )
    return matches[0]
