"""Selection and filter algebra.

A selection is the unit of linked filtering: a named point (value-tuple set)
or interval (per-field range) choice over one entity's fields. Brushes in
charts and filter widgets are two faces of the same registry entry, so
updating either converges on :func:`update_selection`.

Filters reach charts by injection: every registry selection that applies to
a spec's entity, directly or across one foreign-key hop, is prepended to the
spec's transform chain as a named filter. A chart never filters itself: its
own brush selection is skipped during injection.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, replace
from typing import Any

from .datapackage import Cell, FieldKind, Package, Relationship
from .errors import InvalidInterval, KindMismatch, UnknownEntity, UnknownField
from .grammar import FilterTransform, SelectionDecl, VizSpec

Interval = tuple[float | None, float | None]


@dataclass(frozen=True)
class Selection:
    """A named, live selection; payload shape depends on ``kind``.

    Interval bounds may be ``None`` (open). An interval with every bound
    open matches everything, including nulls; a bounded interval drops
    nulls. Point payloads are exact tuple sets; ``None`` inside a tuple is
    the selectable null category.
    """

    name: str
    kind: str  # point | interval
    entity: str
    fields: tuple[str, ...]
    values: frozenset[tuple[Any, ...]] | None = None
    intervals: tuple[tuple[str, Interval], ...] | None = None
    mode: str = "any"

    def interval_for(self, field: str) -> Interval:
        for f, iv in self.intervals or ():
            if f == field:
                return iv
        raise UnknownField(f"selection {self.name!r} has no interval for {field!r}")

    def matches(self, values: tuple[Cell, ...]) -> bool:
        """Does a row's tuple of this selection's fields satisfy the payload?"""
        if self.kind == "point":
            assert self.values is not None
            return tuple(values) in self.values
        assert self.intervals is not None
        for (_, (lo, hi)), v in zip(self.intervals, values):
            if lo is None and hi is None:
                continue
            if v is None:
                return False
            if lo is not None and v < lo:
                return False
            if hi is not None and v > hi:
                return False
        return True

    def is_neutral(self, package: Package) -> bool:
        """True when the payload cannot exclude any currently loaded row."""
        if self.kind == "interval":
            return all(lo is None and hi is None for _, (lo, hi) in self.intervals or ())
        observed = observed_tuples(package, self.entity, self.fields)
        return observed <= (self.values or frozenset())

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"name": self.name, "kind": self.kind,
                               "entity": self.entity, "fields": list(self.fields),
                               "mode": self.mode}
        if self.kind == "point":
            doc["values"] = sorted([list(t) for t in self.values or ()],
                                   key=lambda t: [(v is None, str(v)) for v in t])
        else:
            doc["intervals"] = {f: [lo, hi] for f, (lo, hi) in self.intervals or ()}
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Selection":
        values = None
        intervals = None
        if doc["kind"] == "point":
            values = frozenset(tuple(t) for t in doc.get("values", []))
        else:
            intervals = tuple((f, (lo, hi)) for f, (lo, hi) in
                              ((f, tuple(iv)) for f, iv in doc["intervals"].items()))
            intervals = tuple((f, iv) for f, iv in sorted(
                intervals, key=lambda p: doc["fields"].index(p[0])))
        return cls(name=doc["name"], kind=doc["kind"], entity=doc["entity"],
                   fields=tuple(doc["fields"]), values=values, intervals=intervals,
                   mode=doc.get("mode", "any"))


class SelectionRegistry(Mapping[str, Selection]):
    """Immutable name -> Selection map; mutations return a new registry."""

    def __init__(self, selections: tuple[Selection, ...] = ()):
        self._by_name = {s.name: s for s in selections}
        if len(self._by_name) != len(selections):
            raise InvalidInterval("duplicate selection names in registry")

    def __getitem__(self, name: str) -> Selection:
        return self._by_name[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._by_name)

    def __len__(self) -> int:
        return len(self._by_name)

    def with_selection(self, sel: Selection) -> "SelectionRegistry":
        out = dict(self._by_name)
        out[sel.name] = sel
        return SelectionRegistry(tuple(out.values()))

    def without(self, name: str) -> "SelectionRegistry":
        return SelectionRegistry(tuple(s for s in self._by_name.values() if s.name != name))

    def sorted_selections(self) -> list[Selection]:
        return [self._by_name[n] for n in sorted(self._by_name)]


# --------------------------------------------------------------------------
# brush derivation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BrushGeometry:
    """Shape of the brush a chart supports."""

    kind: str  # x-interval | y-interval | 2d-interval | point
    fields: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "fields": list(self.fields)}

    @classmethod
    def from_dict(cls, doc: dict) -> "BrushGeometry":
        return cls(kind=doc["kind"], fields=tuple(doc["fields"]))


@dataclass(frozen=True)
class BrushBinding:
    viz_id: str
    selection: str
    geometry: BrushGeometry

    def to_dict(self) -> dict:
        return {"viz_id": self.viz_id, "selection": self.selection,
                "geometry": self.geometry.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict) -> "BrushBinding":
        return cls(viz_id=doc["viz_id"], selection=doc["selection"],
                   geometry=BrushGeometry.from_dict(doc["geometry"]))


def derive_brush(spec: VizSpec, package: Package) -> BrushGeometry | None:
    """Pick the brush a chart gets, from its encodings.

    Only fields that exist in the source data (the primary entity's schema)
    count; transform-derived fields are skipped. Quantitative fields on x
    and y make a 2D interval; on exactly one of them, a 1D interval on that
    axis. Failing that, categorical fields on x, y, or color make a point
    selection over the combination of all of them. Tables get no brush.
    """
    rep = spec.representation
    if rep is None or rep.mark == "row" or not rep.mapping:
        return None
    entity = package.entity(spec.primary_entity)

    def source_kind(field: str) -> FieldKind | None:
        if entity.has_field(field):
            return entity.field_schema(field).kind
        return None

    by_channel = {e.channel: e for e in rep.mapping}
    qx = "x" in by_channel and source_kind(by_channel["x"].field) is FieldKind.QUANTITATIVE
    qy = "y" in by_channel and source_kind(by_channel["y"].field) is FieldKind.QUANTITATIVE
    if qx and qy:
        return BrushGeometry("2d-interval", (by_channel["x"].field, by_channel["y"].field))
    if qx:
        return BrushGeometry("x-interval", (by_channel["x"].field,))
    if qy:
        return BrushGeometry("y-interval", (by_channel["y"].field,))
    fields: list[str] = []
    for channel in ("x", "y", "color"):
        e = by_channel.get(channel)
        if e is None:
            continue
        kind = source_kind(e.field)
        if kind in (FieldKind.NOMINAL, FieldKind.ORDINAL) and e.field not in fields:
            fields.append(e.field)
    if fields:
        return BrushGeometry("point", tuple(fields))
    return None


def observed_tuples(package: Package, entity: str, fields: tuple[str, ...]
                    ) -> frozenset[tuple[Cell, ...]]:
    """Distinct value combinations of ``fields`` over the entity's rows."""
    table = package.entity(entity)
    idx = [table.column_index(f) for f in fields]
    return frozenset(tuple(row[i] for i in idx) for row in table.rows)


def neutral_selection(name: str, geometry: BrushGeometry, package: Package,
                      entity: str) -> Selection:
    """A selection for a fresh brush: matches every row until dragged."""
    if geometry.kind == "point":
        return Selection(name=name, kind="point", entity=entity, fields=geometry.fields,
                         values=observed_tuples(package, entity, geometry.fields))
    return Selection(name=name, kind="interval", entity=entity, fields=geometry.fields,
                     intervals=tuple((f, (None, None)) for f in geometry.fields))


def selection_from_decl(decl: SelectionDecl) -> Selection:
    values = frozenset(decl.values) if decl.values is not None else None
    intervals = (tuple((f, decl.intervals[f]) for f in decl.fields)
                 if decl.intervals is not None else None)
    return Selection(name=decl.name, kind=decl.kind, entity=decl.entity,
                     fields=decl.fields, values=values, intervals=intervals)


# --------------------------------------------------------------------------
# filter injection
# --------------------------------------------------------------------------

def _direct_relation(relations: list[Relationship], a: str, b: str) -> Relationship | None:
    if a == b:
        return None
    matches = {r for r in relations if r.endpoints() == frozenset({a, b})}
    if len(matches) == 1:
        return next(iter(matches))
    return None  # unrelated, or ambiguous: never guess


def inject_filters(spec: VizSpec, registry: SelectionRegistry,
                   relations: list[Relationship]) -> VizSpec:
    """Prepend a named filter for every applicable registry selection.

    Same-entity selections filter directly; selections one foreign-key hop
    away carry the relationship and mode; anything further is skipped. The
    spec's own declared selections (its brush) are never applied to itself.
    Idempotent: previously injected filters are replaced, not stacked.
    """
    own = {sel.name for sel in spec.selections}
    kept = tuple(t for t in spec.transformation
                 if not (isinstance(t, FilterTransform) and t.injected))
    injected: list[FilterTransform] = []
    for sel in registry.sorted_selections():
        if sel.name in own:
            continue
        if sel.entity == spec.primary_entity:
            injected.append(FilterTransform(selection=sel.name, injected=True))
            continue
        rel = _direct_relation(relations, sel.entity, spec.primary_entity)
        if rel is not None:
            injected.append(FilterTransform(selection=sel.name, via=rel,
                                            mode=sel.mode, injected=True))
    return replace(spec, transformation=tuple(injected) + kept)


# --------------------------------------------------------------------------
# registry updates
# --------------------------------------------------------------------------

def update_selection(
    registry: SelectionRegistry,
    package: Package,
    name: str,
    *,
    kind: str | None = None,
    entity: str | None = None,
    fields: tuple[str, ...] | None = None,
    values: frozenset[tuple[Any, ...]] | None = None,
    intervals: tuple[tuple[str, Interval], ...] | None = None,
    mode: str | None = None,
) -> SelectionRegistry:
    """Create or update a named selection, validating against the package.

    Updating an existing name keeps unspecified attributes. Creating a
    fresh name requires kind, entity, and fields. Raises
    :class:`InvalidInterval`, :class:`UnknownField`, or :class:`KindMismatch`.
    """
    current = registry.get(name)
    if current is None:
        if kind is None or entity is None or fields is None:
            raise KindMismatch(f"creating selection {name!r} needs kind, entity, and fields")
        sel = Selection(name=name, kind=kind, entity=entity, fields=tuple(fields),
                        values=values, intervals=intervals, mode=mode or "any")
    else:
        sel = replace(
            current,
            kind=kind if kind is not None else current.kind,
            entity=entity if entity is not None else current.entity,
            fields=tuple(fields) if fields is not None else current.fields,
            values=values if values is not None else
                   (current.values if kind in (None, current.kind) else None),
            intervals=intervals if intervals is not None else
                      (current.intervals if kind in (None, current.kind) else None),
            mode=mode if mode is not None else current.mode,
        )
    _validate_selection_payload(sel, package)
    return registry.with_selection(sel)


def _validate_selection_payload(sel: Selection, package: Package) -> None:
    if not package.has_entity(sel.entity):
        raise UnknownEntity(f"selection {sel.name!r} targets unknown entity {sel.entity!r}")
    table = package.entity(sel.entity)
    for f in sel.fields:
        if not table.has_field(f):
            raise UnknownField(f"selection {sel.name!r}: no field {sel.entity}.{f}")
    kinds = [table.field_schema(f).kind for f in sel.fields]
    if sel.kind == "interval":
        if any(k is not FieldKind.QUANTITATIVE for k in kinds):
            raise KindMismatch(f"selection {sel.name!r}: interval needs quantitative fields")
        if sel.intervals is None:
            raise InvalidInterval(f"selection {sel.name!r}: interval payload missing")
        if tuple(f for f, _ in sel.intervals) != sel.fields:
            raise UnknownField(f"selection {sel.name!r}: intervals must cover its fields in order")
        for f, (lo, hi) in sel.intervals:
            if lo is not None and hi is not None and lo > hi:
                raise InvalidInterval(f"selection {sel.name!r}: {f} interval has min > max")
    elif sel.kind == "point":
        if any(k not in (FieldKind.NOMINAL, FieldKind.ORDINAL) for k in kinds):
            raise KindMismatch(f"selection {sel.name!r}: point needs categorical fields")
        if sel.values is None:
            raise InvalidInterval(f"selection {sel.name!r}: point payload missing")
        for t in sel.values:
            if len(t) != len(sel.fields):
                raise KindMismatch(f"selection {sel.name!r}: value tuple arity mismatch")
    else:
        raise KindMismatch(f"selection {sel.name!r}: unknown kind {sel.kind!r}")


def entity_counts(package: Package, registry: SelectionRegistry) -> dict[str, int]:
    """Per entity, how many records survive every applicable selection."""
    from .dataflow import execute  # local import: dataflow depends on this module
    from .grammar import SourceRef

    counts: dict[str, int] = {}
    for entity in package.entity_names():
        spec = inject_filters(
            VizSpec(source=(SourceRef(alias="t", entity=entity),)),
            registry, package.relations,
        )
        counts[entity] = len(execute(spec, package, registry).rows)
    return counts
