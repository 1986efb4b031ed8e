"""The declarative visualization grammar.

A spec is ``source -> transformation -> representation`` plus selection
declarations. ``source`` is the only required block; a spec without a
representation renders as a table. The canonical concrete syntax is JSON;
:func:`parse_spec` is strict (unknown keys, marks, channels, and transform
kinds are rejected) so that the same shape can serve as the structured-output
contract for the agents.

Validation against a loaded package is a separate pass
(:func:`validate_spec`) that returns violations instead of raising, tracking
the column environment through the transform chain exactly as the executor
will see it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Union

from .datapackage import FieldKind, Package, Relationship
from .errors import (
    DuplicateAlias,
    MalformedDocument,
    UnknownChannel,
    UnknownMark,
    UnknownTransformKind,
)

MARKS = ("bar", "point", "line", "row")
CHANNELS = ("x", "y", "color")
ROLLUP_OPS = ("count", "mean", "sum", "min", "max")
PREDICATE_OPS = ("in", "range", "notnull", "isnull")
STACK_MODES = ("none", "stacked", "normalized")

#: categorical kinds are interchangeable for encoding/selection checks
_CATEGORICAL = (FieldKind.NOMINAL, FieldKind.ORDINAL)


@dataclass(frozen=True)
class SourceRef:
    alias: str
    entity: str


@dataclass(frozen=True)
class Predicate:
    field: str
    op: str
    values: tuple[Any, ...] | None = None
    min: float | None = None
    max: float | None = None


@dataclass(frozen=True)
class FilterTransform:
    """Filter by named selection (optionally across one FK hop) or predicate."""

    selection: str | None = None
    predicate: Predicate | None = None
    via: Relationship | None = None
    mode: str = "any"
    injected: bool = False


@dataclass(frozen=True)
class GroupbyTransform:
    fields: tuple[str, ...]


@dataclass(frozen=True)
class RollupTransform:
    out_field: str
    op: str
    in_field: str | None = None


@dataclass(frozen=True)
class CdfTransform:
    field: str
    out_fraction: str
    by: tuple[str, ...] = ()


@dataclass(frozen=True)
class JoinTransform:
    left_alias: str
    right_alias: str
    via: Relationship


@dataclass(frozen=True)
class OrderbyTransform:
    field: str
    direction: str = "asc"


Transform = Union[FilterTransform, GroupbyTransform, RollupTransform,
                  CdfTransform, JoinTransform, OrderbyTransform]


@dataclass(frozen=True)
class Encoding:
    channel: str
    field: str
    field_kind: str
    stack: str | None = None


@dataclass(frozen=True)
class Representation:
    mark: str
    mapping: tuple[Encoding, ...] = ()


@dataclass(frozen=True)
class SelectionDecl:
    """What can be selected in a chart; the name is the linking key."""

    name: str
    kind: str  # point | interval
    entity: str
    fields: tuple[str, ...]
    values: tuple[tuple[Any, ...], ...] | None = None
    intervals: dict[str, tuple[float | None, float | None]] | None = None
    mapping: Relationship | None = None
    brush: bool = False


@dataclass(frozen=True)
class VizSpec:
    source: tuple[SourceRef, ...]
    transformation: tuple[Transform, ...] = ()
    representation: Representation | None = None
    selections: tuple[SelectionDecl, ...] = ()

    @property
    def primary_entity(self) -> str:
        return self.source[0].entity

    def brush_selection(self) -> SelectionDecl | None:
        for sel in self.selections:
            if sel.brush:
                return sel
        return None


@dataclass(frozen=True)
class Violation:
    code: str
    locus: str
    reason: str


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def _require_keys(doc: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise MalformedDocument(f"unknown key(s) {sorted(unknown)} in {where}")
    missing = required - set(doc)
    if missing:
        raise MalformedDocument(f"missing key(s) {sorted(missing)} in {where}")


def _parse_relationship(doc: Any, where: str) -> Relationship:
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{where} must be a relationship object")
    _require_keys(doc, {"from_entity", "from_fields", "to_entity", "to_fields"},
                  {"from_entity", "from_fields", "to_entity", "to_fields"}, where)
    return Relationship.from_dict(doc)


def _parse_predicate(doc: Any, where: str) -> Predicate:
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{where} must be an object")
    _require_keys(doc, {"field", "op", "values", "min", "max"}, {"field", "op"}, where)
    op = doc["op"]
    if op not in PREDICATE_OPS:
        raise MalformedDocument(f"unknown predicate op {op!r} in {where}")
    if op == "in":
        if not isinstance(doc.get("values"), list):
            raise MalformedDocument(f"predicate op 'in' needs a values list in {where}")
        return Predicate(field=doc["field"], op=op, values=tuple(doc["values"]))
    if op == "range":
        if "min" not in doc and "max" not in doc:
            raise MalformedDocument(f"predicate op 'range' needs min and/or max in {where}")
        return Predicate(field=doc["field"], op=op, min=doc.get("min"), max=doc.get("max"))
    return Predicate(field=doc["field"], op=op)


def _parse_transform(doc: Any, index: int) -> Transform:
    where = f"transformation[{index}]"
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{where} must be an object")
    kind = doc.get("kind")
    if kind == "filter":
        _require_keys(doc, {"kind", "selection", "predicate", "via", "mode", "injected"},
                      {"kind"}, where)
        has_sel = "selection" in doc
        has_pred = "predicate" in doc
        if has_sel == has_pred:
            raise MalformedDocument(f"{where}: filter needs exactly one of selection/predicate")
        mode = doc.get("mode", "any")
        if mode not in ("any", "all"):
            raise MalformedDocument(f"{where}: unknown filter mode {mode!r}")
        if has_pred:
            if "via" in doc or "mode" in doc:
                raise MalformedDocument(f"{where}: predicate filters take no via/mode")
            return FilterTransform(predicate=_parse_predicate(doc["predicate"], where))
        via = _parse_relationship(doc["via"], f"{where}.via") if "via" in doc else None
        return FilterTransform(selection=doc["selection"], via=via, mode=mode,
                               injected=bool(doc.get("injected", False)))
    if kind == "groupby":
        _require_keys(doc, {"kind", "fields"}, {"kind", "fields"}, where)
        if not isinstance(doc["fields"], list):
            raise MalformedDocument(f"{where}: groupby fields must be a list")
        return GroupbyTransform(fields=tuple(doc["fields"]))
    if kind == "rollup":
        _require_keys(doc, {"kind", "out_field", "op", "in_field"},
                      {"kind", "out_field", "op"}, where)
        op = doc["op"]
        if op not in ROLLUP_OPS:
            raise MalformedDocument(f"{where}: unknown rollup op {op!r}")
        if op == "count" and "in_field" in doc:
            raise MalformedDocument(f"{where}: rollup count takes no in_field")
        if op != "count" and "in_field" not in doc:
            raise MalformedDocument(f"{where}: rollup {op} needs in_field")
        return RollupTransform(out_field=doc["out_field"], op=op, in_field=doc.get("in_field"))
    if kind == "cdf":
        _require_keys(doc, {"kind", "field", "out_fraction", "by"},
                      {"kind", "field", "out_fraction"}, where)
        by = doc.get("by", [])
        if not isinstance(by, list):
            raise MalformedDocument(f"{where}: cdf by must be a list")
        return CdfTransform(field=doc["field"], out_fraction=doc["out_fraction"], by=tuple(by))
    if kind == "join":
        _require_keys(doc, {"kind", "left_alias", "right_alias", "via"},
                      {"kind", "left_alias", "right_alias", "via"}, where)
        return JoinTransform(left_alias=doc["left_alias"], right_alias=doc["right_alias"],
                             via=_parse_relationship(doc["via"], f"{where}.via"))
    if kind == "orderby":
        _require_keys(doc, {"kind", "field", "direction"}, {"kind", "field"}, where)
        direction = doc.get("direction", "asc")
        if direction not in ("asc", "desc"):
            raise MalformedDocument(f"{where}: unknown direction {direction!r}")
        return OrderbyTransform(field=doc["field"], direction=direction)
    raise UnknownTransformKind(f"{where}: unknown transform kind {kind!r}")


def _parse_representation(doc: Any) -> Representation:
    if not isinstance(doc, dict):
        raise MalformedDocument("representation must be an object")
    _require_keys(doc, {"mark", "mapping"}, {"mark"}, "representation")
    mark = doc["mark"]
    if mark not in MARKS:
        raise UnknownMark(f"unknown mark {mark!r}")
    encodings: list[Encoding] = []
    seen_channels: set[str] = set()
    for i, edoc in enumerate(doc.get("mapping", [])):
        where = f"mapping[{i}]"
        if not isinstance(edoc, dict):
            raise MalformedDocument(f"{where} must be an object")
        _require_keys(edoc, {"channel", "field", "field_kind", "options"},
                      {"channel", "field", "field_kind"}, where)
        channel = edoc["channel"]
        if channel not in CHANNELS:
            raise UnknownChannel(f"{where}: unknown channel {channel!r}")
        if channel in seen_channels:
            raise MalformedDocument(f"{where}: channel {channel!r} appears twice")
        seen_channels.add(channel)
        if edoc["field_kind"] not in ("quantitative", "nominal", "ordinal"):
            raise MalformedDocument(f"{where}: unknown field_kind {edoc['field_kind']!r}")
        stack = None
        options = edoc.get("options", {})
        if options:
            _require_keys(options, {"stack"}, set(), f"{where}.options")
            stack = options.get("stack")
            if stack is not None and stack not in STACK_MODES:
                raise MalformedDocument(f"{where}: unknown stack mode {stack!r}")
        encodings.append(Encoding(channel=channel, field=edoc["field"],
                                  field_kind=edoc["field_kind"], stack=stack))
    rep = Representation(mark=mark, mapping=tuple(encodings))
    if mark == "row" and rep.mapping:
        raise MalformedDocument("row mark takes no encodings")
    if mark != "row" and not any(e.channel in ("x", "y") for e in rep.mapping):
        raise MalformedDocument(f"{mark} mark needs at least one positional encoding")
    return rep


def _parse_selection(doc: Any, index: int) -> SelectionDecl:
    where = f"selections[{index}]"
    if not isinstance(doc, dict):
        raise MalformedDocument(f"{where} must be an object")
    _require_keys(doc, {"name", "kind", "entity", "fields", "values", "intervals",
                        "mapping", "brush"},
                  {"name", "kind", "entity", "fields"}, where)
    kind = doc["kind"]
    if kind not in ("point", "interval"):
        raise MalformedDocument(f"{where}: unknown selection kind {kind!r}")
    fields = doc["fields"]
    if not isinstance(fields, list) or not fields:
        raise MalformedDocument(f"{where}: fields must be a non-empty list")
    values = None
    intervals = None
    if kind == "point":
        if "intervals" in doc:
            raise MalformedDocument(f"{where}: point selections take values, not intervals")
        raw = doc.get("values", [])
        for tup in raw:
            if not isinstance(tup, list) or len(tup) != len(fields):
                raise MalformedDocument(f"{where}: each value tuple must match fields arity")
        values = tuple(tuple(t) for t in raw)
    else:
        if "values" in doc:
            raise MalformedDocument(f"{where}: interval selections take intervals, not values")
        raw = doc.get("intervals", {})
        if set(raw) != set(fields):
            raise MalformedDocument(f"{where}: intervals must cover exactly the fields")
        intervals = {}
        for fname, pair in raw.items():
            if not isinstance(pair, list) or len(pair) != 2:
                raise MalformedDocument(f"{where}: interval for {fname!r} must be [min, max]")
            lo, hi = pair
            if lo is not None and hi is not None and lo > hi:
                raise MalformedDocument(f"{where}: interval for {fname!r} has min > max")
            intervals[fname] = (lo, hi)
    mapping = _parse_relationship(doc["mapping"], f"{where}.mapping") if "mapping" in doc else None
    return SelectionDecl(name=doc["name"], kind=kind, entity=doc["entity"],
                         fields=tuple(fields), values=values, intervals=intervals,
                         mapping=mapping, brush=bool(doc.get("brush", False)))


def parse_spec(document: str | dict) -> VizSpec:
    """Parse the canonical JSON shape into a :class:`VizSpec`.

    Structural invariants are enforced here; package-dependent checks live
    in :func:`validate_spec`. Unknown keys anywhere are rejected.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise MalformedDocument("spec must be a JSON object")
    _require_keys(document, {"source", "transformation", "representation", "selections"},
                  {"source"}, "spec")

    raw_sources = document["source"]
    if not isinstance(raw_sources, list) or not raw_sources:
        raise MalformedDocument("source must be a non-empty list")
    sources: list[SourceRef] = []
    aliases: set[str] = set()
    for i, sdoc in enumerate(raw_sources):
        if not isinstance(sdoc, dict):
            raise MalformedDocument(f"source[{i}] must be an object")
        _require_keys(sdoc, {"alias", "entity"}, {"alias", "entity"}, f"source[{i}]")
        if sdoc["alias"] in aliases:
            raise DuplicateAlias(f"alias {sdoc['alias']!r} appears twice")
        aliases.add(sdoc["alias"])
        sources.append(SourceRef(alias=sdoc["alias"], entity=sdoc["entity"]))

    transforms = tuple(_parse_transform(t, i)
                       for i, t in enumerate(document.get("transformation", [])))
    representation = None
    if document.get("representation") is not None:
        representation = _parse_representation(document["representation"])
    selections = tuple(_parse_selection(s, i)
                       for i, s in enumerate(document.get("selections", [])))
    if sum(1 for s in selections if s.brush) > 1:
        raise MalformedDocument("at most one brush selection per spec")
    names = [s.name for s in selections]
    if len(names) != len(set(names)):
        raise MalformedDocument("selection names must be unique within a spec")
    return VizSpec(source=tuple(sources), transformation=transforms,
                   representation=representation, selections=selections)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def serialize_spec(spec: VizSpec) -> dict:
    """Inverse of :func:`parse_spec`; emits the canonical JSON shape."""
    doc: dict[str, Any] = {
        "source": [{"alias": s.alias, "entity": s.entity} for s in spec.source],
    }
    if spec.transformation:
        doc["transformation"] = [_serialize_transform(t) for t in spec.transformation]
    if spec.representation is not None:
        rep: dict[str, Any] = {"mark": spec.representation.mark}
        if spec.representation.mapping:
            rep["mapping"] = []
            for e in spec.representation.mapping:
                edoc: dict[str, Any] = {"channel": e.channel, "field": e.field,
                                        "field_kind": e.field_kind}
                if e.stack is not None:
                    edoc["options"] = {"stack": e.stack}
                rep["mapping"].append(edoc)
        doc["representation"] = rep
    if spec.selections:
        doc["selections"] = [_serialize_selection(s) for s in spec.selections]
    return doc


def _serialize_transform(t: Transform) -> dict:
    if isinstance(t, FilterTransform):
        if t.predicate is not None:
            pdoc: dict[str, Any] = {"field": t.predicate.field, "op": t.predicate.op}
            if t.predicate.op == "in":
                pdoc["values"] = list(t.predicate.values or ())
            elif t.predicate.op == "range":
                if t.predicate.min is not None:
                    pdoc["min"] = t.predicate.min
                if t.predicate.max is not None:
                    pdoc["max"] = t.predicate.max
            return {"kind": "filter", "predicate": pdoc}
        doc: dict[str, Any] = {"kind": "filter", "selection": t.selection}
        if t.via is not None:
            doc["via"] = t.via.to_dict()
            doc["mode"] = t.mode
        if t.injected:
            doc["injected"] = True
        return doc
    if isinstance(t, GroupbyTransform):
        return {"kind": "groupby", "fields": list(t.fields)}
    if isinstance(t, RollupTransform):
        doc = {"kind": "rollup", "out_field": t.out_field, "op": t.op}
        if t.in_field is not None:
            doc["in_field"] = t.in_field
        return doc
    if isinstance(t, CdfTransform):
        doc = {"kind": "cdf", "field": t.field, "out_fraction": t.out_fraction}
        if t.by:
            doc["by"] = list(t.by)
        return doc
    if isinstance(t, JoinTransform):
        return {"kind": "join", "left_alias": t.left_alias,
                "right_alias": t.right_alias, "via": t.via.to_dict()}
    if isinstance(t, OrderbyTransform):
        return {"kind": "orderby", "field": t.field, "direction": t.direction}
    raise TypeError(f"unknown transform {t!r}")


def _serialize_selection(s: SelectionDecl) -> dict:
    doc: dict[str, Any] = {"name": s.name, "kind": s.kind, "entity": s.entity,
                           "fields": list(s.fields)}
    if s.kind == "point":
        doc["values"] = [list(t) for t in (s.values or ())]
    else:
        doc["intervals"] = {f: [lo, hi] for f, (lo, hi) in (s.intervals or {}).items()}
    if s.mapping is not None:
        doc["mapping"] = s.mapping.to_dict()
    if s.brush:
        doc["brush"] = True
    return doc


# --------------------------------------------------------------------------
# validation against a package
# --------------------------------------------------------------------------

class _Env:
    """Column environment threaded through the transform chain."""

    def __init__(self, columns: dict[str, FieldKind]):
        self.columns = dict(columns)
        # columns rollup may aggregate over; diverges from `columns` after groupby
        self.aggregable = dict(columns)
        self.grouped = False


def _kinds_compatible(declared: str, actual: FieldKind) -> bool:
    if actual is FieldKind.QUANTITATIVE:
        return declared == "quantitative"
    if actual is FieldKind.IDENTIFIER:
        return declared in ("nominal", "ordinal")
    return declared in ("nominal", "ordinal")


def validate_spec(spec: VizSpec, package: Package) -> list[Violation]:
    """Check every entity/field reference and kind against the package.

    Returns an empty list when the spec will execute without reference or
    kind errors; otherwise one violation per problem, each carrying a locus.
    """
    violations: list[Violation] = []
    alias_entities: dict[str, str] = {}
    for i, src in enumerate(spec.source):
        if not package.has_entity(src.entity):
            violations.append(Violation("UnknownEntity", f"source[{i}]",
                                        f"no entity named {src.entity!r}"))
        else:
            alias_entities[src.alias] = src.entity
    if spec.source[0].alias not in alias_entities:
        return violations  # nothing else is checkable without the primary table

    primary = package.entity(alias_entities[spec.source[0].alias])
    env = _Env({f.name: f.kind for f in primary.fields})
    joined = {spec.source[0].alias}

    for i, t in enumerate(spec.transformation):
        where = f"transformation[{i}]"
        if isinstance(t, FilterTransform):
            _validate_filter(t, env, package, where, violations)
        elif isinstance(t, GroupbyTransform):
            if not t.fields:
                violations.append(Violation("EmptyGroupby", where, "groupby on zero fields"))
                continue
            keep: dict[str, FieldKind] = {}
            for f in t.fields:
                if f not in env.columns:
                    violations.append(Violation("UnresolvedField", where,
                                                f"groupby field {f!r} not in scope"))
                else:
                    keep[f] = env.columns[f]
            env.aggregable = dict(env.columns)
            env.columns = keep
            env.grouped = True
        elif isinstance(t, RollupTransform):
            if t.op != "count":
                src_cols = env.aggregable if env.grouped else env.columns
                if t.in_field not in src_cols:
                    violations.append(Violation("UnresolvedField", where,
                                                f"rollup input {t.in_field!r} not in scope"))
                elif src_cols[t.in_field] is not FieldKind.QUANTITATIVE:
                    violations.append(Violation("KindMismatch", where,
                                                f"rollup {t.op} needs a quantitative field"))
            if t.out_field in env.columns:
                violations.append(Violation("DuplicateOutField", where,
                                            f"output {t.out_field!r} already exists"))
            env.columns[t.out_field] = FieldKind.QUANTITATIVE
        elif isinstance(t, CdfTransform):
            if t.field not in env.columns:
                violations.append(Violation("UnresolvedField", where,
                                            f"cdf field {t.field!r} not in scope"))
            elif env.columns[t.field] is not FieldKind.QUANTITATIVE:
                violations.append(Violation("KindMismatch", where,
                                            "cdf only applies to quantitative fields"))
            for f in t.by:
                if f not in env.columns:
                    violations.append(Violation("UnresolvedField", where,
                                                f"cdf partition field {f!r} not in scope"))
            if t.out_fraction in env.columns:
                violations.append(Violation("DuplicateOutField", where,
                                            f"output {t.out_fraction!r} already exists"))
            env.columns[t.out_fraction] = FieldKind.QUANTITATIVE
        elif isinstance(t, JoinTransform):
            if t.left_alias not in joined:
                violations.append(Violation("UnknownAlias", where,
                                            f"left alias {t.left_alias!r} is not in the pipeline"))
            if t.right_alias not in alias_entities:
                violations.append(Violation("UnknownAlias", where,
                                            f"right alias {t.right_alias!r} is not declared"))
                continue
            if t.right_alias in joined:
                violations.append(Violation("UnknownAlias", where,
                                            f"right alias {t.right_alias!r} joined twice"))
                continue
            left_entity = alias_entities.get(t.left_alias)
            right_entity = alias_entities[t.right_alias]
            if left_entity and t.via.endpoints() != frozenset({left_entity, right_entity}):
                violations.append(Violation("JoinMismatch", where,
                                            "via relationship does not connect the aliases"))
            right = package.entity(right_entity)
            for f in right.fields:
                out = f.name if f.name not in env.columns else f"{t.right_alias}_{f.name}"
                env.columns[out] = f.kind
                if not env.grouped:
                    env.aggregable[out] = f.kind
            joined.add(t.right_alias)
        elif isinstance(t, OrderbyTransform):
            if t.field not in env.columns:
                violations.append(Violation("UnresolvedField", where,
                                            f"orderby field {t.field!r} not in scope"))

    if spec.representation is not None:
        for e in spec.representation.mapping:
            where = f"representation.{e.channel}"
            if e.field not in env.columns:
                violations.append(Violation("UnresolvedField", where,
                                            f"encoded field {e.field!r} not in scope"))
            elif not _kinds_compatible(e.field_kind, env.columns[e.field]):
                violations.append(Violation(
                    "KindMismatch", where,
                    f"{e.field!r} is {env.columns[e.field].value}, encoded as {e.field_kind}"))

    for i, sel in enumerate(spec.selections):
        _validate_selection(sel, package, f"selections[{i}]", violations)
    return violations


def _validate_filter(t: FilterTransform, env: _Env, package: Package,
                     where: str, violations: list[Violation]) -> None:
    if t.predicate is not None:
        p = t.predicate
        if p.field not in env.columns:
            violations.append(Violation("UnresolvedField", where,
                                        f"predicate field {p.field!r} not in scope"))
            return
        kind = env.columns[p.field]
        if p.op == "range" and kind is not FieldKind.QUANTITATIVE:
            violations.append(Violation("KindMismatch", where,
                                        "range predicate needs a quantitative field"))
        if p.op == "in" and kind is FieldKind.QUANTITATIVE:
            violations.append(Violation("KindMismatch", where,
                                        "'in' predicate needs a categorical field"))
        return
    # selection-based filters resolve their name at execution time; only the
    # via relationship is checkable here
    if t.via is not None:
        for entity, fields in ((t.via.from_entity, t.via.from_fields),
                               (t.via.to_entity, t.via.to_fields)):
            if not package.has_entity(entity):
                violations.append(Violation("UnknownEntity", where,
                                            f"via names unknown entity {entity!r}"))
                continue
            table = package.entity(entity)
            for f in fields:
                if not table.has_field(f):
                    violations.append(Violation("UnresolvedField", where,
                                                f"via names unknown field {entity}.{f}"))


def _validate_selection(sel: SelectionDecl, package: Package, where: str,
                        violations: list[Violation]) -> None:
    if not package.has_entity(sel.entity):
        violations.append(Violation("UnknownEntity", where,
                                    f"selection on unknown entity {sel.entity!r}"))
        return
    table = package.entity(sel.entity)
    for f in sel.fields:
        if not table.has_field(f):
            violations.append(Violation("UnresolvedField", where,
                                        f"selection field {sel.entity}.{f} does not exist"))
            continue
        kind = table.field_schema(f).kind
        if sel.kind == "interval" and kind is not FieldKind.QUANTITATIVE:
            violations.append(Violation("KindMismatch", where,
                                        f"interval selection on non-quantitative field {f!r}"))
        if sel.kind == "point" and kind not in _CATEGORICAL:
            violations.append(Violation("KindMismatch", where,
                                        f"point selection on non-categorical field {f!r}"))


def default_representation(spec: VizSpec) -> VizSpec:
    """Attach the tabular default when a spec has no representation."""
    if spec.representation is not None:
        return spec
    return replace(spec, representation=Representation(mark="row"))
