"""Conversational application state.

A session holds the chat entries, the dashboard of specs, the selection
registry, and a monotone version. Every mutation goes through
:meth:`SessionState.apply` with an action; each applied action bumps the
version by exactly one, validates fully before mutating, and returns
JSON-friendly events.

Widgets disclose agent actions and stay adjustable: a widget stores only a
reference (viz id or selection name) and its rendered payload is derived
from the live spec/registry on every read, so widget and brush can never
disagree.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, replace
from typing import Any

from .datapackage import FieldKind, Package, field_profile
from .errors import (
    InvalidAction,
    KindMismatch,
    MalformedDocument,
    StaleVersion,
    UnknownEntity,
    VersionSkew,
)
from .grammar import (
    CdfTransform,
    Encoding,
    FilterTransform,
    GroupbyTransform,
    OrderbyTransform,
    RollupTransform,
    SelectionDecl,
    VizSpec,
    default_representation,
    parse_spec,
    serialize_spec,
    validate_spec,
)
from .linking import (
    BrushBinding,
    Selection,
    SelectionRegistry,
    derive_brush,
    inject_filters,
    neutral_selection,
    observed_tuples,
    selection_from_decl,
    update_selection,
)

SNAPSHOT_SCHEMA_VERSION = 1


# --------------------------------------------------------------------------
# actions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CreateViz:
    spec: dict | VizSpec


@dataclass(frozen=True)
class CreateFilter:
    kind: str
    entity: str
    fields: tuple[str, ...]
    values: tuple[tuple[Any, ...], ...] | None = None
    intervals: dict[str, tuple[float | None, float | None]] | None = None
    name: str | None = None
    mode: str = "any"


@dataclass(frozen=True)
class AdjustFilter:
    name: str
    values: tuple[tuple[Any, ...], ...] | None = None
    intervals: dict[str, tuple[float | None, float | None]] | None = None
    entity: str | None = None
    fields: tuple[str, ...] | None = None


@dataclass(frozen=True)
class AdjustVizField:
    viz_id: str
    channel: str
    field: str


@dataclass(frozen=True)
class Brush:
    viz_id: str
    values: tuple[tuple[Any, ...], ...] | None = None
    intervals: dict[str, tuple[float | None, float | None]] | None = None
    clear: bool = False


@dataclass(frozen=True)
class DismissViz:
    viz_id: str


@dataclass(frozen=True)
class Download:
    entity: str


Action = CreateViz | CreateFilter | AdjustFilter | AdjustVizField | Brush | DismissViz | Download


def action_from_dict(doc: dict) -> Action:
    """Decode a transcript/action document."""
    kind = doc.get("action")
    try:
        if kind == "create_viz":
            return CreateViz(spec=doc["spec"])
        if kind == "create_filter":
            return CreateFilter(
                kind=doc["kind"], entity=doc["entity"], fields=tuple(doc["fields"]),
                values=_values_in(doc.get("values")),
                intervals=_intervals_in(doc.get("intervals")),
                name=doc.get("name"), mode=doc.get("mode", "any"),
            )
        if kind == "adjust_filter":
            return AdjustFilter(
                name=doc["name"], values=_values_in(doc.get("values")),
                intervals=_intervals_in(doc.get("intervals")),
                entity=doc.get("entity"),
                fields=tuple(doc["fields"]) if "fields" in doc else None,
            )
        if kind == "adjust_viz_field":
            return AdjustVizField(viz_id=doc["viz_id"], channel=doc["channel"],
                                  field=doc["field"])
        if kind == "brush":
            return Brush(viz_id=doc["viz_id"], values=_values_in(doc.get("values")),
                         intervals=_intervals_in(doc.get("intervals")),
                         clear=bool(doc.get("clear", False)))
        if kind == "dismiss_viz":
            return DismissViz(viz_id=doc["viz_id"])
        if kind == "download":
            return Download(entity=doc["entity"])
    except KeyError as exc:
        raise InvalidAction(f"action {kind!r} is missing key {exc}") from exc
    raise InvalidAction(f"unknown action kind {kind!r}")


def _values_in(raw: Any) -> tuple[tuple[Any, ...], ...] | None:
    if raw is None:
        return None
    return tuple(tuple(t) for t in raw)


def _intervals_in(raw: Any) -> dict[str, tuple[float | None, float | None]] | None:
    if raw is None:
        return None
    out = {}
    for f, pair in raw.items():
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidAction(f"interval for {f!r} must be [min, max]")
        out[f] = (pair[0], pair[1])
    return out


# --------------------------------------------------------------------------
# state
# --------------------------------------------------------------------------

@dataclass
class Entry:
    kind: str  # user | reply | widget
    text: str | None = None
    widget_id: str | None = None


@dataclass
class Widget:
    id: str
    kind: str  # viz_adjust | filter_adjust
    viz_id: str | None = None
    selection: str | None = None


@dataclass
class DashboardItem:
    viz_id: str
    spec: VizSpec
    binding: BrushBinding | None = None


class SessionState:
    """One user's discovery session over one package."""

    def __init__(self, package: Package, session_id: str = "session"):
        self.id = session_id
        self.package = package
        self.entries: list[Entry] = []
        self.widgets: dict[str, Widget] = {}
        self.dashboard: list[DashboardItem] = []
        self.registry = SelectionRegistry()
        self.version = 0
        self._viz_seq = 0
        self._sel_seq = 0
        self._widget_seq = 0

    # -- conversation (not actions: no version bump) ------------------------

    def append_user(self, text: str) -> None:
        self.entries.append(Entry(kind="user", text=text))

    def append_reply(self, text: str) -> None:
        self.entries.append(Entry(kind="reply", text=text))

    # -- lookups ------------------------------------------------------------

    def item(self, viz_id: str) -> DashboardItem:
        for item in self.dashboard:
            if item.viz_id == viz_id:
                return item
        raise InvalidAction(f"no visualization {viz_id!r}", viz_id=viz_id)

    def _brush_bound(self, selection: str) -> bool:
        return any(i.binding is not None and i.binding.selection == selection
                   for i in self.dashboard)

    def _next_widget(self, kind: str, **ref: str) -> Widget:
        self._widget_seq += 1
        widget = Widget(id=f"widget-{self._widget_seq}", kind=kind, **ref)
        self.widgets[widget.id] = widget
        self.entries.append(Entry(kind="widget", widget_id=widget.id))
        return widget

    def _reinject(self) -> None:
        for item in self.dashboard:
            item.spec = inject_filters(item.spec, self.registry, self.package.relations)

    # -- the action interface ------------------------------------------------

    def apply(self, action: Action, expected_version: int | None = None) -> list[dict]:
        """Validate and apply one action; returns events. Version +1."""
        if expected_version is not None and expected_version != self.version:
            raise StaleVersion(
                f"expected version {expected_version}, state is at {self.version}",
                expected=expected_version, actual=self.version,
            )
        if isinstance(action, CreateViz):
            events = self._create_viz(action)
        elif isinstance(action, CreateFilter):
            events = self._create_filter(action)
        elif isinstance(action, AdjustFilter):
            events = self._adjust_filter(action)
        elif isinstance(action, AdjustVizField):
            events = self._adjust_viz_field(action)
        elif isinstance(action, Brush):
            events = self._brush(action)
        elif isinstance(action, DismissViz):
            events = self._dismiss(action)
        elif isinstance(action, Download):
            data = download(self, action.entity)
            events = [{"kind": "download", "entity": action.entity,
                       "rows": data.count(b"\n") - 1}]
        else:
            raise InvalidAction(f"unknown action {action!r}")
        self.version += 1
        return events

    def _create_viz(self, action: CreateViz) -> list[dict]:
        spec = action.spec if isinstance(action.spec, VizSpec) else parse_spec(action.spec)
        violations = validate_spec(spec, self.package)
        if violations:
            raise InvalidAction(
                "spec failed validation",
                violations=[{"code": v.code, "locus": v.locus, "reason": v.reason}
                            for v in violations],
            )
        spec = default_representation(spec)
        if any(d.brush for d in spec.selections):
            raise InvalidAction("brush selections are system-managed, not declared")
        for decl in spec.selections:
            if decl.name in self.registry:
                raise InvalidAction(f"selection name {decl.name!r} already exists")

        registry = self.registry
        for decl in spec.selections:
            registry = registry.with_selection(selection_from_decl(decl))

        viz_id = f"viz-{self._viz_seq + 1}"
        geometry = derive_brush(spec, self.package)
        binding = None
        if geometry is not None:
            name = f"brush-{viz_id}"
            brush_sel = neutral_selection(name, geometry, self.package, spec.primary_entity)
            registry = registry.with_selection(brush_sel)
            spec = replace(spec, selections=spec.selections + (
                _decl_from_selection(brush_sel, brush=True),))
            binding = BrushBinding(viz_id=viz_id, selection=name, geometry=geometry)

        self._viz_seq += 1
        self.registry = registry
        self.dashboard.append(DashboardItem(viz_id=viz_id, spec=spec, binding=binding))
        self._reinject()
        widget = self._next_widget("viz_adjust", viz_id=viz_id)
        return [{"kind": "viz_created", "viz_id": viz_id},
                {"kind": "widget_created", "widget_id": widget.id}]

    def _create_filter(self, action: CreateFilter) -> list[dict]:
        auto = action.name is None
        name = action.name or f"sel-{self._sel_seq + 1}"
        if name in self.registry:
            raise InvalidAction(f"selection name {name!r} already exists")
        registry = update_selection(
            self.registry, self.package, name,
            kind=action.kind, entity=action.entity, fields=action.fields,
            values=frozenset(action.values) if action.values is not None else None,
            intervals=tuple((f, action.intervals[f]) for f in action.fields)
            if action.intervals is not None else None,
            mode=action.mode,
        )
        if auto:
            self._sel_seq += 1
        self.registry = registry
        self._reinject()
        widget = self._next_widget("filter_adjust", selection=name)
        return [{"kind": "filter_created", "selection": name},
                {"kind": "widget_created", "widget_id": widget.id}]

    def _adjust_filter(self, action: AdjustFilter) -> list[dict]:
        current = self.registry.get(action.name)
        if current is None:
            raise InvalidAction(f"no selection named {action.name!r}")
        retarget = (
            (action.entity is not None and action.entity != current.entity)
            or (action.fields is not None and tuple(action.fields) != current.fields)
        )
        if retarget and self._brush_bound(action.name):
            raise InvalidAction(
                f"{action.name!r} mirrors a chart brush; its target cannot change")

        entity = action.entity or current.entity
        fields = tuple(action.fields) if action.fields is not None else current.fields
        values = frozenset(action.values) if action.values is not None else None
        intervals = (tuple((f, action.intervals[f]) for f in fields)
                     if action.intervals is not None else None)
        if retarget and values is None and intervals is None:
            # retargeting without a payload starts from the full domain
            if current.kind == "point":
                values = observed_tuples(self.package, entity, fields)
            else:
                intervals = tuple((f, (None, None)) for f in fields)

        self.registry = update_selection(
            self.registry, self.package, action.name,
            entity=entity, fields=fields, values=values, intervals=intervals,
        )
        if retarget:
            self._reinject()
        return [{"kind": "selection_updated", "selection": action.name}]

    def _brush(self, action: Brush) -> list[dict]:
        item = self.item(action.viz_id)
        if item.binding is None:
            raise InvalidAction(f"{action.viz_id!r} has no brush", viz_id=action.viz_id)
        name = item.binding.selection
        geometry = item.binding.geometry
        if action.clear:
            sel = neutral_selection(name, geometry, self.package, item.spec.primary_entity)
            self.registry = self.registry.with_selection(sel)
        elif geometry.kind == "point":
            if action.values is None:
                raise InvalidAction("point brush needs value tuples")
            self.registry = update_selection(
                self.registry, self.package, name, values=frozenset(action.values))
        else:
            if action.intervals is None:
                raise InvalidAction("interval brush needs intervals")
            if set(action.intervals) != set(geometry.fields):
                raise InvalidAction(
                    f"brush intervals must cover exactly {list(geometry.fields)}")
            self.registry = update_selection(
                self.registry, self.package, name,
                intervals=tuple((f, action.intervals[f]) for f in geometry.fields))
        events = [{"kind": "selection_updated", "selection": name}]
        if not any(w.kind == "filter_adjust" and w.selection == name
                   for w in self.widgets.values()):
            widget = self._next_widget("filter_adjust", selection=name)
            events.append({"kind": "widget_created", "widget_id": widget.id})
        return events

    def _adjust_viz_field(self, action: AdjustVizField) -> list[dict]:
        item = self.item(action.viz_id)
        rep = item.spec.representation
        if rep is None:
            raise InvalidAction(f"{action.viz_id!r} has no representation")
        target = next((e for e in rep.mapping if e.channel == action.channel), None)
        if target is None:
            raise InvalidAction(f"{action.viz_id!r} has no {action.channel!r} encoding")
        entity = self.package.entity(item.spec.primary_entity)
        if not entity.has_field(target.field):
            raise InvalidAction(
                f"{target.field!r} is derived in the transformation; it has no dropdown")
        if not entity.has_field(action.field):
            raise InvalidAction(f"no field {action.field!r} on {entity.name!r}")
        old_kind = entity.field_schema(target.field).kind
        new_kind = entity.field_schema(action.field).kind
        if new_kind is FieldKind.IDENTIFIER:
            raise KindMismatch(f"{action.field!r} is an identifier")
        if new_kind is not old_kind:
            raise KindMismatch(
                f"{action.field!r} is {new_kind.value}, slot holds {old_kind.value}")

        new_spec = _swap_field(item.spec, action.channel, target.field, action.field)
        violations = validate_spec(new_spec, self.package)
        if violations:
            raise InvalidAction(
                "field swap would break the spec",
                violations=[{"code": v.code, "locus": v.locus, "reason": v.reason}
                            for v in violations],
            )

        registry = self.registry
        binding = item.binding
        if binding is not None:
            bare = replace(new_spec, selections=tuple(
                d for d in new_spec.selections if not d.brush))
            geometry = derive_brush(bare, self.package)
            assert geometry is not None  # same-kind swap preserves brushability
            sel = neutral_selection(binding.selection, geometry, self.package,
                                    new_spec.primary_entity)
            registry = registry.with_selection(sel)
            binding = replace(binding, geometry=geometry)
            new_spec = replace(bare, selections=bare.selections + (
                _decl_from_selection(sel, brush=True),))
            new_spec = inject_filters(new_spec, registry, self.package.relations)

        item.spec = new_spec
        item.binding = binding
        self.registry = registry
        return [{"kind": "viz_updated", "viz_id": action.viz_id,
                 "channel": action.channel, "field": action.field}]

    def _dismiss(self, action: DismissViz) -> list[dict]:
        item = self.item(action.viz_id)
        self.dashboard.remove(item)
        dead_selection = item.binding.selection if item.binding else None
        if dead_selection is not None:
            self.registry = self.registry.without(dead_selection)
        self.widgets = {
            wid: w for wid, w in self.widgets.items()
            if w.viz_id != action.viz_id and (dead_selection is None
                                              or w.selection != dead_selection)
        }
        self._reinject()
        return [{"kind": "viz_dismissed", "viz_id": action.viz_id}]


def _decl_from_selection(sel: Selection, brush: bool) -> SelectionDecl:
    values = None
    intervals = None
    if sel.kind == "point":
        values = tuple(sorted(sel.values or (),
                              key=lambda t: [(v is None, str(v)) for v in t]))
    else:
        intervals = {f: iv for f, iv in sel.intervals or ()}
    return SelectionDecl(name=sel.name, kind=sel.kind, entity=sel.entity,
                         fields=sel.fields, values=values, intervals=intervals,
                         brush=brush)


def _swap_field(spec: VizSpec, channel: str, old: str, new: str) -> VizSpec:
    """Swap an encoded field, following it into transform dimension refs."""
    mapping = tuple(
        replace(e, field=new) if e.channel == channel else e
        for e in spec.representation.mapping  # type: ignore[union-attr]
    )
    still_used = any(e.field == old for e in mapping)
    transforms = spec.transformation
    if not still_used:
        renamed = []
        for t in transforms:
            if isinstance(t, GroupbyTransform) and old in t.fields:
                t = replace(t, fields=tuple(new if f == old else f for f in t.fields))
            elif isinstance(t, CdfTransform) and (t.field == old or old in t.by):
                t = replace(t, field=new if t.field == old else t.field,
                            by=tuple(new if f == old else f for f in t.by))
            elif isinstance(t, RollupTransform) and t.in_field == old:
                t = replace(t, in_field=new)
            elif isinstance(t, OrderbyTransform) and t.field == old:
                t = replace(t, field=new)
            renamed.append(t)
        transforms = tuple(renamed)
    return replace(spec, transformation=transforms,
                   representation=replace(spec.representation, mapping=mapping))


# --------------------------------------------------------------------------
# widget rendering
# --------------------------------------------------------------------------

def derive_viz_widget(spec: VizSpec, package: Package) -> list[dict]:
    """Dropdown slots for a chart: one per encoding of a source-data field.

    Candidates are the same-entity fields of the same kind, identifiers
    excluded. Fields derived in the transformation get no slot.
    """
    if spec.representation is None:
        return []
    entity = package.entity(spec.primary_entity)
    slots = []
    for e in spec.representation.mapping:
        if not entity.has_field(e.field):
            continue
        kind = entity.field_schema(e.field).kind
        if kind is FieldKind.IDENTIFIER:
            continue
        candidates = [f.name for f in entity.fields if f.kind is kind]
        slots.append({"channel": e.channel, "field": e.field, "candidates": candidates})
    return slots


def render_widget(state: SessionState, widget: Widget) -> dict | None:
    """Widget wire form, always derived from the live spec/registry."""
    if widget.kind == "viz_adjust":
        item = next((i for i in state.dashboard if i.viz_id == widget.viz_id), None)
        if item is None:
            return None
        return {"id": widget.id, "kind": "viz_adjust", "viz_id": widget.viz_id,
                "slots": derive_viz_widget(item.spec, state.package)}
    sel = state.registry.get(widget.selection or "")
    if sel is None:
        return None
    domain: dict[str, Any] = {}
    profile = {s.field: s for s in field_profile(state.package, sel.entity)}
    for f in sel.fields:
        stats = profile.get(f)
        if stats is None:
            continue
        if stats.kind is FieldKind.QUANTITATIVE:
            domain[f] = {"min": stats.observed_min, "max": stats.observed_max}
        else:
            categories = [c for c, _ in stats.categories]
            if stats.null_count:
                categories.append(None)  # rendered as "(null)"
            domain[f] = {"categories": categories}
    return {"id": widget.id, "kind": "filter_adjust", "selection": sel.name,
            "entity": sel.entity, "fields": list(sel.fields),
            "selection_kind": sel.kind,
            "payload": _payload_doc(sel), "domain": domain,
            "brush_viz": next((i.viz_id for i in state.dashboard
                               if i.binding and i.binding.selection == sel.name), None)}


def _payload_doc(sel: Selection) -> dict:
    if sel.kind == "point":
        return {"values": sorted([list(t) for t in sel.values or ()],
                                 key=lambda t: [(v is None, str(v)) for v in t])}
    return {"intervals": {f: [lo, hi] for f, (lo, hi) in sel.intervals or ()}}


def filter_chips(state: SessionState) -> list[dict]:
    """One chip per selection currently excluding anything."""
    chips = []
    for sel in state.registry.sorted_selections():
        if sel.is_neutral(state.package):
            continue
        if sel.kind == "point":
            shown = sorted(("(null)" if v is None else str(v))
                           for t in sel.values or () for v in t)
            summary = f"{', '.join(sel.fields)} in [{', '.join(shown)}]"
        else:
            parts = []
            for f, (lo, hi) in sel.intervals or ():
                parts.append(f"{'min' if lo is None else lo} ≤ {f} ≤ "
                             f"{'max' if hi is None else hi}")
            summary = "; ".join(parts)
        chips.append({"selection": sel.name, "entity": sel.entity,
                      "fields": list(sel.fields), "summary": summary})
    return chips


# --------------------------------------------------------------------------
# download / snapshot
# --------------------------------------------------------------------------

def state_document(state: SessionState) -> dict:
    """Full wire form of the session: what a client renders.

    Tables are computed server-side; clients never filter data themselves.
    """
    from .dataflow import execute
    from .linking import entity_counts

    widgets = []
    for entry in state.entries:
        if entry.kind != "widget":
            continue
        widget = state.widgets.get(entry.widget_id or "")
        if widget is None:
            continue  # dismissed chart: its widget entry renders as nothing
        rendered = render_widget(state, widget)
        if rendered is not None:
            widgets.append(rendered)
    dashboard = []
    for item in state.dashboard:
        dashboard.append({
            "viz_id": item.viz_id,
            "spec": serialize_spec(item.spec),
            "binding": item.binding.to_dict() if item.binding else None,
            "table": execute(item.spec, state.package, state.registry).to_dict(),
        })
    return {
        "id": state.id,
        "version": state.version,
        "package": state.package.name,
        "entries": [
            {"kind": e.kind, "text": e.text} if e.kind != "widget"
            else {"kind": "widget", "widget_id": e.widget_id}
            for e in state.entries
        ],
        "widgets": widgets,
        "dashboard": dashboard,
        "counts": entity_counts(state.package, state.registry),
        "chips": filter_chips(state),
    }


def download(state: SessionState, entity: str) -> bytes:
    """CSV of the rows currently surviving the registry, original columns."""
    from .dataflow import execute
    from .grammar import SourceRef

    table = state.package.entity(entity)  # raises UnknownEntity
    spec = inject_filters(VizSpec(source=(SourceRef(alias="t", entity=entity),)),
                          state.registry, state.package.relations)
    result = execute(spec, state.package, state.registry)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.field_names())
    for row in result.rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


def snapshot(state: SessionState) -> dict:
    """Serializable document capturing the whole session."""
    return {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "id": state.id,
        "package": state.package.name,
        "version": state.version,
        "seq": {"viz": state._viz_seq, "sel": state._sel_seq,
                "widget": state._widget_seq},
        "entries": [
            {"kind": e.kind, **({"text": e.text} if e.text is not None else {}),
             **({"widget_id": e.widget_id} if e.widget_id is not None else {})}
            for e in state.entries
        ],
        "widgets": [
            {"id": w.id, "kind": w.kind,
             **({"viz_id": w.viz_id} if w.viz_id else {}),
             **({"selection": w.selection} if w.selection else {})}
            for w in state.widgets.values()
        ],
        "dashboard": [
            {"viz_id": i.viz_id, "spec": serialize_spec(i.spec),
             "binding": i.binding.to_dict() if i.binding else None}
            for i in state.dashboard
        ],
        "registry": [s.to_dict() for s in state.registry.sorted_selections()],
    }


def snapshot_digest(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def restore(document: dict, package: Package) -> SessionState:
    """Rebuild a session from a snapshot; inverse of :func:`snapshot`."""
    if not isinstance(document, dict) or "schema_version" not in document:
        raise MalformedDocument("not a session snapshot")
    if document["schema_version"] > SNAPSHOT_SCHEMA_VERSION:
        raise VersionSkew(
            f"snapshot schema {document['schema_version']} is newer than "
            f"supported {SNAPSHOT_SCHEMA_VERSION}")
    try:
        state = SessionState(package, session_id=document["id"])
        state.version = document["version"]
        state._viz_seq = document["seq"]["viz"]
        state._sel_seq = document["seq"]["sel"]
        state._widget_seq = document["seq"]["widget"]
        state.entries = [Entry(kind=e["kind"], text=e.get("text"),
                               widget_id=e.get("widget_id"))
                         for e in document["entries"]]
        state.widgets = {w["id"]: Widget(id=w["id"], kind=w["kind"],
                                         viz_id=w.get("viz_id"),
                                         selection=w.get("selection"))
                         for w in document["widgets"]}
        state.registry = SelectionRegistry(tuple(
            Selection.from_dict(s) for s in document["registry"]))
        state.dashboard = [
            DashboardItem(
                viz_id=i["viz_id"], spec=parse_spec(i["spec"]),
                binding=BrushBinding.from_dict(i["binding"]) if i["binding"] else None)
            for i in document["dashboard"]
        ]
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"snapshot is missing {exc}") from exc
    if document["package"] != package.name:
        raise MalformedDocument(
            f"snapshot is for package {document['package']!r}, not {package.name!r}")
    return state
