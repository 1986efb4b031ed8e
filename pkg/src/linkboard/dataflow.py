"""Execute a validated spec against a package under live selections.

The executor is a straight interpreter: transforms apply in order over an
in-memory working table. Provenance (the source primary key per row) rides
along until an aggregation destroys row identity; it is what row-mark
tables and cross-entity membership use to identify records.

Scale expectations are modest (metadata tables, tens of thousands of rows);
every execution recomputes from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .datapackage import Cell, FieldKind, Package, Relationship
from .errors import EmptyGroupby, JoinKeyMismatch, UnresolvedSelection
from .grammar import (
    CdfTransform,
    FilterTransform,
    GroupbyTransform,
    JoinTransform,
    OrderbyTransform,
    Predicate,
    RollupTransform,
    VizSpec,
)
from .linking import Selection, SelectionRegistry


@dataclass
class ResultTable:
    """Columns, typed rows, and (when rows are source records) provenance."""

    columns: list[tuple[str, FieldKind]]
    rows: list[tuple[Cell, ...]]
    provenance: list[tuple[Cell, ...]] | None = None

    def column_names(self) -> list[str]:
        return [name for name, _ in self.columns]

    def to_dict(self) -> dict:
        return {
            "columns": [{"name": n, "kind": k.value} for n, k in self.columns],
            "rows": [list(r) for r in self.rows],
            "provenance": [list(p) for p in self.provenance]
            if self.provenance is not None else None,
        }


class _Working:
    """Mutable pipeline state while transforms apply."""

    def __init__(self, columns: list[tuple[str, FieldKind]],
                 rows: list[list[Cell]], provenance: list[tuple[Cell, ...]] | None):
        self.columns = columns
        self.rows = rows
        self.provenance = provenance
        # set while a groupby/rollup block is active
        self.group_source_columns: list[tuple[str, FieldKind]] | None = None
        self.group_members: list[list[list[Cell]]] | None = None

    def index(self, field: str) -> int:
        for i, (name, _) in enumerate(self.columns):
            if name == field:
                return i
        raise UnresolvedSelection(f"field {field!r} is not in the working table")

    def keep(self, mask: list[bool]) -> None:
        self.rows = [r for r, m in zip(self.rows, mask) if m]
        if self.provenance is not None:
            self.provenance = [p for p, m in zip(self.provenance, mask) if m]
        if self.group_members is not None:
            self.group_members = [g for g, m in zip(self.group_members, mask) if m]


def execute(spec: VizSpec, package: Package, registry: SelectionRegistry) -> ResultTable:
    """Run the spec's transform chain and return the rendered table."""
    primary = package.entity(spec.primary_entity)
    alias_entities = {s.alias: s.entity for s in spec.source}
    work = _Working(
        columns=[(f.name, f.kind) for f in primary.fields],
        rows=[list(r) for r in primary.rows],
        provenance=[primary.pk_tuple(r) for r in primary.rows] if primary.primary_key else None,
    )

    for t in spec.transformation:
        if isinstance(t, FilterTransform):
            _apply_filter(work, t, spec, package, registry)
        elif isinstance(t, GroupbyTransform):
            _apply_groupby(work, t)
        elif isinstance(t, RollupTransform):
            _apply_rollup(work, t)
        elif isinstance(t, CdfTransform):
            _apply_cdf(work, t)
        elif isinstance(t, JoinTransform):
            _apply_join(work, t, alias_entities, package)
        elif isinstance(t, OrderbyTransform):
            _apply_orderby(work, t)
        else:
            raise TypeError(f"unknown transform {t!r}")

    return ResultTable(columns=work.columns, rows=[tuple(r) for r in work.rows],
                       provenance=work.provenance)


# --------------------------------------------------------------------------
# filters
# --------------------------------------------------------------------------

def _apply_filter(work: _Working, t: FilterTransform, spec: VizSpec,
                  package: Package, registry: SelectionRegistry) -> None:
    if t.predicate is not None:
        _apply_predicate(work, t.predicate)
        return
    sel = registry.get(t.selection or "")
    if sel is None:
        raise UnresolvedSelection(f"no selection named {t.selection!r} in the registry",
                                  selection=t.selection)
    if t.via is None:
        idx = [work.index(f) for f in sel.fields]
        work.keep([sel.matches(tuple(row[i] for i in idx)) for row in work.rows])
        return

    # cross-entity: reduce the selection to keys of this spec's entity
    here = spec.primary_entity
    if here not in t.via.endpoints() or sel.entity != t.via.other(here):
        raise JoinKeyMismatch(
            f"filter via {t.via} does not connect {sel.entity!r} to {here!r}")
    selected = _selected_keys(sel, package)
    allowed = cross_entity_membership(package, t.via, t.mode, sel.entity, selected)
    if here == t.via.from_entity:
        if work.provenance is None:
            raise JoinKeyMismatch("cross-entity filter needs a row-level table")
        work.keep([p in allowed for p in work.provenance])
    else:
        idx = [work.index(f) for f in t.via.to_fields]
        work.keep([tuple(row[i] for i in idx) in allowed for row in work.rows])


def _selected_keys(sel: Selection, package: Package) -> set[tuple[Cell, ...]]:
    """Primary keys of the selection's entity whose rows satisfy the payload."""
    table = package.entity(sel.entity)
    idx = [table.column_index(f) for f in sel.fields]
    return {
        table.pk_tuple(row)
        for row in table.rows
        if sel.matches(tuple(row[i] for i in idx))
    }


def cross_entity_membership(package: Package, relationship: Relationship,
                            mode: str, selected_entity: str,
                            selected_keys: set[tuple[Cell, ...]]) -> set[tuple[Cell, ...]]:
    """Map selected primary keys of one endpoint to surviving keys of the other.

    ``any`` keeps records with at least one related selected record; ``all``
    keeps records whose every related record is selected. Records with zero
    related records are kept under ``all`` (vacuously) and dropped under
    ``any``. Survivors on the FK-holding side are primary-key tuples; on the
    referenced side they are link-key (referenced fields) tuples.
    """
    holder = package.entity(relationship.from_entity)
    fk_idx = [holder.column_index(f) for f in relationship.from_fields]

    if selected_entity == relationship.to_entity:
        # selection lives on the referenced side; survivors are FK holders
        target = package.entity(relationship.to_entity)
        link_idx = [target.column_index(f) for f in relationship.to_fields]
        by_link: dict[tuple[Cell, ...], list[tuple[Cell, ...]]] = {}
        for row in target.rows:
            by_link.setdefault(tuple(row[i] for i in link_idx), []).append(
                target.pk_tuple(row))
        out: set[tuple[Cell, ...]] = set()
        for row in holder.rows:
            fk = tuple(row[i] for i in fk_idx)
            related = [] if any(v is None for v in fk) else by_link.get(fk, [])
            if _mode_keeps(mode, related, selected_keys):
                out.add(holder.pk_tuple(row))
        return out

    if selected_entity == relationship.from_entity:
        # selection lives on the FK holders; survivors are referenced rows
        target = package.entity(relationship.to_entity)
        key_idx = [target.column_index(f) for f in relationship.to_fields]
        related_by_key: dict[tuple[Cell, ...], list[tuple[Cell, ...]]] = {}
        for row in holder.rows:
            fk = tuple(row[i] for i in fk_idx)
            if any(v is None for v in fk):
                continue
            related_by_key.setdefault(fk, []).append(holder.pk_tuple(row))
        out = set()
        for row in target.rows:
            key = tuple(row[i] for i in key_idx)
            if _mode_keeps(mode, related_by_key.get(key, []), selected_keys):
                out.add(key)
        return out

    raise JoinKeyMismatch(
        f"entity {selected_entity!r} is not an endpoint of {relationship}")


def _mode_keeps(mode: str, related: list[tuple[Cell, ...]],
                selected: set[tuple[Cell, ...]]) -> bool:
    if mode == "any":
        return any(k in selected for k in related)
    return all(k in selected for k in related)


def _apply_predicate(work: _Working, p: Predicate) -> None:
    i = work.index(p.field)

    def keep(v: Cell) -> bool:
        if p.op == "notnull":
            return v is not None
        if p.op == "isnull":
            return v is None
        if p.op == "in":
            return v is not None and v in (p.values or ())
        if v is None:
            return False
        if p.min is not None and v < p.min:
            return False
        if p.max is not None and v > p.max:
            return False
        return True

    work.keep([keep(row[i]) for row in work.rows])


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------

def _group_sort_key(key: tuple[Cell, ...]) -> tuple:
    return tuple((v is None, str(v)) for v in key)


def _apply_groupby(work: _Working, t: GroupbyTransform) -> None:
    if not t.fields:
        raise EmptyGroupby("groupby needs at least one field")
    idx = [work.index(f) for f in t.fields]
    kinds = [work.columns[i][1] for i in idx]
    groups: dict[tuple[Cell, ...], list[list[Cell]]] = {}
    for row in work.rows:
        groups.setdefault(tuple(row[i] for i in idx), []).append(row)
    ordered = sorted(groups.items(), key=lambda kv: _group_sort_key(kv[0]))
    work.group_source_columns = work.columns
    work.columns = list(zip(t.fields, kinds))
    work.rows = [list(key) for key, _ in ordered]
    work.group_members = [members for _, members in ordered]
    work.provenance = None


def _apply_rollup(work: _Working, t: RollupTransform) -> None:
    if work.group_members is None:
        # whole-table rollup: one implicit group of everything
        work.group_source_columns = work.columns
        work.group_members = [work.rows]
        work.columns = []
        work.rows = [[]]
        work.provenance = None
    assert work.group_source_columns is not None
    if t.op == "count":
        aggregates: list[float | None] = [len(g) for g in work.group_members]
    else:
        src = [name for name, _ in work.group_source_columns].index(t.in_field)
        aggregates = []
        for members in work.group_members:
            present = [row[src] for row in members if row[src] is not None]
            aggregates.append(_aggregate(t.op, present))
    # groups with an undefined aggregate (no non-null inputs) drop out so
    # rollup outputs stay non-null numbers
    mask = [a is not None for a in aggregates]
    work.columns = work.columns + [(t.out_field, FieldKind.QUANTITATIVE)]
    work.rows = [row + [a] for row, a, m in zip(work.rows, aggregates, mask) if m]
    work.group_members = [g for g, m in zip(work.group_members, mask) if m]


def _aggregate(op: str, present: list[Any]) -> float | None:
    if op == "sum":
        return sum(present) if present else 0
    if not present:
        return None
    if op == "mean":
        return sum(present) / len(present)
    if op == "min":
        return min(present)
    return max(present)


def _apply_cdf(work: _Working, t: CdfTransform) -> None:
    vi = work.index(t.field)
    part_idx = [work.index(f) for f in t.by]
    with_prov = work.provenance is not None
    keyed: dict[tuple, list[tuple[list[Cell], tuple[Cell, ...] | None]]] = {}
    for n, row in enumerate(work.rows):
        if row[vi] is None:
            continue
        key = tuple(row[i] for i in part_idx)
        keyed.setdefault(key, []).append((row, work.provenance[n] if with_prov else None))

    rows: list[list[Cell]] = []
    provenance: list[tuple[Cell, ...]] = []
    for key in sorted(keyed, key=_group_sort_key):
        members = sorted(keyed[key], key=lambda pair: pair[0][vi])
        n = len(members)
        for rank, (row, prov) in enumerate(members, start=1):
            rows.append(row + [rank / n])
            if with_prov:
                provenance.append(prov)  # type: ignore[arg-type]
    work.columns = work.columns + [(t.out_fraction, FieldKind.QUANTITATIVE)]
    work.rows = rows
    work.provenance = provenance if with_prov else None
    work.group_members = None


# --------------------------------------------------------------------------
# join / order
# --------------------------------------------------------------------------

def _apply_join(work: _Working, t: JoinTransform,
                alias_entities: dict[str, str], package: Package) -> None:
    if t.right_alias not in alias_entities:
        raise JoinKeyMismatch(f"alias {t.right_alias!r} is not declared in source")
    left_entity = alias_entities.get(t.left_alias)
    right_entity = alias_entities[t.right_alias]
    if t.via.endpoints() != frozenset({left_entity, right_entity}):
        raise JoinKeyMismatch(f"via {t.via} does not connect "
                              f"{left_entity!r} and {right_entity!r}")
    right = package.entity(right_entity)

    if left_entity == t.via.from_entity:
        left_key_fields, right_key_fields = t.via.from_fields, t.via.to_fields
    else:
        left_key_fields, right_key_fields = t.via.to_fields, t.via.from_fields
    left_idx = [work.index(f) for f in left_key_fields]
    right_idx = [right.column_index(f) for f in right_key_fields]

    by_key: dict[tuple[Cell, ...], list[tuple[Cell, ...]]] = {}
    for row in right.rows:
        key = tuple(row[i] for i in right_idx)
        if any(v is None for v in key):
            continue
        by_key.setdefault(key, []).append(row)

    existing = {name for name, _ in work.columns}
    right_columns = [(f.name if f.name not in existing else f"{t.right_alias}_{f.name}", f.kind)
                     for f in right.fields]

    rows: list[list[Cell]] = []
    provenance: list[tuple[Cell, ...]] = []
    with_prov = work.provenance is not None
    for n, row in enumerate(work.rows):
        key = tuple(row[i] for i in left_idx)
        if any(v is None for v in key):
            continue
        for match in by_key.get(key, []):
            rows.append(row + list(match))
            if with_prov:
                provenance.append(work.provenance[n])
    work.columns = work.columns + right_columns
    work.rows = rows
    work.provenance = provenance if with_prov else None
    work.group_members = None


def _apply_orderby(work: _Working, t: OrderbyTransform) -> None:
    i = work.index(t.field)
    order = list(range(len(work.rows)))
    if work.provenance is not None:
        order.sort(key=lambda n: _group_sort_key(work.provenance[n]))
    nonnull = [n for n in order if work.rows[n][i] is not None]
    nulls = [n for n in order if work.rows[n][i] is None]
    nonnull.sort(key=lambda n: work.rows[n][i], reverse=(t.direction == "desc"))
    final = nonnull + nulls
    work.rows = [work.rows[n] for n in final]
    if work.provenance is not None:
        work.provenance = [work.provenance[n] for n in final]
    if work.group_members is not None:
        work.group_members = [work.group_members[n] for n in final]
