"""Data-aware prompt context for the agents.

The context lists entities and fields with their observed domains so the
agents can ground filters and specs in real values. Identifier fields and
high-cardinality categorical fields (ID-like columns) are excluded to keep
the context inside the request budget. Domains always reflect the full
dataset, not the current filter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..datapackage import Cell, FieldKind, Package, field_profile
from ..errors import ContextBudgetExceeded, UnresolvableField

DEFAULT_CARDINALITY_THRESHOLD = 50
DEFAULT_CONTEXT_BUDGET = 16_000  # characters of serialized context


@dataclass(frozen=True)
class FieldInfo:
    name: str
    kind: FieldKind
    description: str | None
    observed_min: float | None = None
    observed_max: float | None = None
    categories: tuple[Cell, ...] = ()
    has_nulls: bool = False


@dataclass(frozen=True)
class EntityInfo:
    name: str
    description: str | None
    fields: tuple[FieldInfo, ...]


@dataclass(frozen=True)
class AgentContext:
    entities: tuple[EntityInfo, ...]
    cardinality_threshold: int
    budget: int

    def field(self, entity: str, field: str) -> FieldInfo:
        for e in self.entities:
            if e.name != entity:
                continue
            for f in e.fields:
                if f.name == field:
                    return f
            raise UnresolvableField(f"no field {field!r} on {entity!r} in context",
                                    entity=entity, field=field)
        raise UnresolvableField(f"no entity {entity!r} in context", entity=entity)

    def serialize(self) -> str:
        doc = {
            "entities": [
                {
                    "name": e.name,
                    **({"description": e.description} if e.description else {}),
                    "fields": [
                        {
                            "name": f.name,
                            "kind": f.kind.value,
                            **({"description": f.description} if f.description else {}),
                            **({"min": f.observed_min, "max": f.observed_max}
                               if f.kind is FieldKind.QUANTITATIVE else
                               {"values": list(f.categories)}),
                            **({"has_nulls": True} if f.has_nulls else {}),
                        }
                        for f in e.fields
                    ],
                }
                for e in self.entities
            ]
        }
        return json.dumps(doc, indent=1)


def build_context(package: Package,
                  cardinality_threshold: int = DEFAULT_CARDINALITY_THRESHOLD,
                  budget: int = DEFAULT_CONTEXT_BUDGET) -> AgentContext:
    """Assemble the agent context, failing loudly if it exceeds the budget."""
    entities = []
    for table in package.entities:
        fields = []
        profile = {s.field: s for s in field_profile(package, table.name)}
        for fs in table.fields:
            stats = profile.get(fs.name)
            if stats is None:
                continue  # identifier
            if (stats.kind is not FieldKind.QUANTITATIVE
                    and stats.distinct_count > cardinality_threshold):
                continue  # ID-like categorical column
            fields.append(FieldInfo(
                name=fs.name, kind=stats.kind, description=fs.description,
                observed_min=stats.observed_min, observed_max=stats.observed_max,
                categories=tuple(c for c, _ in stats.categories),
                has_nulls=stats.null_count > 0,
            ))
        entities.append(EntityInfo(name=table.name, description=table.description,
                                   fields=tuple(fields)))
    context = AgentContext(entities=tuple(entities),
                           cardinality_threshold=cardinality_threshold, budget=budget)
    size = len(context.serialize())
    if size > budget:
        raise ContextBudgetExceeded(
            f"serialized context is {size} chars, budget is {budget}",
            size=size, budget=budget)
    return context
