"""linkboard: natural-language requests to linked, adjustable dashboards.

Load a data package, parse and execute declarative visualization specs,
link charts through named selections, and drive it all from chat via
structured agent output or directly through the HTTP API.
"""

from .datapackage import (
    FieldKind,
    FieldStats,
    Package,
    Relationship,
    field_profile,
    load_package,
    relation_between,
)
from .dataflow import ResultTable, cross_entity_membership, execute
from .grammar import (
    VizSpec,
    default_representation,
    parse_spec,
    serialize_spec,
    validate_spec,
)
from .linking import (
    BrushBinding,
    BrushGeometry,
    Selection,
    SelectionRegistry,
    derive_brush,
    entity_counts,
    inject_filters,
    update_selection,
)
from .session import (
    SessionState,
    derive_viz_widget,
    download,
    restore,
    snapshot,
    snapshot_digest,
)

__version__ = "0.1.0"

__all__ = [
    "BrushBinding",
    "BrushGeometry",
    "FieldKind",
    "FieldStats",
    "Package",
    "Relationship",
    "ResultTable",
    "Selection",
    "SelectionRegistry",
    "SessionState",
    "VizSpec",
    "cross_entity_membership",
    "default_representation",
    "derive_brush",
    "derive_viz_widget",
    "download",
    "entity_counts",
    "execute",
    "field_profile",
    "inject_filters",
    "load_package",
    "parse_spec",
    "relation_between",
    "restore",
    "serialize_spec",
    "snapshot",
    "snapshot_digest",
    "update_selection",
    "validate_spec",
]
