"""Multi-agent message handling: orchestrate, then filter and/or visualize.

Every stage demands structured output against a published JSON Schema. A
response that fails validation earns exactly one re-prompt; a second
failure surfaces as :class:`SchemaViolation` with the raw traces attached,
and the dashboard is left untouched. Nothing leaves this module without
passing its schema, the grammar parser, and package validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import jsonschema

from ..datapackage import FieldKind, Package
from ..errors import MalformedDocument, SchemaViolation, UnresolvableField
from ..grammar import VizSpec, parse_spec, validate_spec
from .backends import CompletionBackend
from .context import AgentContext


def _load_schema(name: str) -> dict:
    text = resources.files("linkboard.schemas").joinpath(name).read_text("utf-8")
    return json.loads(text)


def _load_prompt(name: str) -> str:
    return resources.files("linkboard.prompts").joinpath(name).read_text("utf-8")


ROUTE_SCHEMA = _load_schema("route.schema.json")
FILTER_COMMANDS_SCHEMA = _load_schema("filter_commands.schema.json")
VIZSPEC_SCHEMA = _load_schema("vizspec.schema.json")


@dataclass(frozen=True)
class Route:
    wants_filter: bool
    wants_viz: bool
    reply: str | None = None


@dataclass(frozen=True)
class FilterCommand:
    entity: str
    field: str
    kind: str  # interval | point
    min: float | None = None
    max: float | None = None
    values: tuple[Any, ...] | None = None


@dataclass
class AgentOutput:
    route: Route
    filter_commands: list[FilterCommand] = field(default_factory=list)
    viz_spec: dict | None = None
    traces: list[dict] = field(default_factory=list)


def _ask(backend: CompletionBackend, message: str, prompt: str, schema: dict,
         traces: list[dict], check=None) -> Any:
    """One structured call with a single re-prompt on invalid output."""
    attempt_prompt = prompt
    last_error: Exception | None = None
    for attempt in range(2):
        raw = backend.complete_structured(attempt_prompt, schema, key=message)
        traces.append({"stage": schema.get("title"), "attempt": attempt, "output": raw})
        try:
            jsonschema.validate(raw, schema)
            if check is not None:
                check(raw)
            return raw
        except (jsonschema.ValidationError, MalformedDocument,
                SchemaViolation, UnresolvableField) as exc:
            last_error = exc
            attempt_prompt = (
                f"{prompt}\n\nThe previous response was invalid: {exc}. "
                "Respond again, following the schema exactly."
            )
    raise SchemaViolation(
        f"backend output failed {schema.get('title')!r} validation after one retry: "
        f"{last_error}", traces=traces)


def orchestrate(message: str, context: AgentContext,
                backend: CompletionBackend,
                traces: list[dict] | None = None) -> Route:
    """Decide whether the message needs filters, a visualization, or neither."""
    prompt = _load_prompt("orchestrator.txt").format(
        context=context.serialize(), message=message)
    raw = _ask(backend, message, prompt, ROUTE_SCHEMA,
               traces if traces is not None else [])
    return Route(wants_filter=raw["wants_filter"], wants_viz=raw["wants_viz"],
                 reply=raw.get("reply"))


def run_filter_agent(message: str, context: AgentContext,
                     backend: CompletionBackend,
                     traces: list[dict] | None = None) -> list[FilterCommand]:
    """Produce validated filter commands, snapping one-sided intervals.

    A missing interval bound snaps to the field's observed extreme, so
    "adults" can become [18, observed max] the way a user expects.
    """
    prompt = _load_prompt("filter.txt").format(
        context=context.serialize(), message=message)

    def check(raw: list[dict]) -> None:
        for cmd in raw:
            info = context.field(cmd["entity"], cmd["field"])
            if cmd["kind"] == "interval" and info.kind is not FieldKind.QUANTITATIVE:
                raise SchemaViolation(
                    f"interval filter on non-quantitative {cmd['entity']}.{cmd['field']}")
            if cmd["kind"] == "point" and info.kind is FieldKind.QUANTITATIVE:
                raise SchemaViolation(
                    f"point filter on quantitative {cmd['entity']}.{cmd['field']}")

    raw = _ask(backend, message, prompt, FILTER_COMMANDS_SCHEMA,
               traces if traces is not None else [], check=check)
    commands = []
    for cmd in raw:
        info = context.field(cmd["entity"], cmd["field"])
        if cmd["kind"] == "interval":
            lo = cmd.get("min")
            hi = cmd.get("max")
            commands.append(FilterCommand(
                entity=cmd["entity"], field=cmd["field"], kind="interval",
                min=lo if lo is not None else info.observed_min,
                max=hi if hi is not None else info.observed_max,
            ))
        else:
            commands.append(FilterCommand(
                entity=cmd["entity"], field=cmd["field"], kind="point",
                values=tuple(cmd["values"]),
            ))
    return commands


def run_viz_agent(message: str, context: AgentContext,
                  backend: CompletionBackend, package: Package,
                  traces: list[dict] | None = None) -> dict:
    """Produce a spec document that already passed schema, parse, and
    package validation; anything outside those bounds is rejected."""
    prompt = _load_prompt("viz.txt").format(
        context=context.serialize(), message=message)

    def check(raw: dict) -> None:
        spec: VizSpec = parse_spec(raw)
        violations = validate_spec(spec, package)
        if violations:
            v = violations[0]
            raise SchemaViolation(
                f"spec invalid at {v.locus}: {v.reason}",
                violations=[{"code": x.code, "locus": x.locus, "reason": x.reason}
                            for x in violations])

    return _ask(backend, message, prompt, VIZSPEC_SCHEMA,
                traces if traces is not None else [], check=check)


def run_pipeline(message: str, context: AgentContext,
                 backend: CompletionBackend, package: Package) -> AgentOutput:
    """Full turn: route, then whichever downstream agents the route asks for.

    Filter commands come back before the spec so a new chart is born under
    the new filters.
    """
    traces: list[dict] = []
    route = orchestrate(message, context, backend, traces)
    out = AgentOutput(route=route, traces=traces)
    if route.wants_filter:
        out.filter_commands = run_filter_agent(message, context, backend, traces)
    if route.wants_viz:
        out.viz_spec = run_viz_agent(message, context, backend, package, traces)
    return out
