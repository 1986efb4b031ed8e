"""Deterministic transcript replay.

A transcript bundles a package path, a script of canned agent outputs, and
an ordered list of steps (chat messages and direct actions). Replaying one
with the scripted backend is fully deterministic, so the final snapshot
digest doubles as a regression check: same transcript, same digest, always.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .agents import ScriptedBackend, build_context
from .agents.pipeline import FILTER_COMMANDS_SCHEMA, ROUTE_SCHEMA, VIZSPEC_SCHEMA
from .datapackage import Package, load_package
from .errors import LinkboardError, MalformedDocument, SchemaViolation, VersionSkew
from .grammar import parse_spec
from .linking import entity_counts
from .service import chat_turn
from .session import SessionState, action_from_dict, snapshot, snapshot_digest

TRANSCRIPT_SCHEMA_VERSION = 1


@dataclass
class Transcript:
    package_path: Path
    script: ScriptedBackend
    steps: list[dict]
    expected_digest: str | None = None

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        """Load and validate a transcript; scripted outputs are checked
        against their schemas here, naming the offending step."""
        path = Path(path)
        try:
            doc = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"transcript is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise MalformedDocument("transcript must be a JSON object")
        if doc.get("schema_version", 1) > TRANSCRIPT_SCHEMA_VERSION:
            raise VersionSkew("transcript schema is newer than this build")
        for key in ("package", "steps"):
            if key not in doc:
                raise MalformedDocument(f"transcript is missing {key!r}")
        script_doc = doc.get("script", {"responses": {}})
        _validate_script(script_doc)
        steps = doc["steps"]
        for i, step in enumerate(steps):
            if not isinstance(step, dict) or not ({"chat", "action"} & set(step)):
                raise MalformedDocument(f"step {i} needs 'chat' or 'action'")
        return cls(
            package_path=(path.parent / doc["package"]).resolve(),
            script=ScriptedBackend.from_dict(script_doc),
            steps=steps,
            expected_digest=doc.get("expected_digest"),
        )


def _validate_script(script_doc: dict) -> None:
    responses = script_doc.get("responses")
    if not isinstance(responses, dict):
        raise MalformedDocument("script needs a 'responses' map")
    for message, entry in responses.items():
        try:
            if "route" in entry:
                jsonschema.validate(entry["route"], ROUTE_SCHEMA)
            if "filters" in entry:
                jsonschema.validate(entry["filters"], FILTER_COMMANDS_SCHEMA)
            if "viz" in entry:
                jsonschema.validate(entry["viz"], VIZSPEC_SCHEMA)
                parse_spec(entry["viz"])
        except (jsonschema.ValidationError, MalformedDocument) as exc:
            raise SchemaViolation(
                f"scripted output for {message!r} is invalid: {exc}",
                key=message) from exc


@dataclass
class ReplayResult:
    snapshot: dict
    digest: str
    log: list[str] = field(default_factory=list)

    @property
    def final_counts(self) -> dict[str, int]:
        return self._counts

    _counts: dict[str, int] = field(default_factory=dict)


def replay(transcript: Transcript | str | Path,
           package: Package | None = None) -> ReplayResult:
    """Run every step with the scripted backend; abort on the first error,
    naming the step index."""
    if not isinstance(transcript, Transcript):
        transcript = Transcript.load(transcript)
    if package is None:
        package = load_package(transcript.package_path)
    context = build_context(package)
    state = SessionState(package, session_id="replay")
    log: list[str] = []

    for i, step in enumerate(transcript.steps):
        try:
            if "chat" in step:
                chat_turn(state, step["chat"], context, transcript.script, package)
                label = f"chat {step['chat']!r}"
            else:
                state.apply(action_from_dict(step["action"]))
                label = f"action {step['action'].get('action')!r}"
        except LinkboardError as exc:
            exc.locus["step"] = i
            raise
        counts = entity_counts(package, state.registry)
        log.append(f"step {i:2d}  {label}: counts "
                   + " ".join(f"{k}={v}" for k, v in counts.items()))

    doc = snapshot(state)
    result = ReplayResult(snapshot=doc, digest=snapshot_digest(doc), log=log)
    result._counts = entity_counts(package, state.registry)
    return result
