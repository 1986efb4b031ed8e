"""Completion backends: a remote HTTP client and a scripted stand-in.

Both expose one call: structured completion against a JSON Schema. The
scripted backend is a pure lookup from the exact user message to canned
stage outputs, keyed by the schema's title; it exists so replays and CI are
deterministic. The remote backend posts prompt + schema with temperature
zero and a bearer token from the environment.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Protocol

import httpx

from ..errors import BackendTimeout, MalformedDocument, ScriptMiss

TOKEN_ENV_VAR = "LINKBOARD_BACKEND_TOKEN"
DEFAULT_TIMEOUT = 30.0

#: schema title -> key inside a script entry
_STAGE_KEYS = {"route": "route", "filter_commands": "filters", "viz_spec": "viz"}


class CompletionBackend(Protocol):
    def complete_structured(self, prompt: str, schema: dict,
                            *, key: str | None = None) -> Any:
        """Return a document intended to satisfy ``schema``.

        ``key`` is the raw user message; scripted backends dispatch on it,
        remote backends ignore it.
        """
        ...


class ScriptedBackend:
    """Exact-match message -> canned structured outputs. Pure."""

    def __init__(self, responses: dict[str, dict]):
        self.responses = responses

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ScriptedBackend":
        if not isinstance(doc, dict) or "responses" not in doc:
            raise MalformedDocument("script file needs a 'responses' map")
        responses = doc["responses"]
        if not isinstance(responses, dict):
            raise MalformedDocument("'responses' must map messages to stage outputs")
        return cls(responses)

    def complete_structured(self, prompt: str, schema: dict,
                            *, key: str | None = None) -> Any:
        if key is None or key not in self.responses:
            raise ScriptMiss(f"no scripted response for message {key!r}", key=key)
        entry = self.responses[key]
        stage = _STAGE_KEYS.get(schema.get("title", ""))
        if stage is None:
            raise MalformedDocument(f"schema {schema.get('title')!r} has no scripted stage")
        if stage not in entry:
            raise ScriptMiss(f"scripted entry for {key!r} has no {stage!r} output",
                             key=key, stage=stage)
        return entry[stage]


class RemoteBackend:
    """HTTP structured-completion client, deterministic settings."""

    def __init__(self, url: str, token: str | None = None,
                 timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self.timeout = timeout

    def complete_structured(self, prompt: str, schema: dict,
                            *, key: str | None = None) -> Any:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = httpx.post(
                self.url,
                json={"prompt": prompt, "schema": schema, "temperature": 0},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            return response.json()["output"]
        except httpx.TimeoutException as exc:
            raise BackendTimeout(f"backend did not answer within {self.timeout}s") from exc
