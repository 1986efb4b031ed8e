"""Multi-agent chat handling over pluggable completion backends."""

from .backends import CompletionBackend, RemoteBackend, ScriptedBackend
from .context import AgentContext, build_context
from .pipeline import (
    AgentOutput,
    FilterCommand,
    Route,
    VIZSPEC_SCHEMA,
    orchestrate,
    run_filter_agent,
    run_pipeline,
    run_viz_agent,
)

__all__ = [
    "AgentContext",
    "AgentOutput",
    "CompletionBackend",
    "FilterCommand",
    "RemoteBackend",
    "Route",
    "ScriptedBackend",
    "VIZSPEC_SCHEMA",
    "build_context",
    "orchestrate",
    "run_filter_agent",
    "run_pipeline",
    "run_viz_agent",
]
