"""Command-line entry points: validate, serve, replay."""

from __future__ import annotations

import os
import sys

import click

from .datapackage import field_profile, load_package
from .errors import LinkboardError

BACKEND_URL_ENV_VAR = "LINKBOARD_BACKEND_URL"


@click.group()
def main() -> None:
    """linkboard: chat-driven linked dashboards over data packages."""


@main.command()
@click.argument("package_path", type=click.Path(exists=True))
def validate(package_path: str) -> None:
    """Load a data package and report its shape, or fail with the locus."""
    try:
        package = load_package(package_path)
    except LinkboardError as exc:
        click.echo(f"invalid: [{exc.code}] {exc.message}", err=True)
        sys.exit(1)
    click.echo(f"package {package.name!r}: {len(package.entities)} entities, "
               f"{len(package.relations)} relations")
    for entity in package.entities:
        click.echo(f"  {entity.name}: {len(entity.fields)} fields, "
                   f"{len(entity.rows)} rows")
        for stats in field_profile(package, entity.name):
            if stats.observed_min is not None:
                domain = f"[{stats.observed_min}, {stats.observed_max}]"
            else:
                domain = f"{stats.distinct_count} categories"
            click.echo(f"    {stats.field} ({stats.kind.value}): {domain}, "
                       f"{stats.null_count} nulls")
    for rel in package.relations:
        click.echo(f"  {rel.from_entity}.{','.join(rel.from_fields)} -> "
                   f"{rel.to_entity}.{','.join(rel.to_fields)}")


@main.command()
@click.option("--package", "package_path", required=True,
              type=click.Path(exists=True), help="Data package to serve.")
@click.option("--backend", "backend_spec", required=True,
              help="'scripted:<script.json>' or 'remote'.")
@click.option("--remote-url", default=None,
              help=f"Remote backend URL (or ${BACKEND_URL_ENV_VAR}).")
@click.option("--snapshot-dir", default=None, type=click.Path(),
              help="Directory for per-session snapshots.")
@click.option("--static-dir", default=None, type=click.Path(),
              help="Serve a built browser client from this directory.")
@click.option("--cardinality-threshold", default=None, type=int,
              help="Max distinct values for a categorical field in agent context.")
@click.option("--context-budget", default=None, type=int,
              help="Max serialized agent-context size in characters.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(package_path: str, backend_spec: str, remote_url: str | None,
          snapshot_dir: str | None, static_dir: str | None,
          cardinality_threshold: int | None, context_budget: int | None,
          host: str, port: int) -> None:
    """Serve the HTTP API (and optionally the browser client)."""
    import uvicorn

    from .agents import RemoteBackend, ScriptedBackend
    from .service import create_app

    package = load_package(package_path)
    if backend_spec.startswith("scripted:"):
        backend = ScriptedBackend.from_file(backend_spec.split(":", 1)[1])
    elif backend_spec == "remote":
        url = remote_url or os.environ.get(BACKEND_URL_ENV_VAR)
        if not url:
            raise click.UsageError(
                f"remote backend needs --remote-url or ${BACKEND_URL_ENV_VAR}")
        backend = RemoteBackend(url)
    else:
        raise click.UsageError(f"unknown backend {backend_spec!r}")

    app = create_app(package, backend, snapshot_dir=snapshot_dir,
                     cardinality_threshold=cardinality_threshold,
                     context_budget=context_budget, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("transcript_path", type=click.Path(exists=True))
@click.option("--expect-digest", default=None,
              help="Fail unless the final snapshot digest matches.")
@click.option("--quiet", is_flag=True, help="Only print the digest.")
def replay(transcript_path: str, expect_digest: str | None, quiet: bool) -> None:
    """Replay a transcript with the scripted backend; print per-step counts."""
    from .transcript import Transcript
    from .transcript import replay as run_replay

    try:
        transcript = Transcript.load(transcript_path)
        result = run_replay(transcript)
    except LinkboardError as exc:
        click.echo(f"replay failed: [{exc.code}] {exc.message} {exc.locus}", err=True)
        sys.exit(2)
    if not quiet:
        for line in result.log:
            click.echo(line)
    click.echo(f"digest {result.digest}")
    expected = expect_digest or transcript.expected_digest
    if expected and expected != result.digest:
        click.echo(f"digest mismatch: expected {expected}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
