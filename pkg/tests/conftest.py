from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from linkboard.datapackage import (
    EntityTable,
    FieldKind,
    FieldSchema,
    Package,
    Relationship,
    load_package,
)

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
FIXTURES = ROOT / "fixtures"

PENGUINS_CSV = DATA / "penguins" / "penguins.csv"
FILESTORE_CSV = DATA / "filestore" / "files.csv"


@pytest.fixture(scope="session")
def penguins():
    return load_package(DATA / "penguins")


@pytest.fixture(scope="session")
def biorepo():
    return load_package(DATA / "biorepo")


@pytest.fixture(scope="session")
def filestore():
    return load_package(DATA / "filestore")


def load_fixture_spec(name: str) -> dict:
    path = FIXTURES / "specs" / name
    return json.loads(path.read_text("utf-8"))


def fixture_specs(kind: str) -> list[tuple[str, dict]]:
    out = []
    for path in sorted((FIXTURES / "specs" / kind).glob("*.json")):
        out.append((path.name, json.loads(path.read_text("utf-8"))))
    return out


def build_package(name: str, entities: list[dict],
                  relations: list[Relationship]) -> Package:
    """Assemble an in-memory package from plain row dicts.

    Each entity dict: name, fields (list of (name, kind)), primary_key,
    rows (list of dicts).
    """
    tables = []
    for e in entities:
        schemas = [FieldSchema(name=f, kind=k,
                               storage_type="number" if k is FieldKind.QUANTITATIVE
                               else "string")
                   for f, k in e["fields"]]
        rows = [tuple(r[f] for f, _ in e["fields"]) for r in e["rows"]]
        tables.append(EntityTable(name=e["name"], path=f"{e['name']}.csv",
                                  fields=schemas, primary_key=tuple(e["primary_key"]),
                                  rows=rows))
    return Package(name=name, entities=tables, relations=relations)


def random_linked_package(rng: random.Random, max_rows: int = 60) -> tuple[Package, dict]:
    """A random donors -> samples -> datasets package plus its raw tables."""
    organs = ["kidney", "heart", "lung", "liver"]
    n_donors = rng.randint(1, max_rows)
    donors = []
    for i in range(n_donors):
        donors.append({
            "id": f"d{i}",
            "age": rng.choice([None] + list(range(0, 100))),
            "sex": rng.choice([None, "F", "M"]),
        })
    n_samples = rng.randint(0, max_rows)
    samples = []
    for i in range(n_samples):
        samples.append({
            "id": f"s{i}",
            "donor_id": rng.choice([None] + [d["id"] for d in donors]),
            "organ": rng.choice(organs),
            "mass": rng.choice([None] + [round(rng.uniform(0, 50), 1) for _ in range(5)]),
        })
    n_datasets = rng.randint(0, max_rows)
    datasets = []
    for i in range(n_datasets):
        datasets.append({
            "id": f"x{i}",
            "sample_id": rng.choice([None] + [s["id"] for s in samples])
            if samples else None,
            "size": rng.randint(1, 10_000),
        })
    Q, N, I = FieldKind.QUANTITATIVE, FieldKind.NOMINAL, FieldKind.IDENTIFIER
    package = build_package(
        "synthetic",
        [
            {"name": "donors", "fields": [("id", I), ("age", Q), ("sex", N)],
             "primary_key": ["id"], "rows": donors},
            {"name": "samples",
             "fields": [("id", I), ("donor_id", I), ("organ", N), ("mass", Q)],
             "primary_key": ["id"], "rows": samples},
            {"name": "datasets",
             "fields": [("id", I), ("sample_id", I), ("size", Q)],
             "primary_key": ["id"], "rows": datasets},
        ],
        [
            Relationship("samples", ("donor_id",), "donors", ("id",)),
            Relationship("datasets", ("sample_id",), "samples", ("id",)),
        ],
    )
    tables = {"donors": donors, "samples": samples, "datasets": datasets}
    return package, tables


def random_selection(rng: random.Random, tables: dict) -> dict:
    """A random point or interval selection over the synthetic package,
    as plain data usable by both the engine and the oracle."""
    entity = rng.choice(["donors", "samples", "datasets"])
    mode = rng.choice(["any", "all"])
    if entity == "donors":
        field, kind = rng.choice([("age", "interval"), ("sex", "point")])
    elif entity == "samples":
        field, kind = rng.choice([("organ", "point"), ("mass", "interval")])
    else:
        field, kind = ("size", "interval")
    if kind == "interval":
        lo = rng.choice([None, rng.uniform(0, 5_000)])
        hi = rng.choice([None, (lo or 0) + rng.uniform(0, 5_000)])
        payload = {"intervals": {field: (lo, hi)}}
    else:
        observed = sorted({row[field] for row in tables[entity]
                           if row[field] is not None}, key=str)
        universe = observed + [None]
        chosen = [v for v in universe if rng.random() < 0.5]
        payload = {"values": [(v,) for v in chosen]}
    return {"entity": entity, "fields": [field], "kind": kind, "mode": mode, **payload}
