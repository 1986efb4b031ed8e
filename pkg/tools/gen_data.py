#!/usr/bin/env python3
"""Generate the deterministic data packages bundled under data/.

Run from the repository root:

    python3 tools/gen_data.py

Three packages are produced:

* ``data/penguins``  -- single-table stand-in for the classic Palmer
  Penguins table (344 rows, 9 fields). The real CSV is not redistributable
  from this environment, so rows are sampled from per-species Gaussians
  matching the published summary statistics: species/island/sex marginals,
  two bill-size clusters among Adelie/Chinstrap, heavier Gentoo, 11 missing
  sex values, and two rows with no measurements at all.
* ``data/biorepo``   -- three linked entities (donors -> samples -> datasets)
  shaped like a biomedical metadata portal, with nulls and orphans on
  purpose.
* ``data/filestore`` -- one 10,000-row file table with heavy-tailed sizes,
  shaped like a storage-metadata portal.

Everything is seeded; reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["NA" if v is None else v for v in row])


def _write_descriptor(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------
# penguins
# --------------------------------------------------------------------------

# (species, island, count)
PENGUIN_GROUPS = [
    ("Adelie", "Biscoe", 44),
    ("Adelie", "Dream", 56),
    ("Adelie", "Torgersen", 52),
    ("Chinstrap", "Dream", 68),
    ("Gentoo", "Biscoe", 124),
]

# species -> (bill_length, bill_depth, flipper_length, body_mass) as (mean, sd)
PENGUIN_BODY = {
    "Adelie": ((38.8, 2.3), (18.35, 1.1), (190.0, 6.0), (3700.0, 420.0)),
    "Chinstrap": ((48.8, 2.9), (18.4, 1.0), (196.0, 6.5), (3733.0, 360.0)),
    "Gentoo": ((47.5, 2.7), (15.0, 0.9), (217.0, 6.0), (5076.0, 460.0)),
}

# additive shift applied for males and subtracted for females
PENGUIN_SEX_SHIFT = (1.1, 0.5, 3.0, 300.0)

CLAMP = ((30.0, 62.0), (12.5, 22.5), (170.0, 235.0), (2600.0, 6500.0))


def gen_penguins() -> None:
    rng = random.Random(20250414)
    rows: list[list] = []
    for species, island, count in PENGUIN_GROUPS:
        for _ in range(count):
            rows.append([species, island, None, None, None, None, None, None])

    # sex: 11 missing (6 Adelie, 5 Gentoo), remaining 333 split 168 male / 165 female
    adelie_idx = [i for i, r in enumerate(rows) if r[0] == "Adelie"]
    gentoo_idx = [i for i, r in enumerate(rows) if r[0] == "Gentoo"]
    missing_sex = rng.sample(adelie_idx, 6) + rng.sample(gentoo_idx, 5)
    sexed = [i for i in range(len(rows)) if i not in set(missing_sex)]
    rng.shuffle(sexed)
    for i in sexed[:168]:
        rows[i][6] = "male"
    for i in sexed[168:]:
        rows[i][6] = "female"

    # measurements; two of the sex-less rows carry no measurements at all
    empty_rows = {missing_sex[0], missing_sex[6]}
    for i, row in enumerate(rows):
        species, sex = row[0], row[6]
        row[7] = 2007 + (i % 3)
        if i in empty_rows:
            continue
        sign = {"male": 1.0, "female": -1.0, None: 0.0}[sex]
        for j, (mean, sd) in enumerate(PENGUIN_BODY[species]):
            value = rng.gauss(mean + sign * PENGUIN_SEX_SHIFT[j], sd)
            lo, hi = CLAMP[j]
            value = min(max(value, lo), hi)
            row[2 + j] = round(value, 1) if j < 2 else int(round(value))

    rng.shuffle(rows)
    rows = [[i + 1] + row for i, row in enumerate(rows)]

    _write_csv(
        DATA / "penguins" / "penguins.csv",
        ["id", "species", "island", "bill_length_mm", "bill_depth_mm",
         "flipper_length_mm", "body_mass_g", "sex", "year"],
        rows,
    )
    _write_descriptor(DATA / "penguins" / "datapackage.json", {
        "name": "penguins",
        "resources": [{
            "name": "penguins",
            "path": "penguins.csv",
            "description": "Morphological measurements for 344 penguins from three species.",
            "schema": {
                "fields": [
                    {"name": "id", "type": "integer", "description": "Penguin record number."},
                    {"name": "species", "type": "string",
                     "description": "Penguin species.",
                     "constraints": {"enum": ["Adelie", "Chinstrap", "Gentoo"]}},
                    {"name": "island", "type": "string",
                     "description": "Island where the penguin was observed.",
                     "constraints": {"enum": ["Biscoe", "Dream", "Torgersen"]}},
                    {"name": "bill_length_mm", "type": "number",
                     "description": "Bill length in millimeters."},
                    {"name": "bill_depth_mm", "type": "number",
                     "description": "Bill depth in millimeters."},
                    {"name": "flipper_length_mm", "type": "integer",
                     "description": "Flipper length in millimeters."},
                    {"name": "body_mass_g", "type": "integer",
                     "description": "Body mass in grams."},
                    {"name": "sex", "type": "string",
                     "description": "Penguin sex.",
                     "constraints": {"enum": ["female", "male"]}},
                    {"name": "year", "type": "integer",
                     "description": "Study year of the observation."},
                ],
                "primaryKey": ["id"],
            },
        }],
    })


# --------------------------------------------------------------------------
# biorepo: donors -> samples -> datasets
# --------------------------------------------------------------------------

ORGANS = ["Kidney", "Heart", "Lung", "Liver", "Spleen", "Brain"]
CONDITIONS = ["Healthy", "Diseased"]
DEATH_EVENTS = ["Natural causes", "Suicide", "Accident", "Motor vehicle accident",
                "Homicide", "Cardiac event"]
PROJECTS = ["Buck Institute", "Stanford", "UConn Health", "Yale", "Mayo Clinic"]
ASSAYS = ["SNARE-seq2", "RNA-seq", "ATAC-seq", "CODEX", "WGS", "LC-MS"]
ANALYTES = {"SNARE-seq2": "DNA + RNA", "RNA-seq": "RNA", "ATAC-seq": "DNA",
            "CODEX": "Protein", "WGS": "DNA", "LC-MS": "Protein"}


def gen_biorepo() -> None:
    rng = random.Random(20250415)
    donors: list[list] = []
    for i in range(60):
        age = rng.randint(1, 90) if rng.random() > 0.08 else None
        sex = rng.choice(["Female", "Male"]) if rng.random() > 0.25 else None
        donors.append([
            f"D{i+1:03d}",
            age,
            round(rng.uniform(3.0, 150.0), 1),
            round(rng.uniform(50.0, 200.0), 1),
            sex,
            rng.choice(DEATH_EVENTS),
            rng.choice(PROJECTS),
        ])

    samples: list[list] = []
    for i in range(180):
        # a few orphan samples with no donor; donors 55..60 get none at all
        donor = f"D{rng.randint(1, 54):03d}" if rng.random() > 0.04 else None
        samples.append([
            f"S{i+1:04d}",
            donor,
            rng.choice(ORGANS),
            rng.choice(CONDITIONS),
            2015 + rng.randint(0, 9),
        ])

    datasets: list[list] = []
    for i in range(420):
        sample = f"S{rng.randint(1, 170):04d}" if rng.random() > 0.03 else None
        assay = rng.choice(ASSAYS)
        datasets.append([
            f"DS{i+1:05d}",
            sample,
            assay,
            ANALYTES[assay],
            round(rng.lognormvariate(4.0, 1.4), 1),
        ])

    _write_csv(DATA / "biorepo" / "donors.csv",
               ["id", "age", "weight_kg", "height_cm", "sex", "death_event", "project"],
               donors)
    _write_csv(DATA / "biorepo" / "samples.csv",
               ["id", "donor_id", "organ", "condition", "year"], samples)
    _write_csv(DATA / "biorepo" / "datasets.csv",
               ["id", "sample_id", "assay", "analyte_class", "size_mb"], datasets)
    _write_descriptor(DATA / "biorepo" / "datapackage.json", {
        "name": "biorepo",
        "resources": [
            {
                "name": "donors",
                "path": "donors.csv",
                "description": "Tissue donors with demographics.",
                "schema": {
                    "fields": [
                        {"name": "id", "type": "string"},
                        {"name": "age", "type": "integer", "description": "Age at death in years."},
                        {"name": "weight_kg", "type": "number", "description": "Weight in kilograms."},
                        {"name": "height_cm", "type": "number", "description": "Height in centimeters."},
                        {"name": "sex", "type": "string", "constraints": {"enum": ["Female", "Male"]}},
                        {"name": "death_event", "type": "string",
                         "description": "Recorded cause-of-death category."},
                        {"name": "project", "type": "string",
                         "description": "Contributing project site."},
                    ],
                    "primaryKey": ["id"],
                },
            },
            {
                "name": "samples",
                "path": "samples.csv",
                "description": "Biological samples collected from donors.",
                "schema": {
                    "fields": [
                        {"name": "id", "type": "string"},
                        {"name": "donor_id", "type": "string"},
                        {"name": "organ", "type": "string", "description": "Source organ."},
                        {"name": "condition", "type": "string",
                         "constraints": {"enum": ["Healthy", "Diseased"]}},
                        {"name": "year", "type": "integer", "description": "Collection year."},
                    ],
                    "primaryKey": ["id"],
                    "foreignKeys": [
                        {"fields": ["donor_id"],
                         "reference": {"resource": "donors", "fields": ["id"]}},
                    ],
                },
            },
            {
                "name": "datasets",
                "path": "datasets.csv",
                "description": "Derived data files with assay metadata.",
                "schema": {
                    "fields": [
                        {"name": "id", "type": "string"},
                        {"name": "sample_id", "type": "string"},
                        {"name": "assay", "type": "string", "description": "Assay type."},
                        {"name": "analyte_class", "type": "string",
                         "description": "Analyte the assay targets."},
                        {"name": "size_mb", "type": "number", "description": "File size in megabytes."},
                    ],
                    "primaryKey": ["id"],
                    "foreignKeys": [
                        {"fields": ["sample_id"],
                         "reference": {"resource": "samples", "fields": ["id"]}},
                    ],
                },
            },
        ],
    })


# --------------------------------------------------------------------------
# filestore: one fat table with heavy-tailed sizes
# --------------------------------------------------------------------------

MIME_TYPES = ["application/gzip", "application/octet-stream", "text/plain",
              "image/tiff", "application/json", "text/csv", "application/zip",
              "video/mp4"]
MIME_WEIGHTS = [30, 14, 18, 10, 12, 8, 5, 3]
# octet-stream files are individually much larger; gzip numerous but smaller
MIME_SIZE_MU = {"application/gzip": 13.0, "application/octet-stream": 16.5,
                "text/plain": 9.0, "image/tiff": 14.0, "application/json": 8.0,
                "text/csv": 10.0, "application/zip": 12.5, "video/mp4": 15.0}


def gen_filestore() -> None:
    rng = random.Random(20250416)
    seen: set[int] = set()
    rows: list[list] = []
    for i in range(10_000):
        mime = rng.choices(MIME_TYPES, weights=MIME_WEIGHTS, k=1)[0]
        size = int(rng.lognormvariate(MIME_SIZE_MU[mime], 1.6)) + 1
        while size in seen:  # distinct sizes keep top-k cuts exact
            size += 1
        seen.add(size)
        rows.append([
            i + 1,
            f"run{i+1:05d}.{mime.split('/')[1].replace('-', '')[:4]}",
            mime,
            size,
            2018 + rng.randint(0, 6),
        ])

    _write_csv(DATA / "filestore" / "files.csv",
               ["id", "file_name", "mime_type", "size_in_bytes", "year"], rows)
    _write_descriptor(DATA / "filestore" / "datapackage.json", {
        "name": "filestore",
        "resources": [{
            "name": "files",
            "path": "files.csv",
            "description": "Data files tracked by the portal with storage metadata.",
            "schema": {
                "fields": [
                    {"name": "id", "type": "integer"},
                    {"name": "file_name", "type": "string", "description": "Stored file name."},
                    {"name": "mime_type", "type": "string", "description": "MIME type of the file."},
                    {"name": "size_in_bytes", "type": "integer", "description": "File size in bytes."},
                    {"name": "year", "type": "integer", "description": "Upload year."},
                ],
                "primaryKey": ["id"],
            },
        }],
    })


if __name__ == "__main__":
    gen_penguins()
    gen_biorepo()
    gen_filestore()
    print("wrote", DATA / "penguins", DATA / "biorepo", DATA / "filestore")
