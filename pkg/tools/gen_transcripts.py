#!/usr/bin/env python3
"""Build the bundled replay transcripts and pin their snapshot digests.

Run from the repository root after gen_data.py:

    python3 tools/gen_transcripts.py

The penguins tour walks the full feature set: table, grouped bar, CDF,
brushing, a category filter, scatter, widget field swaps, and download.
The filestore transcript reproduces the "largest files" workflow: three
aggregate bar charts, a filter snapped to the maximum file size, then a
widened interval.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from linkboard.transcript import Transcript, replay  # noqa: E402


def penguins_tour() -> dict:
    src = [{"alias": "p", "entity": "penguins"}]
    responses = {
        "Can you show me a table of all the penguin metadata?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {"source": src},
        },
        "How many are there for each sex?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "groupby", "fields": ["sex"]},
                    {"kind": "rollup", "out_field": "count", "op": "count"},
                ],
                "representation": {"mark": "bar", "mapping": [
                    {"channel": "y", "field": "sex", "field_kind": "nominal"},
                    {"channel": "x", "field": "count", "field_kind": "quantitative"},
                ]},
            },
        },
        "Can you show me CDF of body mass?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "cdf", "field": "body_mass_g", "out_fraction": "fraction"},
                ],
                "representation": {"mark": "line", "mapping": [
                    {"channel": "x", "field": "body_mass_g", "field_kind": "quantitative"},
                    {"channel": "y", "field": "fraction", "field_kind": "quantitative"},
                ]},
            },
        },
        "Can you split that cdf by species?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "cdf", "field": "body_mass_g", "out_fraction": "fraction",
                     "by": ["species"]},
                ],
                "representation": {"mark": "line", "mapping": [
                    {"channel": "x", "field": "body_mass_g", "field_kind": "quantitative"},
                    {"channel": "y", "field": "fraction", "field_kind": "quantitative"},
                    {"channel": "color", "field": "species", "field_kind": "nominal"},
                ]},
            },
        },
        "Can you remove Gentoo?": {
            "route": {"wants_filter": True, "wants_viz": False},
            "filters": [{"entity": "penguins", "field": "species", "kind": "point",
                         "values": ["Adelie", "Chinstrap"]}],
        },
        "Can you show the distribution of bill length and depth?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "representation": {"mark": "point", "mapping": [
                    {"channel": "x", "field": "bill_length_mm", "field_kind": "quantitative"},
                    {"channel": "y", "field": "bill_depth_mm", "field_kind": "quantitative"},
                ]},
            },
        },
        "Color that by species.": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "representation": {"mark": "point", "mapping": [
                    {"channel": "x", "field": "bill_length_mm", "field_kind": "quantitative"},
                    {"channel": "y", "field": "bill_depth_mm", "field_kind": "quantitative"},
                    {"channel": "color", "field": "species", "field_kind": "nominal"},
                ]},
            },
        },
        "How many penguins are on each island, for each species?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "groupby", "fields": ["island", "species"]},
                    {"kind": "rollup", "out_field": "count", "op": "count"},
                ],
                "representation": {"mark": "bar", "mapping": [
                    {"channel": "y", "field": "island", "field_kind": "nominal"},
                    {"channel": "x", "field": "count", "field_kind": "quantitative"},
                    {"channel": "color", "field": "species", "field_kind": "nominal",
                     "options": {"stack": "stacked"}},
                ]},
            },
        },
        "Thanks, that's what I needed!": {
            "route": {"wants_filter": False, "wants_viz": False,
                      "reply": "You're welcome. The current selection is ready to download."},
        },
    }
    steps = [
        {"chat": "Can you show me a table of all the penguin metadata?"},
        {"chat": "How many are there for each sex?"},
        {"chat": "Can you show me CDF of body mass?"},
        # select the lower range of body mass in the CDF chart
        {"action": {"action": "brush", "viz_id": "viz-3",
                    "intervals": {"body_mass_g": [None, 4000]}}},
        # then clear the filter
        {"action": {"action": "brush", "viz_id": "viz-3", "clear": True}},
        {"chat": "Can you split that cdf by species?"},
        {"chat": "Can you remove Gentoo?"},
        {"chat": "Can you show the distribution of bill length and depth?"},
        {"chat": "Color that by species."},
        {"chat": "How many penguins are on each island, for each species?"},
        # swap species -> island in the colored scatter and the split CDF
        {"action": {"action": "adjust_viz_field", "viz_id": "viz-6",
                    "channel": "color", "field": "island"}},
        {"action": {"action": "adjust_viz_field", "viz_id": "viz-4",
                    "channel": "color", "field": "island"}},
        # select bills near the middle of the scatter
        {"action": {"action": "brush", "viz_id": "viz-6",
                    "intervals": {"bill_length_mm": [38.0, 50.0],
                                  "bill_depth_mm": [16.0, 20.0]}}},
        {"chat": "Thanks, that's what I needed!"},
        {"action": {"action": "download", "entity": "penguins"}},
    ]
    return {"schema_version": 1, "package": "../../data/penguins",
            "script": {"responses": responses}, "steps": steps}


def filestore_topk() -> dict:
    sizes = []
    with open(ROOT / "data/filestore/files.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            sizes.append(int(row["size_in_bytes"]))
    sizes.sort(reverse=True)
    largest, k15 = sizes[0], sizes[14]

    src = [{"alias": "f", "entity": "files"}]
    responses = {
        "break down the number of files by mime type.": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "groupby", "fields": ["mime_type"]},
                    {"kind": "rollup", "out_field": "count", "op": "count"},
                ],
                "representation": {"mark": "bar", "mapping": [
                    {"channel": "y", "field": "mime_type", "field_kind": "nominal"},
                    {"channel": "x", "field": "count", "field_kind": "quantitative"},
                ]},
            },
        },
        "for each mime type what is the average file size?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "groupby", "fields": ["mime_type"]},
                    {"kind": "rollup", "out_field": "avg_size", "op": "mean",
                     "in_field": "size_in_bytes"},
                ],
                "representation": {"mark": "bar", "mapping": [
                    {"channel": "y", "field": "mime_type", "field_kind": "nominal"},
                    {"channel": "x", "field": "avg_size", "field_kind": "quantitative"},
                ]},
            },
        },
        "What is the total contribution in file size for each mime type?": {
            "route": {"wants_filter": False, "wants_viz": True},
            "viz": {
                "source": src,
                "transformation": [
                    {"kind": "groupby", "fields": ["mime_type"]},
                    {"kind": "rollup", "out_field": "total_size", "op": "sum",
                     "in_field": "size_in_bytes"},
                ],
                "representation": {"mark": "bar", "mapping": [
                    {"channel": "y", "field": "mime_type", "field_kind": "nominal"},
                    {"channel": "x", "field": "total_size", "field_kind": "quantitative"},
                ]},
            },
        },
        "Filter to the largest file.": {
            "route": {"wants_filter": True, "wants_viz": False},
            "filters": [{"entity": "files", "field": "size_in_bytes",
                         "kind": "interval", "min": largest, "max": None}],
        },
    }
    steps = [
        {"chat": "break down the number of files by mime type."},
        {"chat": "for each mime type what is the average file size?"},
        {"chat": "What is the total contribution in file size for each mime type?"},
        {"chat": "Filter to the largest file."},
        # widen the interval from the widget to admit the 15 largest files
        {"action": {"action": "adjust_filter", "name": "sel-1",
                    "intervals": {"size_in_bytes": [k15, None]}}},
        {"action": {"action": "download", "entity": "files"}},
    ]
    return {"schema_version": 1, "package": "../../data/filestore",
            "script": {"responses": responses}, "steps": steps}


def write_with_digest(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", "utf-8")
    result = replay(Transcript.load(path))
    doc["expected_digest"] = result.digest
    path.write_text(json.dumps(doc, indent=2) + "\n", "utf-8")
    print(path.name, result.digest)
    for line in result.log:
        print(" ", line)


if __name__ == "__main__":
    out = ROOT / "fixtures" / "transcripts"
    out.mkdir(parents=True, exist_ok=True)
    tour = penguins_tour()
    write_with_digest(tour, out / "penguins_tour.json")
    write_with_digest(filestore_topk(), out / "filestore_topk.json")
    # standalone script for `linkboard serve --backend scripted:...`
    scripts = ROOT / "fixtures" / "scripts"
    scripts.mkdir(parents=True, exist_ok=True)
    (scripts / "penguins_script.json").write_text(
        json.dumps(tour["script"], indent=2) + "\n", "utf-8")
    print("scripts/penguins_script.json")
