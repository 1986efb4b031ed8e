from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import FIXTURES
from linkboard.agents import ScriptedBackend
from linkboard.errors import BackendTimeout
from linkboard.service import create_app

PENGUINS_SCRIPT = json.loads(
    (FIXTURES / "transcripts" / "penguins_tour.json").read_text())["script"]


@pytest.fixture()
def client(tmp_path, penguins):
    backend = ScriptedBackend.from_dict(PENGUINS_SCRIPT)
    app = create_app(penguins, backend, snapshot_dir=tmp_path / "snaps")
    with TestClient(app) as c:
        yield c


def test_create_session_reports_counts(client):
    r = client.post("/sessions", json={"package": "penguins"})
    assert r.status_code == 200
    body = r.json()
    assert body["version"] == 0
    assert body["counts"] == {"penguins": 344}


def test_create_session_wrong_package_404(client):
    r = client.post("/sessions", json={"package": "walruses"})
    assert r.status_code == 404


def test_chat_creates_viz_and_widget(client):
    sid = client.post("/sessions", json={}).json()["id"]
    r = client.post(f"/sessions/{sid}/chat",
                    json={"text": "How many are there for each sex?"})
    assert r.status_code == 200
    body = r.json()
    assert [e["kind"] for e in body["events"]] == ["viz_created", "widget_created"]
    assert body["version"] == 1
    state = client.get(f"/sessions/{sid}/state").json()
    assert len(state["dashboard"]) == 1
    table = state["dashboard"][0]["table"]
    assert sorted(table["columns"], key=str) == sorted(
        [{"name": "sex", "kind": "nominal"}, {"name": "count", "kind": "quantitative"}],
        key=str)


def test_chat_filter_updates_counts(client):
    sid = client.post("/sessions", json={}).json()["id"]
    r = client.post(f"/sessions/{sid}/chat", json={"text": "Can you remove Gentoo?"})
    assert r.status_code == 200
    counts = client.get(f"/sessions/{sid}/counts").json()
    assert counts == {"penguins": 220}
    state = client.get(f"/sessions/{sid}/state").json()
    assert len(state["chips"]) == 1
    assert state["widgets"][0]["kind"] == "filter_adjust"


def test_stale_version_409_state_unchanged(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat", json={"text": "Can you remove Gentoo?"})
    r = client.patch(f"/sessions/{sid}/filters/sel-1",
                     json={"version": 0, "values": [["Gentoo"]]})
    assert r.status_code == 409
    assert r.json()["code"] == "StaleVersion"
    assert client.get(f"/sessions/{sid}/counts").json() == {"penguins": 220}


def test_brush_mirrors_into_widget(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat",
                json={"text": "Can you show the distribution of bill length and depth?"})
    r = client.post(f"/sessions/{sid}/viz/viz-1/brush",
                    json={"version": 1,
                          "intervals": {"bill_length_mm": [40, 50],
                                        "bill_depth_mm": [15, 20]}})
    assert r.status_code == 200
    state = client.get(f"/sessions/{sid}/state").json()
    widget = next(w for w in state["widgets"] if w["kind"] == "filter_adjust")
    assert widget["payload"]["intervals"] == {"bill_length_mm": [40, 50],
                                              "bill_depth_mm": [15, 20]}
    assert widget["brush_viz"] == "viz-1"
    # widget-side patch mirrors back
    r = client.patch(f"/sessions/{sid}/filters/{widget['selection']}",
                     json={"intervals": {"bill_length_mm": [41, 49],
                                         "bill_depth_mm": [15, 20]}})
    assert r.status_code == 200
    state = client.get(f"/sessions/{sid}/state").json()
    item = state["dashboard"][0]
    sel = next(s for s in item["spec"]["selections"] if s.get("brush"))
    assert state["widgets"][-1]["payload"]["intervals"]["bill_length_mm"] == [41, 49]


def test_adjust_fields_endpoint(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat", json={"text": "Color that by species."})
    r = client.patch(f"/sessions/{sid}/viz/viz-1/fields",
                     json={"channel": "color", "field": "island"})
    assert r.status_code == 200
    state = client.get(f"/sessions/{sid}/state").json()
    mapping = state["dashboard"][0]["spec"]["representation"]["mapping"]
    assert {"channel": "color", "field": "island", "field_kind": "nominal"} in mapping


def test_invalid_field_swap_422(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat", json={"text": "Color that by species."})
    r = client.patch(f"/sessions/{sid}/viz/viz-1/fields",
                     json={"channel": "color", "field": "body_mass_g"})
    assert r.status_code == 422
    assert r.json()["code"] == "KindMismatch"


def test_download_streams_csv_matching_counts(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat", json={"text": "Can you remove Gentoo?"})
    r = client.get(f"/sessions/{sid}/download", params={"entity": "penguins"})
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("text/csv")
    rows = r.text.strip().split("\n")
    assert len(rows) - 1 == client.get(f"/sessions/{sid}/counts").json()["penguins"]


def test_download_unknown_entity_404(client):
    sid = client.post("/sessions", json={}).json()["id"]
    r = client.get(f"/sessions/{sid}/download", params={"entity": "walruses"})
    assert r.status_code == 404


def test_unknown_session_404(client):
    assert client.get("/sessions/nope/state").status_code == 404


def test_dismiss_viz_endpoint(client):
    sid = client.post("/sessions", json={}).json()["id"]
    client.post(f"/sessions/{sid}/chat",
                json={"text": "Can you show me a table of all the penguin metadata?"})
    r = client.delete(f"/sessions/{sid}/viz/viz-1", params={"version": 1})
    assert r.status_code == 200
    assert client.get(f"/sessions/{sid}/state").json()["dashboard"] == []


def test_chat_schema_violation_422_dashboard_untouched(tmp_path, penguins):
    backend = ScriptedBackend({"bad": {
        "route": {"wants_filter": False, "wants_viz": True},
        "viz": {"source": [{"alias": "p", "entity": "penguins"}],
                "representation": {"mark": "point", "mapping": [
                    {"channel": "x", "field": "wingspan",
                     "field_kind": "quantitative"},
                    {"channel": "y", "field": "body_mass_g",
                     "field_kind": "quantitative"}]}}}})
    app = create_app(penguins, backend)
    with TestClient(app) as client:
        sid = client.post("/sessions", json={}).json()["id"]
        r = client.post(f"/sessions/{sid}/chat", json={"text": "bad"})
        assert r.status_code == 422
        assert r.json()["code"] == "SchemaViolation"
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["dashboard"] == []
        assert state["version"] == 0


def test_backend_timeout_maps_to_504(penguins):
    class TimeoutBackend:
        def complete_structured(self, prompt, schema, *, key=None):
            raise BackendTimeout("deadline exceeded")

    app = create_app(penguins, TimeoutBackend())
    with TestClient(app) as client:
        sid = client.post("/sessions", json={}).json()["id"]
        r = client.post(f"/sessions/{sid}/chat", json={"text": "hello"})
        assert r.status_code == 504


def test_restart_restores_identical_state(tmp_path, penguins):
    backend = ScriptedBackend.from_dict(PENGUINS_SCRIPT)
    snaps = tmp_path / "snaps"
    app = create_app(penguins, backend, snapshot_dir=snaps)
    with TestClient(app) as client:
        sid = client.post("/sessions", json={}).json()["id"]
        client.post(f"/sessions/{sid}/chat", json={"text": "Can you remove Gentoo?"})
        client.post(f"/sessions/{sid}/chat",
                    json={"text": "Can you show the distribution of bill length and depth?"})
        client.post(f"/sessions/{sid}/viz/viz-1/brush",
                    json={"intervals": {"bill_length_mm": [40, 50],
                                        "bill_depth_mm": [15, 20]}})
        before = client.get(f"/sessions/{sid}/state").json()

    fresh_app = create_app(penguins, backend, snapshot_dir=snaps)
    with TestClient(fresh_app) as client:
        after = client.get(f"/sessions/{sid}/state").json()
    assert after == before
