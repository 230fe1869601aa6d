"""HTTP API over a populated project: reads, writes, and error mapping."""

import shutil
import time

import pytest
from fastapi.testclient import TestClient

from tagscout.annotation import QUESTION_SET
from tagscout.llm import MockChatBackend
from tagscout.models import ObjectDetection, StreetImage
from tagscout.service import create_app
from tagscout.store import ProjectStore

from conftest import make_annotation, make_road


@pytest.fixture(scope="module")
def client(fixture_project, tmp_path_factory):
    root = tmp_path_factory.mktemp("service") / "proj"
    shutil.copytree(fixture_project, root)
    app = create_app(ProjectStore(root, create=False))
    return TestClient(app)


def minimal_client(tmp_path, backend=None, annotate=("analyst1", "analyst2", "blip2")):
    """Two-road project: road 1 fully annotated, road 2 untouched."""
    store = ProjectStore(tmp_path / "mini")
    images = [
        StreetImage(
            image_id="im-1", lon=-80.1995, lat=25.77,
            captured_at="2021-05-01T10:00:00Z",
            detections=[ObjectDetection("Signage", 0.9)],
        )
    ]
    store.save_ingest([make_road(1, matched_image_id="im-1"),
                       make_road(2, matched_image_id="im-1")], images)
    for analyst in annotate:
        store.add_annotation(make_annotation(1, analyst, image_id="im-1"))
    return TestClient(create_app(store, backend=backend)), store


# ---------------------------------------------------------------------------
# reads over the full fixture project
# ---------------------------------------------------------------------------


def test_questions_endpoint(client):
    body = client.get("/api/questions").json()
    assert [q["variable"] for q in body] == [
        "caption", "users", "lanes", "surface", "oneway", "lit",
    ]
    assert body == [{"variable": q.variable, "text": q.text} for q in QUESTION_SET]


def test_analysts_endpoint(client):
    body = client.get("/api/analysts").json()
    assert len(body) == 3
    by_id = {a["analyst_id"]: a for a in body}
    assert by_id["blip2"]["kind"] == "artificial"
    assert by_id["analyst1"]["kind"] == "human"
    assert by_id["analyst2"]["display_name"] == "Analyst #2"


def test_roads_listing(client):
    body = client.get("/api/roads").json()
    assert len(body) == 94
    for row in body:
        assert row["n_suggestions"] == 12
        assert set(row["annotated_by"]) == {"blip2", "analyst1", "analyst2"}
        assert all(row["annotated_by"].values())
        assert row["matched_image_id"]


def test_road_detail(client):
    roads = client.get("/api/roads").json()
    rid = roads[0]["osm_id"]
    body = client.get(f"/api/roads/{rid}").json()
    assert body["osm_id"] == rid
    assert len(body["geometry"]) >= 2
    assert body["tags"]["highway"]
    assert body["history"]
    assert body["image_url"] == f"image://{body['matched_image_id']}"
    assert len(body["annotations"]) == 3
    assert isinstance(body["detections"], list)


def test_road_detail_404(client):
    resp = client.get("/api/roads/999999")
    assert resp.status_code == 404
    assert "999999" in resp.json()["detail"]


def test_suggestions_for_road(client):
    rid = client.get("/api/roads").json()[0]["osm_id"]
    body = client.get("/api/suggestions", params={"road": rid}).json()
    assert len(body) == 12
    scenarios = {(s["analyst_id"], s["scenario"]) for s in body}
    assert len(scenarios) == 12
    for s in body:
        assert s["suggestion_id"].startswith(f"{rid}:")
        assert s["verdict"] is None
        assert isinstance(s["correct_historical"], bool)
        assert isinstance(s["correct_semantic"], bool)
        if s["correct_historical"]:
            assert s["correct_semantic"]
        if s["highway"]:
            assert s["semantic_category"] is not None


def test_suggestions_unknown_road(client):
    assert client.get("/api/suggestions", params={"road": 1}).status_code == 404


def test_report_endpoint_reproduces_fixture_numbers(client):
    hist = client.get("/api/report", params={"method": "historical"}).json()
    assert hist["n_total"] == 94
    rows = {s["scenario"]: s for s in hist["scenarios"]}
    assert rows["baseline"]["row_avg"] == 30.8
    assert rows["od_lc"]["row_avg"] == 42.9
    assert rows["od_lc"]["pct_change"] == 12.1

    sem = client.get("/api/report", params={"method": "semantic"}).json()
    rows = {s["scenario"]: s for s in sem["scenarios"]}
    assert rows["baseline"]["row_avg"] == 40.4
    assert rows["od_lc"]["row_avg"] == 59.9


def test_report_unknown_method(client):
    resp = client.get("/api/report", params={"method": "vibes"})
    assert resp.status_code == 422
    assert resp.json()["fields"] == ["method"]


def test_lit_report_endpoint(client):
    body = client.get("/api/lit-report").json()
    assert body["scenario"] == "od"
    by_id = {s["analyst_id"]: s for s in body["per_analyst"]}
    assert by_id["blip2"]["pct_correct"] == 63
    assert by_id["analyst1"]["pct_correct"] == 83
    assert by_id["analyst2"]["pct_correct"] == 92
    assert body["n_at_least_two"] == 59
    assert body["n_all_three"] == 36


def test_review_round_trip(client):
    rid = client.get("/api/roads").json()[0]["osm_id"]
    sid = client.get("/api/suggestions", params={"road": rid}).json()[0]["suggestion_id"]

    resp = client.post(f"/api/review/{sid}", json={"verdict": "accept"})
    assert resp.status_code == 200
    assert resp.json()["verdict"] == "accept"
    views = client.get("/api/suggestions", params={"road": rid}).json()
    assert [v["verdict"] for v in views if v["suggestion_id"] == sid] == ["accept"]
    row = [r for r in client.get("/api/roads").json() if r["osm_id"] == rid][0]
    assert row["n_reviewed"] == 1

    assert client.post(f"/api/review/{sid}", json={"verdict": "maybe"}).status_code == 422
    missing = client.post("/api/review/1:analyst1:od", json={"verdict": "accept"})
    assert missing.status_code == 404


# ---------------------------------------------------------------------------
# writes over a minimal project
# ---------------------------------------------------------------------------


def annotation_body(**overrides):
    body = {
        "road_osm_id": 2,
        "analyst_id": "analyst1",
        "caption": "A narrow street.",
        "users": "cars",
        "lanes": "2",
        "surface": "asphalt",
        "oneway": "no",
        "lit": "yes",
    }
    body.update(overrides)
    return body


def test_post_annotation_created_then_conflict(tmp_path):
    client, store = minimal_client(tmp_path)
    resp = client.post("/api/annotations", json=annotation_body())
    assert resp.status_code == 201
    created = resp.json()
    assert created["users"] == "cars"
    assert created["lanes"] == 2
    assert created["image_id"] == "im-1"  # fell back to the matched image

    dup = client.post("/api/annotations", json=annotation_body(caption="Again."))
    assert dup.status_code == 409
    assert "analyst1" in dup.json()["detail"]
    assert len([a for a in store.load_annotations() if a.road_osm_id == 2]) == 1


def test_post_annotation_validation_lists_fields(tmp_path):
    client, _ = minimal_client(tmp_path)
    resp = client.post(
        "/api/annotations",
        json=annotation_body(caption="  ", users="spaceships", lanes="99"),
    )
    assert resp.status_code == 422
    assert set(resp.json()["fields"]) == {"caption", "users", "lanes"}


def test_post_annotation_unanswered_fields_default_to_unknown(tmp_path):
    client, _ = minimal_client(tmp_path)
    resp = client.post(
        "/api/annotations",
        json={"road_osm_id": 2, "analyst_id": "analyst2", "caption": "Just a caption."},
    )
    assert resp.status_code == 201
    body = resp.json()
    assert body["users"] == "unknown"
    assert body["lanes"] is None
    assert body["surface"] == "unknown"
    assert body["oneway"] == "unknown"
    assert body["lit"] == "unknown"


def test_post_annotation_unknown_analyst_and_road(tmp_path):
    client, _ = minimal_client(tmp_path)
    bad_analyst = client.post("/api/annotations", json=annotation_body(analyst_id="ghost"))
    assert bad_analyst.status_code == 422
    assert bad_analyst.json()["fields"] == ["analyst_id"]
    bad_road = client.post("/api/annotations", json=annotation_body(road_osm_id=404))
    assert bad_road.status_code == 404


def test_post_suggest_single_analyst(tmp_path):
    backend = MockChatBackend({}, default='{"highway": "residential"}')
    client, store = minimal_client(tmp_path, backend=backend)
    resp = client.post("/api/suggest/1", json={"analyst_id": "analyst1"})
    assert resp.status_code == 201
    views = resp.json()
    assert len(views) == 4
    assert {v["scenario"] for v in views} == {"baseline", "lc", "od", "od_lc"}
    assert all(v["correct_historical"] for v in views)
    assert len(store.load_suggestions()) == 4


def test_post_suggest_requires_annotation(tmp_path):
    backend = MockChatBackend({}, default='{"highway": "residential"}')
    client, _ = minimal_client(tmp_path, backend=backend)
    resp = client.post("/api/suggest/2", json={"analyst_id": "analyst1"})
    assert resp.status_code == 422
    assert "analyst1" in resp.json()["detail"]


def test_post_suggest_without_backend_is_503(tmp_path):
    client, _ = minimal_client(tmp_path, backend=None)
    assert client.post("/api/suggest/1", json={"analyst_id": "analyst1"}).status_code == 503


def test_report_on_empty_project_404(tmp_path):
    client, _ = minimal_client(tmp_path)
    assert client.get("/api/report").status_code == 404
    assert client.get("/api/lit-report").status_code == 404


def test_suggest_job_lifecycle(tmp_path):
    backend = MockChatBackend({}, default='{"highway": "residential"}')
    client, store = minimal_client(tmp_path, backend=backend)
    # road 2 lacks annotations: fill it so the whole corpus can process
    for analyst in ("analyst1", "analyst2", "blip2"):
        client.post(
            "/api/annotations",
            json=annotation_body(analyst_id=analyst, caption=f"From {analyst}."),
        )

    rejected = client.post("/api/jobs", json={"kind": "evaluate"})
    assert rejected.status_code == 422

    accepted = client.post("/api/jobs", json={"kind": "suggest"})
    assert accepted.status_code == 202
    job_id = accepted.json()["job_id"]

    for _ in range(100):
        job = client.get(f"/api/jobs/{job_id}").json()
        if job["status"] in ("done", "failed"):
            break
        time.sleep(0.05)
    assert job["status"] == "done"
    assert job["processed"] == 2
    assert job["failed"] == 0
    assert len(store.load_suggestions()) == 24  # 2 roads x 3 analysts x 4 scenarios

    assert client.get("/api/jobs/job-9999").status_code == 404


def test_static_frontend_mount(tmp_path):
    store = ProjectStore(tmp_path / "proj")
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>workbench</title>")
    client = TestClient(create_app(store, frontend_dir=ui))
    resp = client.get("/")
    assert resp.status_code == 200
    assert "workbench" in resp.text
