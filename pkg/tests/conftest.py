import json
from pathlib import Path

import pytest

from tagscout.cli import main as cli_main
from tagscout.models import (
    Annotation,
    RoadSegment,
    RoadUsers,
    TagVersion,
    YesNoUnknown,
)

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def run_cli(*args: str) -> int:
    return cli_main([str(a) for a in args])


def build_project(project: Path) -> None:
    """Drive the CLI end to end over the recorded fixture corpus."""
    steps = [
        (
            "ingest", "--project", project, "--offline",
            "--osm-fixture", FIXTURES / "downtown.osm.json",
            "--histories-fixture", FIXTURES / "histories.json",
            "--images-fixture", FIXTURES / "images.json",
            "--detections-fixture", FIXTURES / "detections.json",
        ),
        (
            "annotate", "import", "--project", project, "--replace",
            "--file", FIXTURES / "annotations_human.jsonl",
        ),
        (
            "annotate", "auto", "--project", project, "--analyst", "blip2",
            "--canned", FIXTURES / "vision_canned.json", "--offline",
        ),
        (
            "suggest", "--project", project, "--backend", "mock",
            "--mock-file", FIXTURES / "mock_llm.jsonl", "--offline",
        ),
        ("evaluate", "--project", project, "--method", "both"),
        ("lit-report", "--project", project),
    ]
    for step in steps:
        code = run_cli(*step)
        assert code == 0, f"step {step[0]} exited {code}"


@pytest.fixture(scope="session")
def fixture_project(tmp_path_factory) -> Path:
    project = tmp_path_factory.mktemp("project")
    build_project(project)
    return project


def make_road(
    osm_id: int = 1,
    highway_values: tuple = ("residential",),
    geometry=None,
    length_m: float = 120.0,
    matched_image_id: str | None = "img-1",
    extra_tags: dict | None = None,
) -> RoadSegment:
    history = []
    for i, value in enumerate(highway_values):
        tags = {"highway": value}
        if extra_tags and i == len(highway_values) - 1:
            tags.update(extra_tags)
        history.append(
            TagVersion(version=i + 1, tags=tags, timestamp=f"201{5 + i}-01-01T00:00:00Z")
        )
    return RoadSegment(
        osm_id=osm_id,
        geometry=geometry or [(-80.2, 25.77), (-80.199, 25.77)],
        history=history,
        length_m=length_m,
        matched_image_id=matched_image_id,
    )


def make_annotation(road_osm_id: int = 1, analyst_id: str = "analyst1", **kwargs) -> Annotation:
    defaults = dict(
        image_id="img-1",
        caption="A two-lane road with sidewalks and parked cars.",
        users=RoadUsers.CARS,
        lanes=2,
        surface="asphalt",
        oneway=YesNoUnknown.NO,
        lit=YesNoUnknown.YES,
    )
    defaults.update(kwargs)
    return Annotation(road_osm_id=road_osm_id, analyst_id=analyst_id, **defaults)


def read_jsonl(path: Path) -> list[dict]:
    return [
        json.loads(line)
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
