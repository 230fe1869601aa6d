"""Domain types shared across the workbench modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from tagscout.errors import ValidationError


class PromptScenario(Enum):
    """The four prompt variants, in their fixed presentation order."""

    BASELINE = "baseline"
    LC = "lc"
    OD = "od"
    OD_LC = "od_lc"

    @property
    def label(self) -> str:
        return _SCENARIO_LABELS[self]

    @classmethod
    def from_token(cls, token: str) -> "PromptScenario":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValidationError(f"unknown scenario: {token!r}", ["scenario"])


_SCENARIO_LABELS = {
    PromptScenario.BASELINE: "Baseline",
    PromptScenario.LC: "LC",
    PromptScenario.OD: "OD",
    PromptScenario.OD_LC: "OD + LC",
}


class AnalystKind(str, Enum):
    HUMAN = "human"
    ARTIFICIAL = "artificial"


class RoadUsers(str, Enum):
    CARS = "cars"
    PEDESTRIANS = "pedestrians"
    BICYCLISTS = "bicyclists"
    MIXED = "mixed"
    UNKNOWN = "unknown"


class YesNoUnknown(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class ParseStatus(str, Enum):
    OK = "ok"
    RECOVERED = "recovered"
    FAILED = "failed"


@dataclass(frozen=True)
class BoundingBox:
    """WGS84 bounding box (decimal degrees)."""

    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float

    def __post_init__(self):
        problems = []
        if not (-180.0 <= self.min_lon <= 180.0 and -180.0 <= self.max_lon <= 180.0):
            problems.append("lon outside [-180, 180]")
        if not (-90.0 <= self.min_lat <= 90.0 and -90.0 <= self.max_lat <= 90.0):
            problems.append("lat outside [-90, 90]")
        if not self.min_lon < self.max_lon:
            problems.append("min_lon must be < max_lon")
        if not self.min_lat < self.max_lat:
            problems.append("min_lat must be < max_lat")
        if problems:
            raise ValidationError("invalid bounding box: " + "; ".join(problems), ["bbox"])

    def contains(self, lon: float, lat: float) -> bool:
        return self.min_lon <= lon <= self.max_lon and self.min_lat <= lat <= self.max_lat


@dataclass(frozen=True)
class TagVersion:
    """One version of a road's tag set."""

    version: int
    tags: dict[str, str]
    timestamp: str  # ISO-8601 UTC instant

    def highway(self) -> str | None:
        return self.tags.get("highway")


@dataclass
class RoadSegment:
    """An OSM-style road with geometry and full tag-version history."""

    osm_id: int
    geometry: list[tuple[float, float]]  # (lon, lat), >= 2 vertices
    history: list[TagVersion]
    length_m: float
    matched_image_id: str | None = None

    @property
    def current_tags(self) -> dict[str, str]:
        return self.history[-1].tags

    @property
    def current_version(self) -> TagVersion:
        return self.history[-1]


@dataclass(frozen=True)
class ObjectDetection:
    """One object class detected in a street-level image."""

    object_name: str
    confidence: float | None = None


@dataclass
class StreetImage:
    """A geotagged street-level photograph."""

    image_id: str
    lon: float
    lat: float
    captured_at: str  # ISO-8601 UTC instant
    camera_bearing_deg: float | None = None  # [0, 360) or unknown
    detections: list[ObjectDetection] = field(default_factory=list)


@dataclass(frozen=True)
class Analyst:
    analyst_id: str
    kind: AnalystKind
    display_name: str


@dataclass
class Annotation:
    """One analyst's caption and question answers for one road."""

    road_osm_id: int
    image_id: str
    analyst_id: str
    caption: str
    users: RoadUsers = RoadUsers.UNKNOWN
    lanes: int | None = None  # None = unknown
    surface: str = "unknown"
    oneway: YesNoUnknown = YesNoUnknown.UNKNOWN
    lit: YesNoUnknown = YesNoUnknown.UNKNOWN

    def to_record(self) -> dict:
        return {
            "road_osm_id": self.road_osm_id,
            "image_id": self.image_id,
            "analyst_id": self.analyst_id,
            "caption": self.caption,
            "users": self.users.value,
            "lanes": self.lanes,
            "surface": self.surface,
            "oneway": self.oneway.value,
            "lit": self.lit.value,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Annotation":
        return cls(
            road_osm_id=int(rec["road_osm_id"]),
            image_id=str(rec["image_id"]),
            analyst_id=str(rec["analyst_id"]),
            caption=rec["caption"],
            users=RoadUsers(rec.get("users", "unknown")),
            lanes=rec.get("lanes"),
            surface=rec.get("surface", "unknown"),
            oneway=YesNoUnknown(rec.get("oneway", "unknown")),
            lit=YesNoUnknown(rec.get("lit", "unknown")),
        )


@dataclass
class TagSuggestion:
    """One model response for a (road, analyst, scenario) triple."""

    road_osm_id: int
    analyst_id: str
    scenario: PromptScenario
    raw_response: str
    tags: dict
    parse_status: ParseStatus
    created_at: str
    missing_highway: bool = False

    @property
    def key(self) -> tuple[int, str, str]:
        return (self.road_osm_id, self.analyst_id, self.scenario.value)

    @property
    def suggestion_id(self) -> str:
        return f"{self.road_osm_id}:{self.analyst_id}:{self.scenario.value}"

    def to_record(self) -> dict:
        return {
            "road_osm_id": self.road_osm_id,
            "analyst_id": self.analyst_id,
            "scenario": self.scenario.value,
            "raw_response": self.raw_response,
            "tags": self.tags,
            "parse_status": self.parse_status.value,
            "missing_highway": self.missing_highway,
            "created_at": self.created_at,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TagSuggestion":
        return cls(
            road_osm_id=int(rec["road_osm_id"]),
            analyst_id=str(rec["analyst_id"]),
            scenario=PromptScenario(rec["scenario"]),
            raw_response=rec.get("raw_response", ""),
            tags=rec.get("tags", {}),
            parse_status=ParseStatus(rec.get("parse_status", "failed")),
            created_at=rec.get("created_at", ""),
            missing_highway=bool(rec.get("missing_highway", False)),
        )
