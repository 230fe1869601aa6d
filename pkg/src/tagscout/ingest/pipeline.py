"""Ingest pipeline: fetch roads and imagery, apply the exclusion rules,
match each retained road to its representative image.

Exclusion rules: too short (< 50 m by default), service values that are not
drivable roads (bus_stop, proposed, construction), sidewalk footways,
access-restricted ways, and roads with no image within the match radius.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from tagscout.errors import NoCoverageError, ValidationError
from tagscout.geo import point_polyline_m
from tagscout.ingest.parse import (
    iso_to_epoch,
    parse_detections,
    parse_history,
    parse_images,
    parse_roads,
)
from tagscout.models import BoundingBox, RoadSegment, StreetImage, TagVersion

EXCLUDED_HIGHWAY_DEFAULT = frozenset({"bus_stop", "proposed", "construction"})
INACCESSIBLE_ACCESS_DEFAULT = frozenset({"private", "no"})


@dataclass
class IngestConfig:
    bbox: BoundingBox
    min_length_m: float = 50.0
    excluded_highway_values: frozenset = EXCLUDED_HIGHWAY_DEFAULT
    exclude_sidewalk_footways: bool = True
    match_radius_m: float = 25.0
    inaccessible_access_values: frozenset = INACCESSIBLE_ACCESS_DEFAULT
    max_in_flight: int = 4
    fetch_histories: bool = True
    fetch_detections: bool = True

    def __post_init__(self):
        if self.min_length_m <= 0:
            raise ValidationError("min_length_m must be > 0", ["min_length_m"])
        if self.match_radius_m <= 0:
            raise ValidationError("match_radius_m must be > 0", ["match_radius_m"])
        if self.max_in_flight < 1:
            raise ValidationError("max_in_flight must be >= 1", ["max_in_flight"])
        self.excluded_highway_values = frozenset(self.excluded_highway_values)
        self.inaccessible_access_values = frozenset(self.inaccessible_access_values)


def fetch_roads(bbox: BoundingBox, client) -> list[RoadSegment]:
    return parse_roads(client.fetch_map_payload(bbox))


def fetch_tag_history(osm_id: int, client) -> list[TagVersion]:
    return parse_history(client.fetch_history_payload(osm_id), osm_id)


def fetch_images(bbox: BoundingBox, client) -> list[StreetImage]:
    return parse_images(client.fetch_images_payload(bbox))


# ---------------------------------------------------------------------------
# geometry prescreen
# ---------------------------------------------------------------------------

_M_PER_DEG_LAT = 110000.0  # lower bound, keeps the margin conservative


def _expanded_bbox(geometry, radius_m: float):
    lons = [p[0] for p in geometry]
    lats = [p[1] for p in geometry]
    margin_lat = radius_m / _M_PER_DEG_LAT * 1.5
    max_abs_lat = min(max(abs(lats[0]), abs(lats[-1]), max(map(abs, lats))), 89.0)
    m_per_deg_lon = max(_M_PER_DEG_LAT * math.cos(math.radians(max_abs_lat)), 1.0)
    margin_lon = radius_m / m_per_deg_lon * 1.5
    return (
        min(lons) - margin_lon,
        min(lats) - margin_lat,
        max(lons) + margin_lon,
        max(lats) + margin_lat,
    )


def _candidates(road: RoadSegment, images, radius_m: float):
    west, south, east, north = _expanded_bbox(road.geometry, radius_m)
    return [
        img for img in images if west <= img.lon <= east and south <= img.lat <= north
    ]


def has_coverage(road: RoadSegment, images, radius_m: float) -> bool:
    for img in _candidates(road, images, radius_m):
        if point_polyline_m(img.lon, img.lat, road.geometry) <= radius_m:
            return True
    return False


def match_image_to_road(road: RoadSegment, images, config: IngestConfig) -> str:
    """The nearest image to the road polyline; ties go to the most recently
    captured image, then the lexicographically smallest id."""
    best = None
    for img in _candidates(road, images, config.match_radius_m):
        d = point_polyline_m(img.lon, img.lat, road.geometry)
        key = (d, -iso_to_epoch(img.captured_at), img.image_id)
        if best is None or key < best[0]:
            best = (key, img)
    if best is None or best[0][0] > config.match_radius_m:
        raise NoCoverageError(
            f"road {road.osm_id} has no image within {config.match_radius_m} m"
        )
    return best[1].image_id


# ---------------------------------------------------------------------------
# filtering
# ---------------------------------------------------------------------------


def exclusion_reason(road: RoadSegment, images, config: IngestConfig) -> str | None:
    """First rule the road violates, or None when it is retained."""
    tags = road.current_tags
    if tags.get("highway") in config.excluded_highway_values:
        return "excluded_highway"
    if (
        config.exclude_sidewalk_footways
        and tags.get("highway") == "footway"
        and tags.get("footway") == "sidewalk"
    ):
        return "sidewalk"
    if tags.get("access") in config.inaccessible_access_values:
        return "inaccessible"
    if road.length_m < config.min_length_m:
        return "short"
    if not has_coverage(road, images, config.match_radius_m):
        return "no_coverage"
    return None


def filter_roads(roads, images, config: IngestConfig) -> list[RoadSegment]:
    """Apply every exclusion rule; pure, and idempotent by construction."""
    return [r for r in roads if exclusion_reason(r, images, config) is None]


# ---------------------------------------------------------------------------
# full run
# ---------------------------------------------------------------------------


@dataclass
class IngestResult:
    roads: list[RoadSegment] = field(default_factory=list)
    images: list[StreetImage] = field(default_factory=list)
    excluded: dict = field(default_factory=dict)
    processed: int = 0
    failed: int = 0


def run_ingest(config: IngestConfig, map_client, image_client) -> IngestResult:
    """Fetch, filter, and match. Retained roads come back sorted by osm_id
    with full histories and a matched image; images carry their detections."""
    roads = fetch_roads(config.bbox, map_client)
    images = fetch_images(config.bbox, image_client)

    result = IngestResult(images=images, processed=len(roads))
    retained = []
    for road in roads:
        reason = exclusion_reason(road, images, config)
        if reason is None:
            retained.append(road)
        else:
            result.excluded[reason] = result.excluded.get(reason, 0) + 1

    def _hydrate(road: RoadSegment) -> RoadSegment:
        if config.fetch_histories:
            road.history = fetch_tag_history(road.osm_id, map_client)
        road.matched_image_id = match_image_to_road(road, images, config)
        return road

    if config.max_in_flight > 1 and len(retained) > 1:
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            retained = list(pool.map(_hydrate, retained))
    else:
        retained = [_hydrate(r) for r in retained]
    retained.sort(key=lambda r: r.osm_id)

    if config.fetch_detections:
        by_id = {img.image_id: img for img in images}
        matched_ids = sorted({r.matched_image_id for r in retained})

        def _detections(image_id: str):
            payload = image_client.fetch_detections_payload(image_id)
            return image_id, parse_detections(payload, image_id)

        if config.max_in_flight > 1 and len(matched_ids) > 1:
            with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
                fetched = list(pool.map(_detections, matched_ids))
        else:
            fetched = [_detections(i) for i in matched_ids]
        for image_id, detections in fetched:
            by_id[image_id].detections = detections

    result.roads = retained
    return result
