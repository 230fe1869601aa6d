"""Turn upstream API payloads into domain objects.

Two payload dialects are understood: Overpass-style element lists for map
data and way histories, and Graph-API-style ``{"data": [...]}`` lists for
images and detections. Field mapping is documented in docs/api-mapping.md.
"""

from __future__ import annotations

from datetime import datetime, timezone

from tagscout.errors import NotFoundError, PayloadParseError
from tagscout.geo import polyline_length_m
from tagscout.models import ObjectDetection, RoadSegment, StreetImage, TagVersion


def _iso_utc(value) -> str:
    """Normalize a timestamp (ISO string or epoch milliseconds) to ISO-8601 Z."""
    if isinstance(value, (int, float)):
        dt = datetime.fromtimestamp(value / 1000.0, tz=timezone.utc)
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        dt = dt.astimezone(timezone.utc)
    else:
        raise ValueError(f"unsupported timestamp: {value!r}")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def iso_to_epoch(iso: str) -> float:
    text = iso[:-1] + "+00:00" if iso.endswith("Z") else iso
    return datetime.fromisoformat(text).timestamp()


def _way_geometry(element: dict, element_id) -> list[tuple[float, float]]:
    points = element.get("geometry")
    if not isinstance(points, list) or len(points) < 2:
        raise PayloadParseError("way has no usable geometry", element_id)
    geometry = []
    for p in points:
        try:
            geometry.append((float(p["lon"]), float(p["lat"])))
        except (KeyError, TypeError, ValueError):
            raise PayloadParseError("way geometry vertex is malformed", element_id)
    return geometry


def parse_roads(payload: dict) -> list[RoadSegment]:
    """Overpass-style payload -> RoadSegments, sorted by osm_id.

    Non-way elements and ways without a highway tag are skipped (the upstream
    query selects highways, but cached payloads may carry extras). History
    starts as the single version present in the payload; fetch_tag_history
    replaces it.
    """
    if not isinstance(payload, dict) or not isinstance(payload.get("elements"), list):
        raise PayloadParseError("payload has no element list", None)
    roads = []
    for element in payload["elements"]:
        if not isinstance(element, dict) or element.get("type") != "way":
            continue
        element_id = element.get("id")
        if not isinstance(element_id, int):
            raise PayloadParseError("way element is missing an integer id", element_id)
        tags = element.get("tags") or {}
        if not isinstance(tags, dict):
            raise PayloadParseError("way tags are not a map", element_id)
        tags = {str(k): str(v) for k, v in tags.items()}
        if "highway" not in tags:
            continue
        geometry = _way_geometry(element, element_id)
        version = element.get("version", 1)
        if not isinstance(version, int) or version < 1:
            raise PayloadParseError("way version must be a positive integer", element_id)
        timestamp = _iso_utc(element.get("timestamp", "1970-01-01T00:00:00Z"))
        roads.append(
            RoadSegment(
                osm_id=element_id,
                geometry=geometry,
                history=[TagVersion(version=version, tags=tags, timestamp=timestamp)],
                length_m=polyline_length_m(geometry),
            )
        )
    roads.sort(key=lambda r: r.osm_id)
    return roads


def parse_history(payload: dict, osm_id: int) -> list[TagVersion]:
    """Way-history payload -> versions sorted ascending, strictly increasing."""
    if not isinstance(payload, dict) or not isinstance(payload.get("elements"), list):
        raise PayloadParseError("history payload has no element list", osm_id)
    entries = [
        e
        for e in payload["elements"]
        if isinstance(e, dict) and e.get("id", osm_id) == osm_id
    ]
    if not entries:
        raise NotFoundError(f"no history for way {osm_id}")
    versions = []
    for e in entries:
        v = e.get("version")
        if not isinstance(v, int) or v < 1:
            raise PayloadParseError("history version must be a positive integer", osm_id)
        tags = e.get("tags") or {}
        if not isinstance(tags, dict):
            raise PayloadParseError("history tags are not a map", osm_id)
        versions.append(
            TagVersion(
                version=v,
                tags={str(k): str(val) for k, val in tags.items()},
                timestamp=_iso_utc(e.get("timestamp", "1970-01-01T00:00:00Z")),
            )
        )
    versions.sort(key=lambda t: t.version)
    for prev, cur in zip(versions, versions[1:]):
        if cur.version <= prev.version:
            raise PayloadParseError("history versions are not strictly increasing", osm_id)
    return versions


def parse_images(payload: dict) -> list[StreetImage]:
    """Graph-API-style image payload -> StreetImages (detections left empty)."""
    if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
        raise PayloadParseError("image payload has no data list", None)
    images = []
    for item in payload["data"]:
        image_id = item.get("id")
        if not image_id:
            raise PayloadParseError("image entry is missing an id", None)
        image_id = str(image_id)
        geom = item.get("geometry") or {}
        coords = geom.get("coordinates")
        if not isinstance(coords, (list, tuple)) or len(coords) < 2:
            raise PayloadParseError("image has no point coordinates", image_id)
        bearing = item.get("compass_angle")
        if bearing is not None:
            bearing = float(bearing) % 360.0
        try:
            captured_at = _iso_utc(item["captured_at"])
        except (KeyError, ValueError, TypeError):
            raise PayloadParseError("image captured_at is missing or malformed", image_id)
        images.append(
            StreetImage(
                image_id=image_id,
                lon=float(coords[0]),
                lat=float(coords[1]),
                captured_at=captured_at,
                camera_bearing_deg=bearing,
            )
        )
    return images


def humanize_detection(value: str) -> str:
    """Detection taxonomy slug -> display label.

    "object--traffic-light--pedestrian" becomes "Traffic light - pedestrian":
    the taxonomy root is dropped, remaining segments lose their hyphens and
    join with " - ", and only the leading word is capitalized.
    """
    segments = [s for s in value.split("--") if s]
    if len(segments) > 1:
        segments = segments[1:]
    words = [seg.replace("-", " ").strip() for seg in segments]
    label = " - ".join(w for w in words if w)
    return label[:1].upper() + label[1:] if label else value


def parse_detections(payload: dict, image_id: str) -> list[ObjectDetection]:
    if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
        raise PayloadParseError("detections payload has no data list", image_id)
    detections = []
    for item in payload["data"]:
        value = item.get("value")
        if not value or not str(value).strip():
            raise PayloadParseError("detection entry has no value label", image_id)
        confidence = item.get("confidence")
        if confidence is not None:
            confidence = float(confidence)
            if not 0.0 <= confidence <= 1.0:
                raise PayloadParseError("detection confidence outside [0,1]", image_id)
        detections.append(
            ObjectDetection(object_name=humanize_detection(str(value)), confidence=confidence)
        )
    return detections
