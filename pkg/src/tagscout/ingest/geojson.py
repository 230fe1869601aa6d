"""Deterministic writers for the ingest artifacts.

All output is sorted and serialized with sorted keys so that repeated runs
over the same inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from tagscout.models import RoadSegment, StreetImage


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def road_feature(road: RoadSegment) -> dict:
    return {
        "type": "Feature",
        "geometry": {
            "type": "LineString",
            "coordinates": [[lon, lat] for lon, lat in road.geometry],
        },
        "properties": {
            "osm_id": road.osm_id,
            "tags": road.current_tags,
            "history": [
                {"version": v.version, "tags": v.tags, "timestamp": v.timestamp}
                for v in road.history
            ],
            "matched_image_id": road.matched_image_id,
            "length_m": round(road.length_m, 3),
        },
    }


def write_roads_geojson(roads, path: str | Path) -> None:
    features = [road_feature(r) for r in sorted(roads, key=lambda r: r.osm_id)]
    collection = {"type": "FeatureCollection", "features": features}
    Path(path).write_text(_dump(collection) + "\n", encoding="utf-8")


def image_feature(image: StreetImage) -> dict:
    return {
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [image.lon, image.lat]},
        "properties": {
            "image_id": image.image_id,
            "captured_at": image.captured_at,
            "camera_bearing_deg": image.camera_bearing_deg,
        },
    }


def write_images_geojson(images, path: str | Path) -> None:
    features = [image_feature(i) for i in sorted(images, key=lambda i: i.image_id)]
    collection = {"type": "FeatureCollection", "features": features}
    Path(path).write_text(_dump(collection) + "\n", encoding="utf-8")


def write_detections_jsonl(images, path: str | Path) -> None:
    """One line per image that has detections: image_id plus its labels."""
    lines = []
    for image in sorted(images, key=lambda i: i.image_id):
        if not image.detections:
            continue
        lines.append(
            _dump(
                {
                    "image_id": image.image_id,
                    "detections": [
                        {"object_name": d.object_name, "confidence": d.confidence}
                        for d in image.detections
                    ],
                }
            )
        )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_roads_geojson(path: str | Path) -> list[RoadSegment]:
    """Inverse of write_roads_geojson, used when later stages reload a project."""
    from tagscout.models import TagVersion

    with open(path, encoding="utf-8") as f:
        collection = json.load(f)
    roads = []
    for feature in collection.get("features", []):
        props = feature["properties"]
        geometry = [tuple(xy) for xy in feature["geometry"]["coordinates"]]
        history = [
            TagVersion(version=h["version"], tags=h["tags"], timestamp=h["timestamp"])
            for h in props["history"]
        ]
        roads.append(
            RoadSegment(
                osm_id=props["osm_id"],
                geometry=geometry,
                history=history,
                length_m=props["length_m"],
                matched_image_id=props.get("matched_image_id"),
            )
        )
    return roads


def read_images_geojson(path: str | Path, detections_path: str | Path | None = None) -> list[StreetImage]:
    from tagscout.models import ObjectDetection

    with open(path, encoding="utf-8") as f:
        collection = json.load(f)
    detections_by_image = {}
    if detections_path is not None and Path(detections_path).exists():
        with open(detections_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                detections_by_image[rec["image_id"]] = [
                    ObjectDetection(object_name=d["object_name"], confidence=d.get("confidence"))
                    for d in rec["detections"]
                ]
    images = []
    for feature in collection.get("features", []):
        props = feature["properties"]
        lon, lat = feature["geometry"]["coordinates"]
        images.append(
            StreetImage(
                image_id=props["image_id"],
                lon=lon,
                lat=lat,
                captured_at=props["captured_at"],
                camera_bearing_deg=props.get("camera_bearing_deg"),
                detections=detections_by_image.get(props["image_id"], []),
            )
        )
    return images
