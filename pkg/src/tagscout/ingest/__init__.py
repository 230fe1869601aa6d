"""Road and imagery ingest: upstream clients, payload parsing, exclusion
rules, and representative-image matching."""

from tagscout.ingest.clients import (
    GraphImageClient,
    OverpassClient,
    PayloadCache,
    RecordedImageClient,
    RecordedMapDataClient,
)
from tagscout.ingest.geojson import (
    read_images_geojson,
    read_roads_geojson,
    write_detections_jsonl,
    write_images_geojson,
    write_roads_geojson,
)
from tagscout.ingest.parse import (
    humanize_detection,
    parse_detections,
    parse_history,
    parse_images,
    parse_roads,
)
from tagscout.ingest.pipeline import (
    IngestConfig,
    IngestResult,
    exclusion_reason,
    fetch_images,
    fetch_roads,
    fetch_tag_history,
    filter_roads,
    has_coverage,
    match_image_to_road,
    run_ingest,
)

__all__ = [
    "GraphImageClient",
    "IngestConfig",
    "IngestResult",
    "OverpassClient",
    "PayloadCache",
    "RecordedImageClient",
    "RecordedMapDataClient",
    "exclusion_reason",
    "fetch_images",
    "fetch_roads",
    "fetch_tag_history",
    "filter_roads",
    "has_coverage",
    "humanize_detection",
    "match_image_to_road",
    "parse_detections",
    "parse_history",
    "parse_images",
    "parse_roads",
    "read_images_geojson",
    "read_roads_geojson",
    "run_ingest",
    "write_detections_jsonl",
    "write_images_geojson",
    "write_roads_geojson",
]
