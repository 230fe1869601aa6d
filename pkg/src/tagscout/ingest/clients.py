"""Upstream data clients: map data (roads + way histories) and street
imagery (images + detections).

Every HTTP client takes an optional PayloadCache. Responses are written to
the cache verbatim, so a warmed cache replays the whole ingest offline; the
Recorded* clients read such payload files directly and never touch the
network.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import requests

from tagscout.errors import ConfigError, NotFoundError, TransportError
from tagscout.models import BoundingBox


class PayloadCache:
    """Verbatim response texts under a directory, one file per request key."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def get(self, key: str) -> str | None:
        path = self.root / key
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")

    def put(self, key: str, text: str) -> None:
        path = self.root / key
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)


def _bbox_slug(bbox: BoundingBox) -> str:
    return "bbox_{:.5f}_{:.5f}_{:.5f}_{:.5f}".format(
        bbox.min_lon, bbox.min_lat, bbox.max_lon, bbox.max_lat
    ).replace("-", "m").replace(".", "p")


class _HTTPBase:
    def __init__(
        self,
        session: requests.Session | None = None,
        cache: PayloadCache | None = None,
        timeout_s: float = 60.0,
        max_retries: int = 2,
        politeness_delay_s: float = 0.0,
    ):
        self.session = session or requests.Session()
        self.cache = cache
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.politeness_delay_s = politeness_delay_s

    def _request(self, cache_key: str, method: str, url: str, **kwargs) -> str:
        if self.cache is not None:
            hit = self.cache.get(cache_key)
            if hit is not None:
                return hit
        attempts = 0
        last: Exception | None = None
        while attempts <= self.max_retries:
            attempts += 1
            if self.politeness_delay_s and attempts == 1:
                time.sleep(self.politeness_delay_s)
            try:
                resp = self.session.request(method, url, timeout=self.timeout_s, **kwargs)
            except requests.RequestException as exc:
                last = TransportError(f"request to {url} failed: {exc}")
            else:
                if resp.status_code == 404:
                    raise NotFoundError(f"{url} returned 404")
                if resp.status_code == 429 or resp.status_code >= 500:
                    last = TransportError(f"{url} returned HTTP {resp.status_code}")
                elif resp.status_code >= 400:
                    raise ConfigError(
                        f"{url} rejected the request (HTTP {resp.status_code})"
                    )
                else:
                    if self.cache is not None:
                        self.cache.put(cache_key, resp.text)
                    return resp.text
            if attempts <= self.max_retries:
                time.sleep(0.5 * (2 ** (attempts - 1)))
        raise last if last is not None else TransportError(f"request to {url} failed")


class OverpassClient(_HTTPBase):
    """Overpass-style map data plus a versioned-way history endpoint."""

    def __init__(
        self,
        endpoint_url: str = "https://overpass-api.de/api/interpreter",
        history_endpoint_url: str = "https://api.openstreetmap.org/api/0.6",
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.endpoint_url = endpoint_url
        self.history_endpoint_url = history_endpoint_url.rstrip("/")

    def fetch_map_payload(self, bbox: BoundingBox) -> dict:
        query = (
            "[out:json][timeout:%d];"
            'way["highway"](%f,%f,%f,%f);'
            "out meta geom;"
        ) % (int(self.timeout_s), bbox.min_lat, bbox.min_lon, bbox.max_lat, bbox.max_lon)
        text = self._request(
            f"overpass_{_bbox_slug(bbox)}.json",
            "POST",
            self.endpoint_url,
            data={"data": query},
        )
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise TransportError(f"map data endpoint returned non-JSON: {exc}") from exc

    def fetch_history_payload(self, osm_id: int) -> dict:
        url = f"{self.history_endpoint_url}/way/{osm_id}/history.json"
        text = self._request(f"history_{osm_id}.json", "GET", url)
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise TransportError(f"history endpoint returned non-JSON: {exc}") from exc


class GraphImageClient(_HTTPBase):
    """Graph-API-style street imagery: images in a bbox, detections per image."""

    IMAGE_FIELDS = "id,geometry,captured_at,compass_angle"

    def __init__(
        self,
        endpoint_url: str = "https://graph.mapillary.com",
        access_token: str | None = None,
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.endpoint_url = endpoint_url.rstrip("/")
        self.access_token = access_token

    def _params(self, extra: dict) -> dict:
        params = dict(extra)
        if self.access_token:
            params["access_token"] = self.access_token
        return params

    def fetch_images_payload(self, bbox: BoundingBox) -> dict:
        params = self._params(
            {
                "bbox": f"{bbox.min_lon},{bbox.min_lat},{bbox.max_lon},{bbox.max_lat}",
                "fields": self.IMAGE_FIELDS,
            }
        )
        text = self._request(
            f"images_{_bbox_slug(bbox)}.json",
            "GET",
            f"{self.endpoint_url}/images",
            params=params,
        )
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise TransportError(f"image endpoint returned non-JSON: {exc}") from exc

    def fetch_detections_payload(self, image_id: str) -> dict:
        params = self._params({"fields": "value,confidence"})
        text = self._request(
            f"detections_{image_id}.json",
            "GET",
            f"{self.endpoint_url}/{image_id}/detections",
            params=params,
        )
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise TransportError(f"detections endpoint returned non-JSON: {exc}") from exc


class RecordedMapDataClient:
    """Map data served from cached payload files on disk.

    `osm_path` holds one Overpass-style payload; `histories_path` holds a map
    of way id -> history payload (the per-way responses merged into one file).
    """

    def __init__(self, osm_path: str | Path, histories_path: str | Path | None = None):
        with open(osm_path, encoding="utf-8") as f:
            self._map_payload = json.load(f)
        self._histories = {}
        if histories_path is not None:
            with open(histories_path, encoding="utf-8") as f:
                raw = json.load(f)
            self._histories = {int(k): v for k, v in raw.items()}

    def fetch_map_payload(self, bbox: BoundingBox) -> dict:
        return self._map_payload

    def fetch_history_payload(self, osm_id: int) -> dict:
        try:
            return self._histories[osm_id]
        except KeyError:
            raise NotFoundError(f"no recorded history for way {osm_id}")


class RecordedImageClient:
    """Street imagery served from cached payload files on disk."""

    def __init__(self, images_path: str | Path, detections_path: str | Path | None = None):
        with open(images_path, encoding="utf-8") as f:
            self._images_payload = json.load(f)
        self._detections = {}
        if detections_path is not None:
            with open(detections_path, encoding="utf-8") as f:
                self._detections = json.load(f)

    def fetch_images_payload(self, bbox: BoundingBox) -> dict:
        return self._images_payload

    def fetch_detections_payload(self, image_id: str) -> dict:
        return self._detections.get(image_id, {"data": []})
