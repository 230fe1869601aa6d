"""Project configuration: one TOML file, with environment-variable
overrides for secrets so tokens stay out of checked-in configs.

Recognized env vars: TAGSCOUT_LLM_API_KEY, TAGSCOUT_VISION_API_KEY,
TAGSCOUT_IMAGE_ACCESS_TOKEN.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from tagscout.errors import ConfigError
from tagscout.llm import ModelConfig
from tagscout.models import BoundingBox


@dataclass
class AppConfig:
    # ingest
    bbox: BoundingBox | None = None
    min_length_m: float = 50.0
    match_radius_m: float = 25.0
    excluded_highway_values: list = field(
        default_factory=lambda: ["bus_stop", "proposed", "construction"]
    )
    exclude_sidewalk_footways: bool = True
    inaccessible_access_values: list = field(default_factory=lambda: ["private", "no"])
    max_in_flight: int = 4
    overpass_url: str = "https://overpass-api.de/api/interpreter"
    history_url: str = "https://api.openstreetmap.org/api/0.6"
    images_url: str = "https://graph.mapillary.com"
    image_access_token: str | None = None
    image_url_template: str = "image://{image_id}"

    # llm
    llm_endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    llm_model_name: str = "gpt-3.5-turbo"
    llm_temperature: float = 0.0
    llm_max_retries: int = 3
    llm_timeout_s: float = 30.0
    llm_api_key: str | None = None
    location_text: str = "near Downtown Miami, Florida"

    # vision
    vision_endpoint_url: str | None = None
    vision_api_key: str | None = None

    # serve
    host: str = "127.0.0.1"
    port: int = 8000
    frontend_dir: str | None = None

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            endpoint_url=self.llm_endpoint_url,
            model_name=self.llm_model_name,
            temperature=self.llm_temperature,
            max_retries=self.llm_max_retries,
            timeout_s=self.llm_timeout_s,
            api_key=self.llm_api_key,
        )


def _bbox_from(value) -> BoundingBox:
    if isinstance(value, (list, tuple)) and len(value) == 4:
        return BoundingBox(*[float(v) for v in value])
    raise ConfigError(f"bbox must be [min_lon, min_lat, max_lon, max_lat], got {value!r}")


_SECTION_FIELDS = {
    "ingest": {
        "bbox",
        "min_length_m",
        "match_radius_m",
        "excluded_highway_values",
        "exclude_sidewalk_footways",
        "inaccessible_access_values",
        "max_in_flight",
        "overpass_url",
        "history_url",
        "images_url",
        "image_access_token",
        "image_url_template",
    },
    "llm": {
        "endpoint_url",
        "model_name",
        "temperature",
        "max_retries",
        "timeout_s",
        "api_key",
        "location_text",
    },
    "vision": {"endpoint_url", "api_key"},
    "serve": {"host", "port", "frontend_dir"},
}


def load_config(path: str | Path | None = None) -> AppConfig:
    cfg = AppConfig()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "rb") as f:
                data = tomli.load(f)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
        for section, keys in _SECTION_FIELDS.items():
            table = data.get(section, {})
            if not isinstance(table, dict):
                raise ConfigError(f"config section [{section}] must be a table")
            for key, value in table.items():
                if key not in keys:
                    raise ConfigError(f"unknown config key {section}.{key}")
                if section == "ingest" and key == "bbox":
                    cfg.bbox = _bbox_from(value)
                elif section == "ingest":
                    setattr(cfg, key, value)
                elif section == "llm":
                    attr = "location_text" if key == "location_text" else f"llm_{key}"
                    setattr(cfg, attr, value)
                elif section == "vision":
                    setattr(cfg, f"vision_{key}", value)
                else:
                    setattr(cfg, key, value)

    if os.environ.get("TAGSCOUT_LLM_API_KEY"):
        cfg.llm_api_key = os.environ["TAGSCOUT_LLM_API_KEY"]
    if os.environ.get("TAGSCOUT_VISION_API_KEY"):
        cfg.vision_api_key = os.environ["TAGSCOUT_VISION_API_KEY"]
    if os.environ.get("TAGSCOUT_IMAGE_ACCESS_TOKEN"):
        cfg.image_access_token = os.environ["TAGSCOUT_IMAGE_ACCESS_TOKEN"]
    return cfg
