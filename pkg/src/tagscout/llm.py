"""Chat-model bridge: submit prompts, parse tag maps, orchestrate the
analyst x scenario suggestion matrix for each road.

Responses are cached on disk keyed by SHA-256 of (model name, prompt text),
so re-runs never re-bill and interrupted runs resume idempotently. Every
actual backend call is appended to an audit log.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import requests

from tagscout.errors import ConfigError, PreconditionError, TransportError, ValidationError
from tagscout.models import ParseStatus, PromptScenario, RoadSegment, TagSuggestion
from tagscout.prompts import Prompt, PromptContext, render_prompt

logger = logging.getLogger(__name__)


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class ModelConfig:
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    model_name: str = "gpt-3.5-turbo"
    temperature: float = 0.0  # pinned to 0 for reproducibility
    max_retries: int = 3
    timeout_s: float = 30.0
    api_key: str | None = None
    backoff_base_s: float = 0.5
    # send the preamble as a system message instead of inline user text
    system_preamble: bool = False

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValidationError(
                f"temperature must be in [0, 2], got {self.temperature}", ["temperature"]
            )
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0", ["max_retries"])


def prompt_messages(prompt: Prompt, cfg: ModelConfig) -> list[dict]:
    if cfg.system_preamble:
        from tagscout.prompts import PREAMBLE

        if prompt.text.startswith(PREAMBLE + "\n\n"):
            return [
                {"role": "system", "content": PREAMBLE},
                {"role": "user", "content": prompt.text[len(PREAMBLE) + 2 :]},
            ]
    return [{"role": "user", "content": prompt.text}]


# ---------------------------------------------------------------------------
# backends
# ---------------------------------------------------------------------------


class HTTPChatBackend:
    """Chat-completion wire format: messages array in, choices array out."""

    def __init__(self, session: requests.Session | None = None, min_interval_s: float = 0.0):
        self.session = session or requests.Session()
        self.min_interval_s = min_interval_s
        self._last_call = 0.0
        self._lock = threading.Lock()

    def _throttle(self):
        if self.min_interval_s <= 0:
            return
        with self._lock:
            wait = self._last_call + self.min_interval_s - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_call = time.monotonic()

    def complete(self, prompt: Prompt, cfg: ModelConfig) -> str:
        self._throttle()
        headers = {"Content-Type": "application/json"}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"
        payload = {
            "model": cfg.model_name,
            "messages": prompt_messages(prompt, cfg),
            "temperature": cfg.temperature,
        }
        try:
            resp = self.session.post(
                cfg.endpoint_url, json=payload, headers=headers, timeout=cfg.timeout_s
            )
        except requests.RequestException as exc:
            raise TransportError(f"chat backend unreachable: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"chat backend returned HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise ConfigError(
                f"chat backend rejected the request (HTTP {resp.status_code}): "
                f"{resp.text[:200]}"
            )
        try:
            body = resp.json()
            choice = body["choices"][0]
            if "message" in choice:
                return str(choice["message"]["content"])
            return str(choice["text"])
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed chat completion payload: {exc}") from exc


class MockChatBackend:
    """Deterministic canned responses keyed by "osmid|analyst|scenario".

    Loaded from a JSONL file of {"key": ..., "response": ...} records.
    A missing key raises unless a default response is configured.
    """

    def __init__(self, responses: dict[str, str], default: str | None = None):
        self.responses = responses
        self.default = default
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path, default: str | None = None) -> "MockChatBackend":
        responses = {}
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                responses[rec["key"]] = rec["response"]
        return cls(responses, default=default)

    @staticmethod
    def key_for(prompt: Prompt) -> str:
        return f"{prompt.road_osm_id}|{prompt.analyst_id}|{prompt.scenario.value}"

    def complete(self, prompt: Prompt, cfg: ModelConfig) -> str:
        self.calls += 1
        key = self.key_for(prompt)
        if key in self.responses:
            return self.responses[key]
        if self.default is not None:
            return self.default
        raise ConfigError(f"mock backend has no response for key {key!r}")


# ---------------------------------------------------------------------------
# cache and audit log
# ---------------------------------------------------------------------------


def response_cache_key(model_name: str, prompt_text: str) -> str:
    h = hashlib.sha256()
    h.update(model_name.encode("utf-8"))
    h.update(b"\x00")
    h.update(prompt_text.encode("utf-8"))
    return h.hexdigest()


class ResponseCache:
    """One JSON file per response under a cache directory; writes are atomic."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def get(self, key: str) -> dict | None:
        path = self.root / f"{key}.json"
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as f:
            return json.load(f)

    def put(self, key: str, entry: dict) -> None:
        path = self.root / f"{key}.json"
        tmp = path.with_suffix(".tmp")
        with self._lock:
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(entry, f, ensure_ascii=False)
            tmp.replace(path)


class AuditLog:
    """Append-only JSONL of every backend request/response."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line + "\n")

    def line_count(self) -> int:
        if not self.path.exists():
            return 0
        with open(self.path, encoding="utf-8") as f:
            return sum(1 for _ in f)


# ---------------------------------------------------------------------------
# completion with retries
# ---------------------------------------------------------------------------


def complete(
    prompt: Prompt,
    cfg: ModelConfig,
    backend,
    cache: ResponseCache | None = None,
    audit: AuditLog | None = None,
) -> tuple[str, str]:
    """One completion, retried with exponential backoff on transient errors.

    Returns (response_text, created_at). Cache hits are served without a
    backend call and keep their original creation timestamp.
    """
    key = response_cache_key(cfg.model_name, prompt.text)
    if cache is not None:
        entry = cache.get(key)
        if entry is not None:
            return entry["response"], entry["created_at"]

    attempts = 0
    last_error: Exception | None = None
    while attempts <= cfg.max_retries:
        attempts += 1
        try:
            response = backend.complete(prompt, cfg)
            created_at = utcnow_iso()
            if audit is not None:
                audit.append(
                    {
                        "ts": created_at,
                        "road_osm_id": prompt.road_osm_id,
                        "analyst_id": prompt.analyst_id,
                        "scenario": prompt.scenario.value,
                        "model": cfg.model_name,
                        "prompt_sha256": key,
                        "attempt": attempts,
                        "status": "ok",
                        "response": response,
                    }
                )
            if cache is not None:
                cache.put(
                    key,
                    {
                        "model": cfg.model_name,
                        "prompt_sha256": key,
                        "response": response,
                        "created_at": created_at,
                    },
                )
            return response, created_at
        except ConfigError:
            raise
        except TransportError as exc:
            last_error = exc
            if audit is not None:
                audit.append(
                    {
                        "ts": utcnow_iso(),
                        "road_osm_id": prompt.road_osm_id,
                        "analyst_id": prompt.analyst_id,
                        "scenario": prompt.scenario.value,
                        "model": cfg.model_name,
                        "prompt_sha256": key,
                        "attempt": attempts,
                        "status": "error",
                        "error": str(exc),
                    }
                )
            if attempts <= cfg.max_retries:
                time.sleep(cfg.backoff_base_s * (2 ** (attempts - 1)))
    raise TransportError(
        f"chat backend failed after {attempts} attempt(s): {last_error}"
    )


# ---------------------------------------------------------------------------
# response parsing
# ---------------------------------------------------------------------------


def _balanced_spans(text: str):
    """Yield candidate {...} spans, outermost first, respecting JSON strings."""
    i = 0
    n = len(text)
    while i < n:
        if text[i] != "{":
            i += 1
            continue
        depth = 0
        in_string = False
        escaped = False
        for j in range(i, n):
            c = text[j]
            if in_string:
                if escaped:
                    escaped = False
                elif c == "\\":
                    escaped = True
                elif c == '"':
                    in_string = False
                continue
            if c == '"':
                in_string = True
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    yield text[i : j + 1]
                    break
        else:
            return  # unbalanced to end of text
        i += 1


def _normalize_tags(obj: dict) -> dict | None:
    """Lowercase keys, keep scalar values; None means the object was rejected
    (nested structures) or carried no usable tags."""
    tags: dict = {}
    for k, v in obj.items():
        if isinstance(v, (dict, list)):
            return None  # flat key-value pairs only
        if v is None:
            continue
        if isinstance(v, float) and not v.is_integer():
            v = str(v)
        elif isinstance(v, float):
            v = int(v)
        tags[str(k).strip().lower()] = v
    return tags or None


def extract_tag_map(raw) -> tuple[dict, ParseStatus]:
    """Extract a flat tag map from a model response. Total: never raises.

    ok: the entire trimmed response is one flat JSON object.
    recovered: a flat JSON object was found inside fences or prose (first
    balanced brace span that parses wins).
    failed: nothing parseable, an empty object, or nested structures.
    """
    if not isinstance(raw, str) or not raw.strip():
        return {}, ParseStatus.FAILED
    text = raw.strip()
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, ValueError):
        obj = None
    if isinstance(obj, dict):
        tags = _normalize_tags(obj)
        return (tags, ParseStatus.OK) if tags else ({}, ParseStatus.FAILED)

    for span in _balanced_spans(text):
        try:
            candidate = json.loads(span)
        except (json.JSONDecodeError, ValueError):
            continue
        if isinstance(candidate, dict):
            tags = _normalize_tags(candidate)
            return (tags, ParseStatus.RECOVERED) if tags else ({}, ParseStatus.FAILED)
    return {}, ParseStatus.FAILED


def serialize_tag_map(tags: dict) -> str:
    """Inverse of extract_tag_map for flat maps (used by round-trip checks)."""
    return json.dumps(tags, ensure_ascii=False)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def build_suggestion(
    road_osm_id: int,
    analyst_id: str,
    scenario: PromptScenario,
    raw_response: str,
    created_at: str,
) -> TagSuggestion:
    tags, status = extract_tag_map(raw_response)
    return TagSuggestion(
        road_osm_id=road_osm_id,
        analyst_id=analyst_id,
        scenario=scenario,
        raw_response=raw_response,
        tags=tags,
        parse_status=status,
        created_at=created_at,
        missing_highway=(status is not ParseStatus.FAILED and "highway" not in tags),
    )


def suggest_all(
    road: RoadSegment,
    annotations,
    ctx: PromptContext,
    cfg: ModelConfig,
    backend,
    cache: ResponseCache | None = None,
    audit: AuditLog | None = None,
    analysts: list[str] | None = None,
    scenarios: list[PromptScenario] | None = None,
) -> list[TagSuggestion]:
    """Run every analyst x scenario prompt for one road.

    Requires one annotation per analyst (exactly three when no roster is
    given). Iteration order is analyst id, then scenario order, so output
    is deterministic. Backend failures are recorded as failed suggestions,
    not raised.
    """
    by_analyst = {}
    for a in annotations:
        if a.road_osm_id != road.osm_id:
            raise PreconditionError(
                f"annotation for road {a.road_osm_id} passed to road {road.osm_id}"
            )
        by_analyst[a.analyst_id] = a

    if analysts is not None:
        missing = sorted(set(analysts) - set(by_analyst))
        if missing:
            raise PreconditionError(
                f"road {road.osm_id} is missing annotations from analyst(s): "
                + ", ".join(missing)
            )
        roster = sorted(analysts)
    else:
        if len(by_analyst) != 3:
            raise PreconditionError(
                f"road {road.osm_id} needs annotations from exactly 3 analysts, "
                f"got {len(by_analyst)} ({sorted(by_analyst)})"
            )
        roster = sorted(by_analyst)

    if scenarios is None:
        scenarios = list(PromptScenario)
    suggestions = []
    for analyst_id in roster:
        annotation = by_analyst[analyst_id]
        for scenario in scenarios:
            prompt = render_prompt(annotation, scenario, ctx)
            try:
                response, created_at = complete(prompt, cfg, backend, cache=cache, audit=audit)
            except (TransportError, ConfigError) as exc:
                logger.warning(
                    "suggestion failed for road=%s analyst=%s scenario=%s: %s",
                    road.osm_id, analyst_id, scenario.value, exc,
                )
                response, created_at = "", utcnow_iso()
            suggestions.append(
                build_suggestion(road.osm_id, analyst_id, scenario, response, created_at)
            )
    return suggestions
