"""Flat-file project store.

A project is a directory of reviewable artifacts (GeoJSON and JSONL), so
fixtures, exports, and live projects share one format. Mutations are
serialized through a single lock, journaled before the data file is
replaced atomically, and written in sorted order so identical state always
produces identical bytes.
"""

from __future__ import annotations

import json
import os
import shutil
import threading
from dataclasses import dataclass
from pathlib import Path

from tagscout.errors import DuplicateError, NotFoundError, ValidationError
from tagscout.ingest.geojson import (
    read_images_geojson,
    read_roads_geojson,
    write_detections_jsonl,
    write_images_geojson,
    write_roads_geojson,
)
from tagscout.llm import utcnow_iso
from tagscout.models import (
    Analyst,
    AnalystKind,
    Annotation,
    PromptScenario,
    TagSuggestion,
)

DEFAULT_ANALYSTS = [
    Analyst("blip2", AnalystKind.ARTIFICIAL, "BLIP-2"),
    Analyst("analyst1", AnalystKind.HUMAN, "Analyst #1"),
    Analyst("analyst2", AnalystKind.HUMAN, "Analyst #2"),
]

JOB_KINDS = ("ingest", "annotate_artificial", "suggest", "evaluate")
_JOB_TRANSITIONS = {
    "pending": {"running"},
    "running": {"done", "failed"},
    "done": set(),
    "failed": set(),
}

REVIEW_VERDICTS = ("accept", "reject", "unsure")

_SCENARIO_ORDER = {s.value: i for i, s in enumerate(PromptScenario)}


@dataclass
class JobRecord:
    job_id: str
    kind: str
    status: str = "pending"
    started_at: str | None = None
    finished_at: str | None = None
    processed: int = 0
    failed: int = 0

    def to_record(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "processed": self.processed,
            "failed": self.failed,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "JobRecord":
        return cls(**rec)


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


class ProjectStore:
    ARTIFACTS = (
        "roads.geojson",
        "images.geojson",
        "detections.jsonl",
        "annotations.jsonl",
        "suggestions.jsonl",
        "reviews.jsonl",
        "analysts.json",
    )

    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "reports").mkdir(exist_ok=True)
        elif not self.root.is_dir():
            raise NotFoundError(f"project directory not found: {self.root}")
        self._lock = threading.RLock()

    def path(self, name: str) -> Path:
        return self.root / name

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"

    @property
    def llm_cache_dir(self) -> Path:
        return self.root / "cache" / "llm"

    @property
    def http_cache_dir(self) -> Path:
        return self.root / "cache" / "http"

    @property
    def audit_path(self) -> Path:
        return self.root / "audit.jsonl"

    # -- journaled atomic writes ------------------------------------------

    def _journal(self, op: str, detail: dict) -> None:
        entry = _dump({"ts": utcnow_iso(), "op": op, **detail})
        with open(self.root / "journal.jsonl", "a", encoding="utf-8") as f:
            f.write(entry + "\n")
            f.flush()
            os.fsync(f.fileno())

    def _replace(self, name: str, text: str) -> None:
        path = self.path(name)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        tmp.replace(path)

    def _write_jsonl(self, name: str, records) -> None:
        self._replace(name, "".join(_dump(r) + "\n" for r in records))

    def _read_jsonl(self, name: str) -> list[dict]:
        path = self.path(name)
        if not path.exists():
            return []
        records = []
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    # -- ingest artifacts ---------------------------------------------------

    def save_ingest(self, roads, images) -> None:
        with self._lock:
            self._journal("save_ingest", {"roads": len(roads), "images": len(images)})
            write_roads_geojson(roads, self.path("roads.geojson"))
            write_images_geojson(images, self.path("images.geojson"))
            write_detections_jsonl(images, self.path("detections.jsonl"))

    def load_roads(self):
        path = self.path("roads.geojson")
        if not path.exists():
            raise NotFoundError(f"no roads in project (expected {path}); run ingest first")
        return read_roads_geojson(path)

    def load_images(self):
        path = self.path("images.geojson")
        if not path.exists():
            raise NotFoundError(f"no images in project (expected {path}); run ingest first")
        return read_images_geojson(path, self.path("detections.jsonl"))

    # -- analysts -------------------------------------------------------------

    def save_analysts(self, analysts: list[Analyst]) -> None:
        with self._lock:
            self._journal("save_analysts", {"n": len(analysts)})
            records = [
                {"analyst_id": a.analyst_id, "kind": a.kind.value, "display_name": a.display_name}
                for a in analysts
            ]
            self._replace("analysts.json", _dump(records) + "\n")

    def load_analysts(self) -> list[Analyst]:
        path = self.path("analysts.json")
        if not path.exists():
            return list(DEFAULT_ANALYSTS)
        with open(path, encoding="utf-8") as f:
            records = json.load(f)
        return [
            Analyst(r["analyst_id"], AnalystKind(r["kind"]), r["display_name"])
            for r in records
        ]

    # -- annotations ----------------------------------------------------------

    def load_annotations(self) -> list[Annotation]:
        return [Annotation.from_record(r) for r in self._read_jsonl("annotations.jsonl")]

    def _store_annotations(self, annotations: list[Annotation]) -> None:
        annotations.sort(key=lambda a: (a.road_osm_id, a.analyst_id))
        self._write_jsonl("annotations.jsonl", [a.to_record() for a in annotations])

    def add_annotation(self, annotation: Annotation, replace: bool = False) -> None:
        with self._lock:
            existing = self.load_annotations()
            key = (annotation.road_osm_id, annotation.analyst_id)
            dup = [a for a in existing if (a.road_osm_id, a.analyst_id) == key]
            if dup and not replace:
                raise DuplicateError(
                    f"road {key[0]} already annotated by analyst {key[1]!r}"
                )
            if dup:
                existing = [a for a in existing if (a.road_osm_id, a.analyst_id) != key]
            self._journal(
                "add_annotation", {"road": key[0], "analyst": key[1], "replace": replace}
            )
            existing.append(annotation)
            self._store_annotations(existing)

    def import_annotations(self, annotations: list[Annotation], replace: bool = False) -> int:
        """Bulk add; the whole batch is checked before anything is written."""
        with self._lock:
            existing = self.load_annotations()
            by_key = {(a.road_osm_id, a.analyst_id): a for a in existing}
            seen = set()
            for a in annotations:
                key = (a.road_osm_id, a.analyst_id)
                if key in seen:
                    raise DuplicateError(
                        f"import contains road {key[0]} twice for analyst {key[1]!r}"
                    )
                seen.add(key)
                if key in by_key and not replace:
                    raise DuplicateError(
                        f"road {key[0]} already annotated by analyst {key[1]!r}"
                    )
            self._journal("import_annotations", {"n": len(annotations), "replace": replace})
            by_key.update({(a.road_osm_id, a.analyst_id): a for a in annotations})
            self._store_annotations(list(by_key.values()))
            return len(annotations)

    # -- suggestions ------------------------------------------------------------

    def load_suggestions(self) -> list[TagSuggestion]:
        return [TagSuggestion.from_record(r) for r in self._read_jsonl("suggestions.jsonl")]

    def save_suggestions(self, suggestions: list[TagSuggestion]) -> None:
        """Merge by (road, analyst, scenario); newcomers win."""
        with self._lock:
            merged = {s.key: s for s in self.load_suggestions()}
            merged.update({s.key: s for s in suggestions})
            ordered = sorted(
                merged.values(),
                key=lambda s: (s.road_osm_id, s.analyst_id, _SCENARIO_ORDER[s.scenario.value]),
            )
            self._journal("save_suggestions", {"n": len(suggestions)})
            self._write_jsonl("suggestions.jsonl", [s.to_record() for s in ordered])

    def find_suggestion(self, suggestion_id: str) -> TagSuggestion:
        for s in self.load_suggestions():
            if s.suggestion_id == suggestion_id:
                return s
        raise NotFoundError(f"unknown suggestion: {suggestion_id}")

    # -- reviews ---------------------------------------------------------------

    def load_reviews(self) -> dict[str, dict]:
        return {r["suggestion_id"]: r for r in self._read_jsonl("reviews.jsonl")}

    def add_review(self, suggestion_id: str, verdict: str) -> dict:
        if verdict not in REVIEW_VERDICTS:
            raise ValidationError(
                f"verdict must be one of {', '.join(REVIEW_VERDICTS)}", ["verdict"]
            )
        with self._lock:
            self.find_suggestion(suggestion_id)  # 404 before write
            reviews = self.load_reviews()
            record = {"suggestion_id": suggestion_id, "verdict": verdict, "ts": utcnow_iso()}
            reviews[suggestion_id] = record
            self._journal("add_review", {"suggestion_id": suggestion_id, "verdict": verdict})
            self._write_jsonl(
                "reviews.jsonl", [reviews[k] for k in sorted(reviews)]
            )
            return record

    # -- jobs ---------------------------------------------------------------------

    def _load_jobs(self) -> dict[str, JobRecord]:
        path = self.path("jobs.json")
        if not path.exists():
            return {}
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        return {k: JobRecord.from_record(v) for k, v in raw.items()}

    def _store_jobs(self, jobs: dict[str, JobRecord]) -> None:
        self._replace(
            "jobs.json", _dump({k: jobs[k].to_record() for k in sorted(jobs)}) + "\n"
        )

    def new_job(self, kind: str) -> JobRecord:
        if kind not in JOB_KINDS:
            raise ValidationError(f"unknown job kind: {kind}", ["kind"])
        with self._lock:
            jobs = self._load_jobs()
            job = JobRecord(job_id=f"job-{len(jobs) + 1:04d}", kind=kind)
            jobs[job.job_id] = job
            self._store_jobs(jobs)
            return job

    def update_job(self, job: JobRecord, status: str | None = None, **counters) -> JobRecord:
        with self._lock:
            jobs = self._load_jobs()
            stored = jobs.get(job.job_id)
            if stored is None:
                raise NotFoundError(f"unknown job: {job.job_id}")
            if status is not None and status != stored.status:
                if status not in _JOB_TRANSITIONS.get(stored.status, set()):
                    raise ValidationError(
                        f"job cannot move from {stored.status} to {status}", ["status"]
                    )
                stored.status = status
                if status == "running":
                    stored.started_at = utcnow_iso()
                if status in ("done", "failed"):
                    stored.finished_at = utcnow_iso()
            for name, value in counters.items():
                if name not in ("processed", "failed"):
                    raise ValidationError(f"unknown job counter: {name}", [name])
                setattr(stored, name, value)
            self._store_jobs(jobs)
            job.__dict__.update(stored.__dict__)
            return stored

    def get_job(self, job_id: str) -> JobRecord:
        job = self._load_jobs().get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job: {job_id}")
        return job

    # -- export -----------------------------------------------------------------

    def export_artifacts(self, out_dir: str | Path) -> list[str]:
        """Copy every present artifact (plus reports) to another directory."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        copied = []
        with self._lock:
            for name in self.ARTIFACTS:
                src = self.path(name)
                if src.exists():
                    shutil.copyfile(src, out / name)
                    copied.append(name)
            if self.reports_dir.is_dir():
                for report in sorted(self.reports_dir.iterdir()):
                    if report.is_file():
                        (out / "reports").mkdir(exist_ok=True)
                        shutil.copyfile(report, out / "reports" / report.name)
                        copied.append(f"reports/{report.name}")
        return copied
