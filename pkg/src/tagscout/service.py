"""HTTP service for the review UI.

All read endpoints are computed from the project store on request, so the
browser never has to score anything itself; correctness badges, categories,
and report numbers all come from here.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from tagscout.annotation import question_set, validate_annotation
from tagscout.config import AppConfig
from tagscout.errors import (
    ConfigError,
    DuplicateError,
    NotFoundError,
    PreconditionError,
    TransportError,
    ValidationError,
)
from tagscout.evaluation import (
    accuracy_table,
    lit_report,
    semantic_category,
    suggestion_is_correct,
)
from tagscout.llm import AuditLog, ResponseCache, suggest_all
from tagscout.models import Annotation, PromptScenario, RoadSegment, TagSuggestion
from tagscout.prompts import PromptContext
from tagscout.store import REVIEW_VERDICTS, ProjectStore


class AnnotationIn(BaseModel):
    road_osm_id: int
    analyst_id: str
    image_id: str | None = None
    caption: str = ""
    users: str | None = None
    lanes: int | str | None = None
    surface: str | None = None
    oneway: str | None = None
    lit: str | None = None


class SuggestIn(BaseModel):
    analyst_id: str


class ReviewIn(BaseModel):
    verdict: str = Field(description="one of accept/reject/unsure")


def _road_or_404(store: ProjectStore, road_id: int) -> tuple[RoadSegment, list[RoadSegment]]:
    roads = store.load_roads()
    for road in roads:
        if road.osm_id == road_id:
            return road, roads
    raise NotFoundError(f"unknown road: {road_id}")


def _suggestion_view(s: TagSuggestion, road: RoadSegment, reviews: dict) -> dict:
    highway = s.tags.get("highway")
    view = s.to_record()
    view["suggestion_id"] = s.suggestion_id
    view["highway"] = highway
    view["semantic_category"] = semantic_category(highway).label if highway else None
    view["correct_historical"] = suggestion_is_correct(s, road, "historical")
    view["correct_semantic"] = suggestion_is_correct(s, road, "semantic")
    review = reviews.get(s.suggestion_id)
    view["verdict"] = review["verdict"] if review else None
    return view


def create_app(
    store: ProjectStore,
    config: AppConfig | None = None,
    backend=None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the app around one project store.

    `backend` is the chat backend used by POST /api/suggest and suggest
    jobs; without one those endpoints answer 503.
    """
    config = config or AppConfig()
    app = FastAPI(title="tagscout workbench", version="0.1.0")

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DuplicateError)
    async def _duplicate(request: Request, exc: DuplicateError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _invalid(request: Request, exc: ValidationError):
        return JSONResponse(
            status_code=422, content={"detail": str(exc), "fields": exc.fields}
        )

    @app.exception_handler(PreconditionError)
    async def _precondition(request: Request, exc: PreconditionError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(TransportError)
    async def _transport(request: Request, exc: TransportError):
        return JSONResponse(status_code=503, content={"detail": str(exc)})

    @app.exception_handler(ConfigError)
    async def _backend_config(request: Request, exc: ConfigError):
        return JSONResponse(status_code=503, content={"detail": str(exc)})

    # -- reads ------------------------------------------------------------

    @app.get("/api/questions")
    def get_questions():
        return [{"variable": q.variable, "text": q.text} for q in question_set()]

    @app.get("/api/analysts")
    def get_analysts():
        return [
            {"analyst_id": a.analyst_id, "kind": a.kind.value, "display_name": a.display_name}
            for a in store.load_analysts()
        ]

    @app.get("/api/roads")
    def list_roads():
        roads = store.load_roads()
        annotations = store.load_annotations()
        suggestions = store.load_suggestions()
        reviews = store.load_reviews()
        annotated = {}
        for a in annotations:
            annotated.setdefault(a.road_osm_id, set()).add(a.analyst_id)
        n_suggestions: dict[int, int] = {}
        n_reviewed: dict[int, int] = {}
        for s in suggestions:
            n_suggestions[s.road_osm_id] = n_suggestions.get(s.road_osm_id, 0) + 1
            if s.suggestion_id in reviews:
                n_reviewed[s.road_osm_id] = n_reviewed.get(s.road_osm_id, 0) + 1
        roster = [a.analyst_id for a in store.load_analysts()]
        return [
            {
                "osm_id": r.osm_id,
                "highway": r.current_tags.get("highway"),
                "length_m": round(r.length_m, 1),
                "matched_image_id": r.matched_image_id,
                "annotated_by": {
                    analyst_id: analyst_id in annotated.get(r.osm_id, set())
                    for analyst_id in roster
                },
                "n_suggestions": n_suggestions.get(r.osm_id, 0),
                "n_reviewed": n_reviewed.get(r.osm_id, 0),
            }
            for r in roads
        ]

    @app.get("/api/roads/{road_id}")
    def get_road(road_id: int):
        road, _ = _road_or_404(store, road_id)
        images = {img.image_id: img for img in store.load_images()}
        image = images.get(road.matched_image_id)
        detections = [d.object_name for d in image.detections] if image else []
        annotations = [
            a.to_record()
            for a in store.load_annotations()
            if a.road_osm_id == road_id
        ]
        return {
            "osm_id": road.osm_id,
            "geometry": [[lon, lat] for lon, lat in road.geometry],
            "tags": road.current_tags,
            "history": [
                {"version": v.version, "tags": v.tags, "timestamp": v.timestamp}
                for v in road.history
            ],
            "length_m": round(road.length_m, 1),
            "matched_image_id": road.matched_image_id,
            "image_url": (
                config.image_url_template.format(image_id=road.matched_image_id)
                if road.matched_image_id
                else None
            ),
            "detections": detections,
            "annotations": annotations,
        }

    @app.get("/api/suggestions")
    def get_suggestions(road: int):
        target, _ = _road_or_404(store, road)
        reviews = store.load_reviews()
        return [
            _suggestion_view(s, target, reviews)
            for s in store.load_suggestions()
            if s.road_osm_id == road
        ]

    @app.get("/api/report")
    def get_report(method: str = "historical"):
        if method not in ("historical", "semantic"):
            raise ValidationError("method must be historical or semantic", ["method"])
        suggestions = store.load_suggestions()
        if not suggestions:
            raise NotFoundError("no suggestions in project; run suggest first")
        roads = store.load_roads()
        roster = [a.analyst_id for a in store.load_analysts()]
        report = accuracy_table(suggestions, roads, method, analyst_order=roster)
        return report.to_json()

    @app.get("/api/lit-report")
    def get_lit_report():
        suggestions = store.load_suggestions()
        if not suggestions:
            raise NotFoundError("no suggestions in project; run suggest first")
        roads = store.load_roads()
        roster = [a.analyst_id for a in store.load_analysts()]
        return lit_report(suggestions, roads, analyst_order=roster).to_json()

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return store.get_job(job_id).to_record()

    # -- writes -----------------------------------------------------------

    @app.post("/api/annotations", status_code=201)
    def post_annotation(body: AnnotationIn):
        road, _ = _road_or_404(store, body.road_osm_id)
        roster = {a.analyst_id for a in store.load_analysts()}
        if body.analyst_id not in roster:
            raise ValidationError(
                f"unknown analyst: {body.analyst_id!r}", ["analyst_id"]
            )
        draft = Annotation(
            road_osm_id=body.road_osm_id,
            image_id=body.image_id or road.matched_image_id or "",
            analyst_id=body.analyst_id,
            caption=body.caption,
            users=body.users,
            lanes=body.lanes,
            surface=body.surface,
            oneway=body.oneway,
            lit=body.lit,
        )
        annotation = validate_annotation(draft)
        store.add_annotation(annotation)
        return annotation.to_record()

    def _run_suggestions(road: RoadSegment, analyst_ids: list[str]):
        if backend is None:
            raise TransportError("no chat backend configured; suggesting is disabled")
        annotations = [
            a for a in store.load_annotations() if a.road_osm_id == road.osm_id
        ]
        images = {img.image_id: img for img in store.load_images()}
        image = images.get(road.matched_image_id)
        ctx = PromptContext(
            location_text=config.location_text,
            detected_objects=[d.object_name for d in image.detections] if image else [],
        )
        suggestions = suggest_all(
            road,
            [a for a in annotations if a.analyst_id in analyst_ids],
            ctx,
            config.model_config(),
            backend,
            cache=ResponseCache(store.llm_cache_dir),
            audit=AuditLog(store.audit_path),
            analysts=analyst_ids,
        )
        store.save_suggestions(suggestions)
        return suggestions

    @app.post("/api/suggest/{road_id}", status_code=201)
    def post_suggest(road_id: int, body: SuggestIn):
        road, _ = _road_or_404(store, road_id)
        suggestions = _run_suggestions(road, [body.analyst_id])
        reviews = store.load_reviews()
        return [_suggestion_view(s, road, reviews) for s in suggestions]

    @app.post("/api/jobs", status_code=202)
    def post_job(body: dict):
        kind = body.get("kind")
        if kind != "suggest":
            raise ValidationError("only suggest jobs can be started here", ["kind"])
        if backend is None:
            raise TransportError("no chat backend configured; suggesting is disabled")
        roads = store.load_roads()
        roster = [a.analyst_id for a in store.load_analysts()]
        job = store.new_job("suggest")

        def _worker():
            store.update_job(job, status="running")
            processed = failed = 0
            for road in roads:
                try:
                    _run_suggestions(road, roster)
                    processed += 1
                except Exception:
                    failed += 1
                store.update_job(job, processed=processed, failed=failed)
            store.update_job(job, status="failed" if failed else "done")

        threading.Thread(target=_worker, daemon=True).start()
        return job.to_record()

    @app.post("/api/review/{suggestion_id}")
    def post_review(suggestion_id: str, body: ReviewIn):
        if body.verdict not in REVIEW_VERDICTS:
            raise ValidationError(
                f"verdict must be one of {', '.join(REVIEW_VERDICTS)}", ["verdict"]
            )
        return store.add_review(suggestion_id, body.verdict)

    # -- static UI ----------------------------------------------------------

    if frontend_dir is None and config.frontend_dir:
        frontend_dir = config.frontend_dir
    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
