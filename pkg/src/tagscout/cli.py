"""Command-line entry point.

Subcommands mirror the pipeline stages: ingest, annotate (import/export/
auto), suggest, evaluate, lit-report, serve, export. Exit codes: 0 on
success, 1 on operational failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from tagscout.annotation import artificial_annotate, validate_annotation
from tagscout.config import AppConfig, load_config
from tagscout.errors import ConfigError, TagscoutError
from tagscout.evaluation import (
    accuracy_table,
    lit_report,
    render_lit_csv,
    render_report_csv,
    render_report_text,
)
from tagscout.ingest import (
    GraphImageClient,
    IngestConfig,
    OverpassClient,
    PayloadCache,
    RecordedImageClient,
    RecordedMapDataClient,
    run_ingest,
)
from tagscout.llm import (
    AuditLog,
    HTTPChatBackend,
    MockChatBackend,
    ResponseCache,
    suggest_all,
)
from tagscout.models import Annotation, BoundingBox, PromptScenario
from tagscout.prompts import PromptContext
from tagscout.store import ProjectStore
from tagscout.vision import CannedVisionClient, HTTPVisionClient


def _bbox_arg(text: str) -> BoundingBox:
    try:
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError
        return BoundingBox(*parts)
    except (ValueError, TagscoutError):
        raise argparse.ArgumentTypeError(
            f"bbox must be min_lon,min_lat,max_lon,max_lat with "
            f"min < max on both axes, got {text!r}"
        )


def _scenario_arg(token: str) -> list[PromptScenario]:
    if token == "all":
        return list(PromptScenario)
    return [PromptScenario.from_token(token)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tagscout",
        description="Road tagging suggestions from street-level imagery and chat models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--project", default=".", help="project directory (default: .)")
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument(
            "--offline",
            action="store_true",
            help="forbid network use; require recorded fixtures / mock backends",
        )
        return p

    p = common(sub.add_parser("ingest", help="fetch roads and imagery, filter, match"))
    p.add_argument("--bbox", type=_bbox_arg, default=None, help="min_lon,min_lat,max_lon,max_lat")
    p.add_argument("--osm-fixture", default=None, help="recorded map payload JSON")
    p.add_argument("--histories-fixture", default=None, help="recorded way histories JSON")
    p.add_argument("--images-fixture", default=None, help="recorded image payload JSON")
    p.add_argument("--detections-fixture", default=None, help="recorded detections JSON")

    p = common(sub.add_parser("annotate", help="manage analyst annotations"))
    p.add_argument("mode", choices=["import", "export", "auto"])
    p.add_argument("--file", default=None, help="annotations JSONL (import)")
    p.add_argument("--out", default=None, help="output path (export)")
    p.add_argument("--replace", action="store_true", help="overwrite existing annotations")
    p.add_argument("--analyst", default="blip2", help="analyst id for auto mode")
    p.add_argument("--canned", default=None, help="canned vision answers JSON (auto)")
    p.add_argument("--vision-endpoint", default=None, help="vision backend URL (auto)")

    p = common(sub.add_parser("suggest", help="run the analyst x scenario prompt matrix"))
    p.add_argument("--backend", choices=["mock", "http"], default=None)
    p.add_argument("--mock-file", default=None, help="mock responses JSONL")
    p.add_argument("--scenario", default="all", help="all or one of baseline/lc/od/od_lc")
    p.add_argument("--analyst", default=None, help="restrict to one analyst id")

    p = common(sub.add_parser("evaluate", help="score suggestions and write reports"))
    p.add_argument("--method", choices=["historical", "semantic", "both"], default="both")
    p.add_argument(
        "--current-only",
        action="store_true",
        help="semantic scoring against current tags only (not full history)",
    )

    p = common(sub.add_parser("lit-report", help="street-lighting suggestion report"))
    p.add_argument("--scenario", default="od", help="scenario to take lit tags from")

    p = common(sub.add_parser("serve", help="run the review HTTP service"))
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--frontend", default=None, help="built UI asset directory")
    p.add_argument("--backend", choices=["mock", "http"], default=None)
    p.add_argument("--mock-file", default=None, help="mock responses JSONL")

    p = common(sub.add_parser("export", help="copy project artifacts and the task list"))
    p.add_argument("--out", required=True, help="destination directory")

    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_ingest(args, store: ProjectStore, cfg: AppConfig) -> int:
    if args.osm_fixture:
        map_client = RecordedMapDataClient(args.osm_fixture, args.histories_fixture)
    elif args.offline:
        raise ConfigError("offline ingest needs --osm-fixture (and --images-fixture)")
    else:
        map_client = OverpassClient(
            endpoint_url=cfg.overpass_url,
            history_endpoint_url=cfg.history_url,
            cache=PayloadCache(store.http_cache_dir),
        )
    if args.images_fixture:
        image_client = RecordedImageClient(args.images_fixture, args.detections_fixture)
    elif args.offline:
        raise ConfigError("offline ingest needs --images-fixture")
    else:
        image_client = GraphImageClient(
            endpoint_url=cfg.images_url,
            access_token=cfg.image_access_token,
            cache=PayloadCache(store.http_cache_dir),
        )

    bbox = args.bbox or cfg.bbox
    if bbox is None:
        if args.osm_fixture:
            bbox = BoundingBox(-180.0, -90.0, 180.0, 90.0)
        else:
            raise ConfigError("no bounding box: pass --bbox or set ingest.bbox in config")
    ingest_cfg = IngestConfig(
        bbox=bbox,
        min_length_m=cfg.min_length_m,
        match_radius_m=cfg.match_radius_m,
        excluded_highway_values=frozenset(cfg.excluded_highway_values),
        exclude_sidewalk_footways=cfg.exclude_sidewalk_footways,
        inaccessible_access_values=frozenset(cfg.inaccessible_access_values),
        max_in_flight=cfg.max_in_flight,
    )

    job = store.new_job("ingest")
    store.update_job(job, status="running")
    try:
        result = run_ingest(ingest_cfg, map_client, image_client)
    except Exception:
        store.update_job(job, status="failed")
        raise
    store.save_ingest(result.roads, result.images)
    store.update_job(job, status="done", processed=result.processed, failed=0)

    print(f"fetched {result.processed} roads, {len(result.images)} images")
    print(f"retained {len(result.roads)} roads")
    for reason in sorted(result.excluded):
        print(f"  excluded ({reason}): {result.excluded[reason]}")
    return 0


def _cmd_annotate(args, store: ProjectStore, cfg: AppConfig) -> int:
    if args.mode == "import":
        if not args.file:
            raise ConfigError("annotate import needs --file")
        annotations = []
        with open(args.file, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    annotations.append(
                        validate_annotation(Annotation.from_record(json.loads(line)))
                    )
        n = store.import_annotations(annotations, replace=args.replace)
        print(f"imported {n} annotations")
        return 0

    if args.mode == "export":
        src = store.path("annotations.jsonl")
        if not src.exists():
            raise ConfigError("project has no annotations to export")
        if args.out:
            shutil.copyfile(src, args.out)
            print(f"exported {args.out}")
        else:
            sys.stdout.write(src.read_text(encoding="utf-8"))
        return 0

    # auto: artificial analyst over every road missing this analyst's annotation
    if args.canned:
        vision = CannedVisionClient.from_file(args.canned)
    elif args.offline or not (args.vision_endpoint or cfg.vision_endpoint_url):
        raise ConfigError("annotate auto needs --canned (or a vision endpoint when online)")
    else:
        vision = HTTPVisionClient(
            endpoint_url=args.vision_endpoint or cfg.vision_endpoint_url,
            api_key=cfg.vision_api_key,
        )

    roads = store.load_roads()
    images = {img.image_id: img for img in store.load_images()}
    done = {
        (a.road_osm_id, a.analyst_id): a
        for a in store.load_annotations()
    }
    job = store.new_job("annotate_artificial")
    store.update_job(job, status="running")
    processed = failed = 0
    for road in roads:
        if (road.osm_id, args.analyst) in done:
            continue
        image = images.get(road.matched_image_id)
        if image is None:
            failed += 1
            print(f"road {road.osm_id}: matched image missing, skipped", file=sys.stderr)
            continue
        try:
            annotation = artificial_annotate(image, vision, road.osm_id, args.analyst)
            store.add_annotation(annotation)
            processed += 1
        except TagscoutError as exc:
            failed += 1
            print(f"road {road.osm_id}: {exc}", file=sys.stderr)
    store.update_job(
        job, status="failed" if failed else "done", processed=processed, failed=failed
    )
    print(f"annotated {processed} roads as {args.analyst!r}, {failed} failed")
    return 1 if failed else 0


def _cmd_suggest(args, store: ProjectStore, cfg: AppConfig) -> int:
    backend_kind = args.backend or ("mock" if args.offline else "http")
    if args.offline and backend_kind != "mock":
        raise ConfigError("offline mode requires --backend mock")
    if backend_kind == "mock":
        if not args.mock_file:
            raise ConfigError("mock backend needs --mock-file")
        backend = MockChatBackend.from_file(args.mock_file)
    else:
        backend = HTTPChatBackend()

    scenarios = _scenario_arg(args.scenario)
    roads = store.load_roads()
    annotations = store.load_annotations()
    by_road: dict[int, list[Annotation]] = {}
    for a in annotations:
        by_road.setdefault(a.road_osm_id, []).append(a)
    roster = [a.analyst_id for a in store.load_analysts()]
    if args.analyst:
        if args.analyst not in roster:
            raise ConfigError(f"unknown analyst: {args.analyst!r}")
        roster = [args.analyst]
    images = {img.image_id: img for img in store.load_images()}
    model_cfg = cfg.model_config()
    cache = ResponseCache(store.llm_cache_dir)
    audit = AuditLog(store.audit_path)

    job = store.new_job("suggest")
    store.update_job(job, status="running")
    processed = failed = 0
    total = 0
    for road in roads:
        image = images.get(road.matched_image_id)
        ctx = PromptContext(
            location_text=cfg.location_text,
            detected_objects=[d.object_name for d in image.detections] if image else [],
        )
        try:
            suggestions = suggest_all(
                road,
                by_road.get(road.osm_id, []),
                ctx,
                model_cfg,
                backend,
                cache=cache,
                audit=audit,
                analysts=roster,
                scenarios=scenarios,
            )
            store.save_suggestions(suggestions)
            processed += 1
            total += len(suggestions)
        except TagscoutError as exc:
            failed += 1
            print(f"road {road.osm_id}: {exc}", file=sys.stderr)
    store.update_job(
        job, status="failed" if failed else "done", processed=processed, failed=failed
    )
    print(f"suggested for {processed} roads ({total} suggestions), {failed} failed")
    return 1 if failed else 0


def _cmd_evaluate(args, store: ProjectStore, cfg: AppConfig) -> int:
    suggestions = store.load_suggestions()
    if not suggestions:
        raise ConfigError("project has no suggestions; run suggest first")
    roads = store.load_roads()
    analysts = store.load_analysts()
    roster = [a.analyst_id for a in analysts]
    names = {a.analyst_id: a.display_name for a in analysts}

    methods = ["historical", "semantic"] if args.method == "both" else [args.method]
    job = store.new_job("evaluate")
    store.update_job(job, status="running")
    texts = []
    for method in methods:
        report = accuracy_table(
            suggestions,
            roads,
            method,
            analyst_order=roster,
            semantic_current_only=args.current_only,
        )
        csv_path = store.reports_dir / f"report_{method}.csv"
        csv_path.write_text(render_report_csv(report, names), encoding="utf-8")
        (store.reports_dir / f"report_{method}.json").write_text(
            json.dumps(report.to_json(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        texts.append(render_report_text(report, names))
    (store.reports_dir / "report.txt").write_text("\n".join(texts), encoding="utf-8")
    store.update_job(job, status="done", processed=len(methods))
    print("\n".join(texts), end="")
    return 0


def _cmd_lit_report(args, store: ProjectStore, cfg: AppConfig) -> int:
    suggestions = store.load_suggestions()
    if not suggestions:
        raise ConfigError("project has no suggestions; run suggest first")
    roads = store.load_roads()
    analysts = store.load_analysts()
    names = {a.analyst_id: a.display_name for a in analysts}
    scenario = PromptScenario.from_token(args.scenario)
    report = lit_report(
        suggestions, roads, scenario=scenario, analyst_order=[a.analyst_id for a in analysts]
    )
    csv_text = render_lit_csv(report, names)
    (store.reports_dir / "lit_report.csv").write_text(csv_text, encoding="utf-8")
    print(csv_text, end="")
    return 0


def _cmd_serve(args, store: ProjectStore, cfg: AppConfig) -> int:
    import uvicorn

    from tagscout.service import create_app

    backend = None
    backend_kind = args.backend or ("mock" if args.offline else "http")
    if backend_kind == "mock":
        if args.mock_file:
            backend = MockChatBackend.from_file(args.mock_file)
    else:
        backend = HTTPChatBackend()

    frontend = args.frontend or cfg.frontend_dir
    if frontend is None and Path("frontend/dist").is_dir():
        frontend = "frontend/dist"
    app = create_app(store, config=cfg, backend=backend, frontend_dir=frontend)
    uvicorn.run(app, host=args.host or cfg.host, port=args.port or cfg.port, log_level="warning")
    return 0


def _cmd_export(args, store: ProjectStore, cfg: AppConfig) -> int:
    copied = store.export_artifacts(args.out)

    # accepted suggestions become an editor-ready task list
    reviews = store.load_reviews()
    accepted = {
        sid for sid, r in reviews.items() if r["verdict"] == "accept"
    }
    features = []
    if accepted:
        roads = {r.osm_id: r for r in store.load_roads()}
        for s in store.load_suggestions():
            if s.suggestion_id not in accepted:
                continue
            road = roads.get(s.road_osm_id)
            if road is None:
                continue
            features.append(
                {
                    "type": "Feature",
                    "geometry": {
                        "type": "LineString",
                        "coordinates": [[lon, lat] for lon, lat in road.geometry],
                    },
                    "properties": {
                        "osm_id": s.road_osm_id,
                        "analyst_id": s.analyst_id,
                        "scenario": s.scenario.value,
                        "suggested_tags": s.tags,
                        "current_tags": road.current_tags,
                    },
                }
            )
    tasks = {"type": "FeatureCollection", "features": features}
    out = Path(args.out)
    (out / "tasks.geojson").write_text(
        json.dumps(tasks, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8"
    )
    copied.append("tasks.geojson")
    print(f"exported {len(copied)} artifact(s) to {out}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "annotate": _cmd_annotate,
    "suggest": _cmd_suggest,
    "evaluate": _cmd_evaluate,
    "lit-report": _cmd_lit_report,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        store = ProjectStore(args.project)
        return _COMMANDS[args.command](args, store, cfg)
    except TagscoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
