#!/usr/bin/env python3
"""Build the committed fixture corpus under fixtures/.

Deterministic: a fixed RNG seed drives every choice, so re-running the
script reproduces the same bytes. The corpus is engineered so that the
real pipeline (ingest -> annotate -> suggest with the mock backend ->
evaluate) lands on the published accuracy matrix and lighting counts.
Before writing anything the script re-scores its own plan with the real
evaluation code and aborts on any mismatch.
"""

from __future__ import annotations

import json
import math
import random
import sys
from pathlib import Path

from tagscout.annotation import validate_annotation
from tagscout.evaluation import CATEGORY_VALUES, SemanticCategory
from tagscout.geo import polyline_length_m
from tagscout.llm import extract_tag_map
from tagscout.models import Annotation, ParseStatus

SEED = 20240217
OUT = Path(__file__).resolve().parent.parent / "fixtures"

N_ROADS = 94
BASE_OSM_ID = 601_000_000
BASE_IMAGE_ID = 7_100_000_000

# retained-road counts per semantic category (main / regular / non-motorized)
N_MAIN, N_REGULAR, N_NONMOT = 81, 4, 9

MAIN = list(CATEGORY_VALUES[SemanticCategory.MAIN_ROAD])
REGULAR = list(CATEGORY_VALUES[SemanticCategory.REGULAR_ROAD])
NONMOT = list(CATEGORY_VALUES[SemanticCategory.NOT_MOTORIZED])

# correct-count targets per (scenario, analyst): (historical, semantic)
K = {
    ("baseline", "blip2"): (22, 24),
    ("baseline", "analyst1"): (35, 51),
    ("baseline", "analyst2"): (30, 39),
    ("lc", "blip2"): (23, 33),
    ("lc", "analyst1"): (44, 61),
    ("lc", "analyst2"): (32, 43),
    ("od", "blip2"): (26, 28),
    ("od", "analyst1"): (45, 60),
    ("od", "analyst2"): (37, 57),
    ("od_lc", "blip2"): (29, 41),
    ("od_lc", "analyst1"): (45, 62),
    ("od_lc", "analyst2"): (47, 66),
}

ANALYSTS = ["blip2", "analyst1", "analyst2"]
SCENARIOS = ["baseline", "lc", "od", "od_lc"]

N_LIT = 24
LIT_CORRECT = {"blip2": 15, "analyst1": 20, "analyst2": 22}
# sizes of the regions of the additional-suggestion Venn diagram
ADD_TRIPLE, ADD_12, ADD_23, ADD_13 = 36, 15, 8, 0
ADD_1, ADD_2, ADD_3 = 7, 2, 0

CENTER_LAT, CENTER_LON = 25.755, -80.215
GRID_DLAT, GRID_DLON = 0.0048, 0.0053
M_PER_DEG_LAT = 110_574.0

DETECTION_POOL = [
    "object--street-light",
    "object--signage",
    "object--traffic-light--horizontal",
    "object--traffic-light--pedestrian",
    "object--temporary-barrier",
    "object--bench",
    "object--fire-hydrant",
    "object--trash-can",
    "object--traffic-sign--direction",
    "object--catch-basin",
    "object--bike-rack",
    "object--parking-meter",
]

STREET_KINDS = ["St", "Ave", "Ter", "Ct", "Pl", "Blvd"]
QUADRANTS = ["NE", "NW", "SE", "SW"]

BLIP2_SUBJECTS = [
    "a city street",
    "an empty city street",
    "a two lane road",
    "a street corner",
    "a wide road",
    "a narrow street",
    "an intersection",
    "a paved road",
    "a downtown street",
    "a residential street",
]
BLIP2_CONTEXTS = [
    "with tall buildings in the background",
    "with cars parked on the side",
    "with palm trees along the sidewalk",
    "with a traffic light in the distance",
    "next to a parking garage",
    "with people crossing the road",
    "in front of an office building",
    "under an overpass",
    "with construction barriers on one side",
    "on a sunny day",
    "with a bus stop on the corner",
    "near a row of shops",
]

A1_DETAILS = [
    "There is a wide sidewalk on both sides and trees planted in regular intervals.",
    "Several cars are parked along the curb and a delivery truck blocks part of the lane.",
    "High-rise buildings line both sides and their shadows cover most of the roadway.",
    "A painted bike symbol is visible although no cyclists appear in the frame.",
    "The lane markings are freshly painted and a crosswalk is visible in the foreground.",
    "Palm trees and street lamps alternate along the median strip.",
    "A construction fence covers the left side and pedestrians keep to the right.",
    "Overhead signals hang from a wire spanning the full width of the road.",
    "The pavement shows patched asphalt with a long seam in the middle of the lane.",
    "Storefronts with awnings open directly onto the sidewalk on the right side.",
]
A2_TEMPLATES = [
    "A {width} urban road with {feature} nearby",
    "City street, {feature}, {width} pavement",
    "{width} road passing {feature}",
    "Street view showing {feature} and a {width} roadway",
]
A2_WIDTHS = ["wide", "narrow", "two-lane", "busy", "quiet", "sunlit"]
A2_FEATURES = [
    "tall buildings",
    "parked cars",
    "a bus shelter",
    "palm trees",
    "an office tower",
    "a parking lot",
    "shops",
    "a crosswalk",
    "street lamps",
    "a fenced lot",
]

WRONG_PROSE = [
    "I'm sorry, but the description does not provide enough information to "
    "determine a suitable highway classification for this feature.",
    "Based on the context provided I cannot confidently recommend a tagging "
    "for this road without additional details about its usage.",
    "The photograph description is too vague to identify the road category; "
    "more context about traffic and signage would be needed.",
]


def road_category(i: int) -> str:
    if i < N_MAIN:
        return "main"
    if i < N_MAIN + N_REGULAR:
        return "regular"
    return "nonmot"


def road_value(i: int) -> str:
    cat = road_category(i)
    if cat == "main":
        return MAIN[i % len(MAIN)]
    if cat == "regular":
        return REGULAR[i % len(REGULAR)]
    return NONMOT[i % len(NONMOT)]


def same_category_other(rng: random.Random, value: str) -> str:
    for pool in (MAIN, REGULAR, NONMOT):
        if value in pool:
            return rng.choice([v for v in pool if v != value])
    raise AssertionError(value)


def wrong_category_value(rng: random.Random, value: str) -> str:
    pools = [p for p in (MAIN, REGULAR, NONMOT) if value not in p]
    # values outside every category score as unmapped, also wrong
    extras = ["track", "living_street", "steps", "bridleway"]
    choices = [v for p in pools for v in p] + extras
    return rng.choice(choices)


def street_name(i: int) -> str:
    return (
        f"{QUADRANTS[i % 4]} {i + 2}{'th' if (i + 2) % 10 not in (1, 2, 3) or 10 < (i + 2) % 100 < 14 else {1: 'st', 2: 'nd', 3: 'rd'}[(i + 2) % 10]} "
        f"{STREET_KINDS[i % len(STREET_KINDS)]}"
    )


def build_geometry(rng: random.Random, i: int) -> list[list[float]]:
    row, col = divmod(i, 10)
    lat = CENTER_LAT + row * GRID_DLAT
    lon = CENTER_LON + col * GRID_DLON
    length = 55.0 + ((i * 13) % 170)
    east_west = i % 2 == 0
    n_points = 2 + (i % 3)
    m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(lat))
    points = []
    for k in range(n_points):
        frac = k / (n_points - 1)
        jitter = rng.uniform(-3.0, 3.0) if 0 < k < n_points - 1 else 0.0
        if east_west:
            points.append(
                [
                    round(lon + (length * frac) / m_per_deg_lon, 7),
                    round(lat + jitter / M_PER_DEG_LAT, 7),
                ]
            )
        else:
            points.append(
                [
                    round(lon + jitter / m_per_deg_lon, 7),
                    round(lat + (length * frac) / M_PER_DEG_LAT, 7),
                ]
            )
    return points


def midpoint_offset(rng: random.Random, geometry: list[list[float]]) -> tuple[float, float]:
    mid = geometry[len(geometry) // 2]
    lon, lat = (
        (mid[0] + geometry[len(geometry) // 2 - 1][0]) / 2,
        (mid[1] + geometry[len(geometry) // 2 - 1][1]) / 2,
    ) if len(geometry) > 1 else (mid[0], mid[1])
    offset_m = rng.uniform(4.0, 12.0)
    m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(lat))
    if rng.random() < 0.5:
        return round(lon, 7), round(lat + offset_m / M_PER_DEG_LAT, 7)
    return round(lon + offset_m / m_per_deg_lon, 7), round(lat, 7)


def iso(day_offset: int, hour: int = 12, minute: int = 0) -> str:
    base_year, base_month = 2015, 3
    month = base_month + (day_offset // 28) % 10
    day = 1 + day_offset % 28
    year = base_year + day_offset // 280
    return f"{year:04d}-{month:02d}-{day:02d}T{hour:02d}:{minute:02d}:00Z"


def main() -> int:
    rng = random.Random(SEED)
    OUT.mkdir(exist_ok=True)

    road_ids = [BASE_OSM_ID + i * 97 for i in range(N_ROADS)]
    image_ids = [str(BASE_IMAGE_ID + i * 31) for i in range(N_ROADS)]
    values = [road_value(i) for i in range(N_ROADS)]
    names = [street_name(i) for i in range(N_ROADS)]

    lit_roads = sorted(rng.sample(range(N_ROADS), N_LIT))
    lit_set = set(lit_roads)
    lit_correct = {
        a: set(rng.sample(lit_roads, LIT_CORRECT[a])) for a in ANALYSTS
    }
    nonlit = [i for i in range(N_ROADS) if i not in lit_set]
    shuffled = nonlit[:]
    rng.shuffle(shuffled)
    cut = 0
    regions = {}
    for region, size in (
        ("123", ADD_TRIPLE), ("12", ADD_12), ("23", ADD_23), ("13", ADD_13),
        ("1", ADD_1), ("2", ADD_2), ("3", ADD_3),
    ):
        regions[region] = set(shuffled[cut : cut + size])
        cut += size
    additional = {
        "blip2": regions["123"] | regions["12"] | regions["13"] | regions["1"],
        "analyst1": regions["123"] | regions["12"] | regions["23"] | regions["2"],
        "analyst2": regions["123"] | regions["23"] | regions["13"] | regions["3"],
    }

    # -- per-cell planting: which roads are exactly right / same category ----
    plan = {}
    for scenario in SCENARIOS:
        for analyst in ANALYSTS:
            k_hist, k_sem = K[(scenario, analyst)]
            exact = set(rng.sample(range(N_ROADS), k_hist))
            rest = [i for i in range(N_ROADS) if i not in exact]
            semcat = set(rng.sample(rest, k_sem - k_hist))
            plan[(scenario, analyst)] = (exact, semcat)

    # sprinkle alternate response shapes on a few cells (never in od, which
    # must stay parseable for the lighting analysis)
    fenced = set()
    prose_failed = set()
    missing_highway = set()
    all_cells = [
        (i, a, s) for i in range(N_ROADS) for a in ANALYSTS for s in SCENARIOS
    ]
    rng.shuffle(all_cells)
    for i, a, s in all_cells:
        exact, semcat = plan[(s, a)]
        wrong = i not in exact and i not in semcat
        if s in ("baseline", "lc") and wrong and len(prose_failed) < 6:
            prose_failed.add((i, a, s))
        elif s != "od" and wrong and len(missing_highway) < 2:
            missing_highway.add((i, a, s))
        elif len(fenced) < 18:
            fenced.add((i, a, s))

    # -- geometry, histories, images -----------------------------------------
    elements = []
    histories = {}
    images_data = []
    detections = {}
    road_geometries = {}
    matched_images = {}
    road_objects = {}

    for i in range(N_ROADS):
        geometry = build_geometry(rng, i)
        road_geometries[i] = geometry
        value, name = values[i], names[i]
        n_versions = 1 + (i * 7) % 3
        versions = []
        day0 = 40 + i * 3
        for v in range(1, n_versions + 1):
            tags = {"highway": value, "name": name}
            if v >= 2:
                tags["surface"] = "asphalt" if road_category(i) != "nonmot" else "concrete"
            if v >= 3:
                tags["lanes"] = str(2 + i % 3)
            if v == n_versions:
                if i in lit_set:
                    tags["lit"] = "yes"
                elif i % 31 == 5:
                    tags["lit"] = "no"
            versions.append(
                {
                    "type": "way",
                    "id": road_ids[i],
                    "version": v,
                    "timestamp": iso(day0 + (v - 1) * 300),
                    "tags": tags,
                }
            )
        histories[str(road_ids[i])] = {"elements": versions}
        current = versions[-1]
        elements.append(
            {
                "type": "way",
                "id": road_ids[i],
                "version": current["version"],
                "timestamp": current["timestamp"],
                "nodes": [road_ids[i] * 10 + k for k in range(len(geometry))],
                "geometry": [{"lon": p[0], "lat": p[1]} for p in geometry],
                "tags": current["tags"],
            }
        )

        lon, lat = midpoint_offset(rng, geometry)
        captured = 1_642_248_000_000 + i * 86_400_000 + rng.randrange(0, 8) * 3_600_000
        images_data.append(
            {
                "id": image_ids[i],
                "geometry": {"type": "Point", "coordinates": [lon, lat]},
                "captured_at": captured,
                "compass_angle": round((i * 37.0) % 360.0, 1),
            }
        )
        matched_images[i] = image_ids[i]

        if i == 0:
            slugs = [
                "object--temporary-barrier",
                "object--traffic-light--horizontal",
                "object--traffic-light--pedestrian",
                "object--signage",
            ]
        else:
            slugs = rng.sample(DETECTION_POOL, rng.randrange(2, 6))
        road_objects[i] = slugs
        detections[image_ids[i]] = {"data": [{"value": s} for s in slugs]}

    # -- excluded ways ---------------------------------------------------------
    def excluded_way(idx: int, tags: dict, length: float, with_image: bool):
        eid = 698_000_000 + idx * 13
        row, col = 11 + idx // 6, idx % 6
        lat = CENTER_LAT + row * GRID_DLAT
        lon = CENTER_LON + col * GRID_DLON
        m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(lat))
        geometry = [
            {"lon": round(lon, 7), "lat": round(lat, 7)},
            {"lon": round(lon + length / m_per_deg_lon, 7), "lat": round(lat, 7)},
        ]
        elements.append(
            {
                "type": "way",
                "id": eid,
                "version": 1,
                "timestamp": iso(30 + idx),
                "nodes": [eid * 10, eid * 10 + 1],
                "geometry": geometry,
                "tags": tags,
            }
        )
        if with_image:
            mid_lon = (geometry[0]["lon"] + geometry[1]["lon"]) / 2
            images_data.append(
                {
                    "id": str(7_200_000_000 + idx * 17),
                    "geometry": {
                        "type": "Point",
                        "coordinates": [round(mid_lon, 7), round(lat + 0.00008, 7)],
                    },
                    "captured_at": 1_640_000_000_000 + idx * 43_200_000,
                    "compass_angle": (idx * 53.0) % 360.0,
                }
            )

    excluded_way(0, {"highway": "residential", "name": "NW 1st Ct"}, 30.0, True)
    excluded_way(1, {"highway": "tertiary", "name": "NW 2nd Ct"}, 49.0, True)
    excluded_way(2, {"highway": "footway", "footway": "sidewalk"}, 80.0, True)
    excluded_way(3, {"highway": "footway", "footway": "sidewalk"}, 120.0, True)
    excluded_way(4, {"highway": "residential", "access": "private", "name": "Gated Dr"}, 90.0, True)
    excluded_way(5, {"highway": "primary", "access": "no", "name": "Closed Rd"}, 140.0, True)
    excluded_way(6, {"highway": "bus_stop", "name": "Transit Stop"}, 60.0, True)
    excluded_way(7, {"highway": "proposed", "name": "Future Ln"}, 150.0, True)
    excluded_way(8, {"highway": "construction", "name": "Works Ave"}, 95.0, True)
    excluded_way(9, {"highway": "residential", "name": "Lonely Rd"}, 110.0, False)
    excluded_way(10, {"highway": "tertiary", "name": "Unseen St"}, 85.0, False)
    # a non-way element for parser robustness
    elements.append({"type": "node", "id": 1, "lat": CENTER_LAT, "lon": CENTER_LON})

    # -- vision answers and human annotations ----------------------------------
    caption_combos = rng.sample(
        [(s, c) for s in BLIP2_SUBJECTS for c in BLIP2_CONTEXTS], N_ROADS
    )
    vision_canned = {}
    annotations = []
    annotation_answers = {}

    for i in range(N_ROADS):
        cat = road_category(i)
        users = "pedestrians" if cat == "nonmot" else ("mixed" if i % 17 == 3 else "cars")
        lanes = None if cat == "nonmot" else 2 + i % 3
        surface = "concrete" if cat == "nonmot" else ("asphalt" if i % 5 else "paved")
        oneway = "no" if cat == "nonmot" else ("yes" if i % 4 == 0 else "no")
        lit_seen = "yes" if i in lit_set or i % 7 == 2 else "no"
        annotation_answers[i] = (users, lanes, surface, oneway, lit_seen)

        subject, context = caption_combos[i]
        vision_canned[image_ids[i]] = {
            "caption": f"{subject} {context}",
            "answers": {
                "users": users,
                "lanes": "N/A" if lanes is None else str(lanes),
                "surface": surface,
                "oneway": oneway,
                "lit": lit_seen,
            },
        }

        detail_a = A1_DETAILS[i % len(A1_DETAILS)]
        detail_b = A1_DETAILS[(i * 3 + 4) % len(A1_DETAILS)]
        kind = {
            "main": "multi-lane city road",
            "regular": "quiet residential street",
            "nonmot": "paved pedestrian way",
        }[cat]
        a1_caption = (
            f"A {kind} along {names[i]} in an urban area. {detail_a} {detail_b}"
        )
        a2_template = A2_TEMPLATES[i % len(A2_TEMPLATES)]
        a2_caption = (
            a2_template.format(
                width=A2_WIDTHS[i % len(A2_WIDTHS)],
                feature=A2_FEATURES[(i * 7 + 1) % len(A2_FEATURES)],
            )
            + f" near {names[i]}."
        )
        for analyst, caption in (("analyst1", a1_caption), ("analyst2", a2_caption)):
            a = validate_annotation(
                Annotation(
                    road_osm_id=road_ids[i],
                    image_id=image_ids[i],
                    analyst_id=analyst,
                    caption=caption,
                    users=users,
                    lanes=lanes,
                    surface=surface,
                    oneway=oneway,
                    lit=lit_seen,
                )
            )
            annotations.append(a.to_record())

    # -- mock chat responses ------------------------------------------------------
    mock_lines = []
    planted_tags = {}
    for i in range(N_ROADS):
        for analyst in ANALYSTS:
            for scenario in SCENARIOS:
                exact, semcat = plan[(scenario, analyst)]
                if i in exact:
                    highway = values[i]
                elif i in semcat:
                    highway = same_category_other(rng, values[i])
                else:
                    highway = wrong_category_value(rng, values[i])

                tags = {"highway": highway}
                users, lanes, surface, oneway, _ = annotation_answers[i]
                if lanes is not None and rng.random() < 0.5:
                    tags["lanes"] = lanes if rng.random() < 0.5 else str(lanes)
                if rng.random() < 0.4:
                    tags["surface"] = surface
                if oneway == "yes" and rng.random() < 0.6:
                    tags["oneway"] = "yes"
                if scenario == "od":
                    wants_lit = (i in lit_set and i in lit_correct[analyst]) or (
                        i in additional[analyst]
                    )
                    if wants_lit:
                        tags["lit"] = True if rng.random() < 0.15 else "yes"

                cell = (i, analyst, scenario)
                if cell in prose_failed:
                    response = WRONG_PROSE[len(mock_lines) % len(WRONG_PROSE)]
                    tags = {}
                elif cell in missing_highway:
                    tags.pop("highway")
                    tags["lanes"] = tags.get("lanes", 2)
                    response = json.dumps(tags)
                elif cell in fenced:
                    body = json.dumps(tags, indent=2)
                    response = (
                        f"```json\n{body}\n```"
                        if rng.random() < 0.6
                        else f"Here is the suggested tagging: {json.dumps(tags)}"
                    )
                else:
                    response = json.dumps(tags)

                planted_tags[cell] = response
                mock_lines.append(
                    {
                        "key": f"{road_ids[i]}|{analyst}|{scenario}",
                        "response": response,
                    }
                )

    # -- self-check with the real scoring code -------------------------------------
    failures = []
    for scenario in SCENARIOS:
        for analyst in ANALYSTS:
            k_hist, k_sem = K[(scenario, analyst)]
            n_hist = n_sem = 0
            for i in range(N_ROADS):
                tags, status = extract_tag_map(planted_tags[(i, analyst, scenario)])
                history_values = {values[i]}
                suggested = tags.get("highway")
                ok_parse = status is not ParseStatus.FAILED and suggested is not None
                hist_ok = ok_parse and suggested in history_values
                cat_of = lambda v: next(
                    (c for c, vs in CATEGORY_VALUES.items() if v in vs), None
                )
                sem_ok = ok_parse and cat_of(suggested) is not None and cat_of(
                    suggested
                ) == cat_of(values[i])
                n_hist += hist_ok
                n_sem += sem_ok or hist_ok
            if (n_hist, n_sem) != (k_hist, k_sem):
                failures.append(
                    f"{scenario}/{analyst}: got ({n_hist},{n_sem}) want ({k_hist},{k_sem})"
                )

    for analyst in ANALYSTS:
        got_correct = 0
        got_additional = set()
        for i in range(N_ROADS):
            tags, status = extract_tag_map(planted_tags[(i, analyst, "od")])
            lit = tags.get("lit")
            lit_yes = lit is True or (isinstance(lit, str) and lit.lower() == "yes")
            if i in lit_set and lit_yes:
                got_correct += 1
            if i not in lit_set and lit_yes:
                got_additional.add(i)
        if got_correct != LIT_CORRECT[analyst]:
            failures.append(f"lit correct {analyst}: {got_correct}")
        if got_additional != additional[analyst]:
            failures.append(f"lit additional {analyst}: {len(got_additional)}")

    if failures:
        for f in failures:
            print("PLANTING MISMATCH:", f, file=sys.stderr)
        return 1

    # -- write everything ----------------------------------------------------------
    def dump(name: str, obj) -> None:
        (OUT / name).write_text(
            json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
        )

    def dump_jsonl(name: str, records) -> None:
        (OUT / name).write_text(
            "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
            encoding="utf-8",
        )

    dump(
        "downtown.osm.json",
        {
            "version": 0.6,
            "generator": "recorded",
            "osm3s": {"timestamp_osm_base": "2023-09-01T00:00:00Z"},
            "elements": elements,
        },
    )
    dump("histories.json", histories)
    dump("images.json", {"data": images_data})
    dump("detections.json", detections)
    dump("vision_canned.json", vision_canned)
    dump_jsonl("annotations_human.jsonl", annotations)
    dump_jsonl("mock_llm.jsonl", mock_lines)
    dump(
        "analysts.json",
        [
            {"analyst_id": "blip2", "kind": "artificial", "display_name": "BLIP-2"},
            {"analyst_id": "analyst1", "kind": "human", "display_name": "Analyst #1"},
            {"analyst_id": "analyst2", "kind": "human", "display_name": "Analyst #2"},
        ],
    )

    lengths = [polyline_length_m(g) for g in road_geometries.values()]
    print(f"wrote {len(elements)} ways ({N_ROADS} retained), road lengths "
          f"{min(lengths):.0f}-{max(lengths):.0f} m")
    print(f"lit ground truth: {len(lit_roads)} roads; additional sets "
          f"{sorted(len(additional[a]) for a in ANALYSTS)}")
    print(f"mock responses: {len(mock_lines)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
