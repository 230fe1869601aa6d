"""Analyst question schema, annotation validation, and the artificial analyst.

Analysts (human or artificial) caption a road's representative photograph
and answer five structured questions about it. Human answers arrive as
free text and are normalized here; the artificial analyst gets its answers
from a pluggable vision backend asked the identical question texts.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal

from tagscout.errors import TransportError, ValidationError
from tagscout.models import Annotation, RoadUsers, StreetImage, YesNoUnknown

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Question:
    variable: str
    text: str


# The six analyst items, in fixed order. Texts are immutable and rendered
# to analysts and vision backends exactly as written here.
QUESTION_SET: tuple[Question, ...] = (
    Question("caption", "Describe what you see in the photo in your own words."),
    Question(
        "users",
        "Who are the primary users of the road that is located in the middle "
        "of the photograph? Cars, pedestrians or bicyclists?",
    ),
    Question(
        "lanes",
        "How many traffic lanes are there on the road that is in the middle "
        "of the photograph?",
    ),
    Question(
        "surface",
        "What is the material of the surface of the road that is in the "
        "center of the photograph",
    ),
    Question("oneway", "Is the road that is in the center of the photograph one-way?"),
    Question("lit", "Are there any street lights in the photograph?"),
)

MAX_LANES = 16

_UNKNOWN_SENTINELS = {"", "n/a", "na", "n.a.", "none", "unknown", "unclear", "not sure", "?"}

_USER_SYNONYMS = {
    "cars": RoadUsers.CARS,
    "car": RoadUsers.CARS,
    "vehicle": RoadUsers.CARS,
    "vehicles": RoadUsers.CARS,
    "motor vehicles": RoadUsers.CARS,
    "automobile": RoadUsers.CARS,
    "automobiles": RoadUsers.CARS,
    "traffic": RoadUsers.CARS,
    "drivers": RoadUsers.CARS,
    "motorists": RoadUsers.CARS,
    "pedestrian": RoadUsers.PEDESTRIANS,
    "pedestrians": RoadUsers.PEDESTRIANS,
    "people": RoadUsers.PEDESTRIANS,
    "walkers": RoadUsers.PEDESTRIANS,
    "foot traffic": RoadUsers.PEDESTRIANS,
    "bicyclist": RoadUsers.BICYCLISTS,
    "bicyclists": RoadUsers.BICYCLISTS,
    "cyclist": RoadUsers.BICYCLISTS,
    "cyclists": RoadUsers.BICYCLISTS,
    "bike": RoadUsers.BICYCLISTS,
    "bikes": RoadUsers.BICYCLISTS,
    "bicycle": RoadUsers.BICYCLISTS,
    "bicycles": RoadUsers.BICYCLISTS,
    "bikers": RoadUsers.BICYCLISTS,
    "mixed": RoadUsers.MIXED,
    "all": RoadUsers.MIXED,
    "everyone": RoadUsers.MIXED,
    "all of the above": RoadUsers.MIXED,
}

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
}


def question_set() -> tuple[Question, ...]:
    """The six analyst items, in fixed order."""
    return QUESTION_SET


def question_for(variable: str) -> Question:
    for q in QUESTION_SET:
        if q.variable == variable:
            return q
    raise KeyError(variable)


def _clean(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().rstrip(".").strip()).lower()


def normalize_users(value) -> RoadUsers:
    if isinstance(value, RoadUsers):
        return value
    text = _clean(str(value))
    if text in _UNKNOWN_SENTINELS:
        return RoadUsers.UNKNOWN
    if text in _USER_SYNONYMS:
        return _USER_SYNONYMS[text]
    # free-text answers naming several groups count as mixed
    groups = set()
    for token, user in _USER_SYNONYMS.items():
        if user in (RoadUsers.CARS, RoadUsers.PEDESTRIANS, RoadUsers.BICYCLISTS):
            if re.search(rf"\b{re.escape(token)}\b", text):
                groups.add(user)
    if len(groups) > 1:
        return RoadUsers.MIXED
    if len(groups) == 1:
        return groups.pop()
    raise ValidationError(f"unrecognized users value: {value!r}", ["users"])


def normalize_lanes(value) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool):
        raise ValidationError(f"invalid lanes value: {value!r}", ["lanes"])
    if isinstance(value, int):
        lanes = value
    else:
        text = _clean(str(value))
        if text in _UNKNOWN_SENTINELS:
            return None
        if text in _NUMBER_WORDS:
            lanes = _NUMBER_WORDS[text]
        elif re.fullmatch(r"[+-]?\d+", text):
            lanes = int(text)
        else:
            raise ValidationError(f"invalid lanes value: {value!r}", ["lanes"])
    if lanes <= 0:
        raise ValidationError(f"lanes must be positive, got {lanes}", ["lanes"])
    if lanes > MAX_LANES:
        raise ValidationError(f"lanes above sanity bound ({lanes} > {MAX_LANES})", ["lanes"])
    return lanes


def normalize_surface(value) -> str:
    if value is None:
        return "unknown"
    text = _clean(str(value))
    if text in _UNKNOWN_SENTINELS:
        return "unknown"
    return text


def normalize_yes_no(value, field: str) -> YesNoUnknown:
    if isinstance(value, YesNoUnknown):
        return value
    if value is True:
        return YesNoUnknown.YES
    if value is False:
        return YesNoUnknown.NO
    if value is None:
        return YesNoUnknown.UNKNOWN
    text = _clean(str(value))
    if text in _UNKNOWN_SENTINELS:
        return YesNoUnknown.UNKNOWN
    if text in ("yes", "y", "true"):
        return YesNoUnknown.YES
    if text in ("no", "n", "false"):
        return YesNoUnknown.NO
    raise ValidationError(f"invalid {field} value: {value!r}", [field])


def validate_annotation(a: Annotation) -> Annotation:
    """Normalize and validate an annotation. Idempotent.

    Free-text sentinels ("N/A", empty, "unknown") map to the unknown
    member of each field. Raises ValidationError listing every offending
    field. The caption is preserved byte-exactly apart from end trimming.
    """
    problems: list[str] = []
    caption = a.caption.strip() if isinstance(a.caption, str) else ""
    if not caption:
        problems.append("caption")
    fields = {}
    for name, fn in (
        ("users", lambda: normalize_users(a.users)),
        ("lanes", lambda: normalize_lanes(a.lanes)),
        ("surface", lambda: normalize_surface(a.surface)),
        ("oneway", lambda: normalize_yes_no(a.oneway, "oneway")),
        ("lit", lambda: normalize_yes_no(a.lit, "lit")),
    ):
        try:
            fields[name] = fn()
        except ValidationError:
            problems.append(name)
    if problems:
        raise ValidationError(
            "invalid annotation field(s): " + ", ".join(problems), problems
        )
    return replace(a, caption=caption, **fields)


# ---------------------------------------------------------------------------
# artificial analyst
# ---------------------------------------------------------------------------


def _extract_int(text: str) -> int | str:
    """Pull the first integer (digits or a number word) out of a free-text
    answer; returns the original text when nothing usable is found."""
    m = re.search(r"\d+", text)
    if m:
        return int(m.group())
    for word, n in _NUMBER_WORDS.items():
        if re.search(rf"\b{word}\b", text.lower()):
            return n
    return text


def _extract_yes_no(text: str) -> str:
    lead = _clean(text).split(",")[0].split(" ")[0] if text.strip() else ""
    if lead in ("yes", "yeah", "yep"):
        return "yes"
    if lead in ("no", "nope"):
        return "no"
    return text


def artificial_annotate(
    image: StreetImage,
    vision,
    road_osm_id: int,
    analyst_id: str,
) -> Annotation:
    """Produce one annotation through a vision backend.

    Issues exactly six backend calls: one caption request and one visual
    Q&A request per structured question, asking the question text
    verbatim. Unparseable answers are stored as unknown with a warning;
    a backend failure aborts with no partial annotation.
    """
    caption = vision.caption(image)
    answers = {}
    for q in QUESTION_SET[1:]:
        answers[q.variable] = vision.ask(image, q.text)

    raw = Annotation(
        road_osm_id=road_osm_id,
        image_id=image.image_id,
        analyst_id=analyst_id,
        caption=caption,
        users=answers["users"],
        lanes=_extract_int(answers["lanes"]),
        surface=answers["surface"],
        oneway=_extract_yes_no(answers["oneway"]),
        lit=_extract_yes_no(answers["lit"]),
    )
    try:
        return validate_annotation(raw)
    except ValidationError as exc:
        if "caption" in exc.fields:
            raise TransportError(
                f"vision backend returned an empty caption for image {image.image_id}"
            ) from exc
        # salvage field by field; unparseable answers become unknown
        salvaged = raw
        for field in exc.fields:
            logger.warning(
                "unparseable %s answer for road %s image %s: %r (stored as unknown)",
                field, road_osm_id, image.image_id, getattr(raw, field),
            )
            salvaged = replace(
                salvaged,
                **{field: None if field == "lanes" else "unknown"},
            )
        return validate_annotation(salvaged)


def annotation_stats(annotations) -> dict[str, dict]:
    """Per-analyst caption statistics: whitespace-token mean length (one
    decimal) and annotation count. Analysts with no annotations are omitted."""
    by_analyst: dict[str, list[int]] = {}
    for a in annotations:
        by_analyst.setdefault(a.analyst_id, []).append(len(a.caption.split()))
    return {
        analyst: {
            "mean_caption_words": float(
                (Decimal(sum(counts)) / Decimal(len(counts))).quantize(
                    Decimal("0.1"), rounding=ROUND_HALF_UP
                )
            ),
            "n": len(counts),
        }
        for analyst, counts in sorted(by_analyst.items())
    }
