"""Prompt rendering: the common preamble plus four scenario bodies.

Rendering is pure and byte-stable; golden-file tests pin the exact output.
Scenario composition is fixed: the baseline body, then the location
sentence (LC), then the detected-objects sentence (OD). The combined
scenario appends both blocks in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from tagscout.models import Annotation, PromptScenario, RoadUsers, YesNoUnknown

PREAMBLE = (
    "Based on the following context that was derived from a street-level "
    "photograph showing the street, recommend the most suitable tagging for "
    "an OpenStreetMap highway feature. Omit the 'oneway' and 'lit' tags if "
    "the answer to the corresponding questions is no or N/A. Format your "
    "suggested key-value pairs as a JSON. Your response should only contain "
    "this JSON."
)

DEFAULT_LOCATION_TEXT = "near Downtown Miami, Florida"


@dataclass(frozen=True)
class PromptContext:
    """Optional context blocks: where the photo was taken and what was
    detected in it. Detected object names keep their API order, deduplicated."""

    location_text: str = DEFAULT_LOCATION_TEXT
    detected_objects: tuple[str, ...] = ()

    def __post_init__(self):
        seen, unique = set(), []
        for name in self.detected_objects:
            if name not in seen:
                seen.add(name)
                unique.append(name)
        object.__setattr__(self, "detected_objects", tuple(unique))


@dataclass(frozen=True)
class Prompt:
    text: str
    scenario: PromptScenario
    road_osm_id: int
    analyst_id: str

    def to_record(self) -> dict:
        return {
            "road": self.road_osm_id,
            "analyst": self.analyst_id,
            "scenario": self.scenario.value,
            "text": self.text,
        }


def render_preamble() -> str:
    """The common instruction block every prompt starts with."""
    return PREAMBLE


def _answer_of(value) -> str:
    """Render a structured answer the way it appears in a prompt sentence."""
    if value is None:
        return "N/A"
    if isinstance(value, YesNoUnknown):
        return {
            YesNoUnknown.YES: "Yes",
            YesNoUnknown.NO: "No",
            YesNoUnknown.UNKNOWN: "N/A",
        }[value]
    if isinstance(value, RoadUsers):
        return "N/A" if value is RoadUsers.UNKNOWN else value.value
    if isinstance(value, str):
        return "N/A" if value == "unknown" else value
    return str(value)


def render_body(a: Annotation, scenario: PromptScenario, ctx: PromptContext) -> str:
    """The scenario-specific part of a prompt (everything after the preamble)."""
    paragraphs = [
        (
            f"The content of the photograph was described as follows: {a.caption} "
            f"The road is mainly used by: {_answer_of(a.users)}. "
            f"The surface of the road is: {_answer_of(a.surface)}."
        ),
        (
            "When asked how many traffic lanes there are on the road, "
            f"one would answer: {_answer_of(a.lanes)}."
        ),
        (
            "When asked if this street is a one-way road, "
            f"one would answer: {_answer_of(a.oneway)}."
        ),
        (
            "When asked if there are any street lights in the photograph, "
            f"one would answer: {_answer_of(a.lit)}."
        ),
    ]
    if scenario in (PromptScenario.LC, PromptScenario.OD_LC):
        paragraphs.append(f"The photograph was taken {ctx.location_text}.")
    if scenario in (PromptScenario.OD, PromptScenario.OD_LC):
        paragraphs.append(
            "When guessing the correct category, consider that the following "
            "list of objects (separated by semicolon) are present in the "
            "photograph: " + "; ".join(ctx.detected_objects)
        )
    return "\n\n".join(paragraphs)


def render_prompt(
    a: Annotation, scenario: PromptScenario, ctx: PromptContext | None = None
) -> Prompt:
    """Render the full prompt (preamble + scenario body) for one annotation."""
    ctx = ctx or PromptContext()
    text = PREAMBLE + "\n\n" + render_body(a, scenario, ctx)
    return Prompt(
        text=text,
        scenario=scenario,
        road_osm_id=a.road_osm_id,
        analyst_id=a.analyst_id,
    )
