"""Prompt rendering: golden files, composition rules, purity."""

import pytest

from tagscout.models import Annotation, PromptScenario, RoadUsers, YesNoUnknown
from tagscout.prompts import (
    DEFAULT_LOCATION_TEXT,
    PREAMBLE,
    Prompt,
    PromptContext,
    render_body,
    render_preamble,
    render_prompt,
)

from conftest import GOLDEN

EXAMPLE_CAPTION = (
    "A city road in an urban area along an elevated railway. There is a "
    "wide sidewalk on both sides and trees on the left."
)

EXAMPLE_OBJECTS = (
    "Temporary barrier",
    "Traffic light - horizontal",
    "Traffic light - pedestrian",
    "Signage",
)


def example_annotation():
    return Annotation(
        road_osm_id=712,
        image_id="img-712",
        analyst_id="analyst1",
        caption=EXAMPLE_CAPTION,
        users=RoadUsers.CARS,
        lanes=3,
        surface="asphalt",
        oneway=YesNoUnknown.NO,
        lit=YesNoUnknown.YES,
    )


def example_context():
    return PromptContext(detected_objects=EXAMPLE_OBJECTS)


@pytest.mark.parametrize("scenario", list(PromptScenario))
def test_golden_files(scenario):
    golden = (GOLDEN / f"{scenario.value}.txt").read_bytes()
    prompt = render_prompt(example_annotation(), scenario, example_context())
    assert prompt.text.encode("utf-8") == golden


def test_baseline_contains_sentence_frames():
    text = render_prompt(example_annotation(), PromptScenario.BASELINE).text
    assert "The content of the photograph was described as follows" in text
    assert "When asked if there are any street lights in the photograph" in text
    assert "When asked how many traffic lanes there are on the road" in text
    assert "When asked if this street is a one-way road" in text
    assert "The road is mainly used by" in text
    assert "The surface of the road is" in text


def test_preamble_prefix_and_constants():
    text = render_prompt(example_annotation(), PromptScenario.BASELINE).text
    assert text.startswith(PREAMBLE)
    assert render_preamble() == PREAMBLE
    assert "Format your suggested key-value pairs as a JSON" in PREAMBLE
    assert DEFAULT_LOCATION_TEXT == "near Downtown Miami, Florida"


def test_composition_od_lc_superset():
    a = example_annotation()
    ctx = example_context()
    base = render_body(a, PromptScenario.BASELINE, ctx)
    lc = render_body(a, PromptScenario.LC, ctx)
    od = render_body(a, PromptScenario.OD, ctx)
    od_lc = render_body(a, PromptScenario.OD_LC, ctx)
    assert lc.startswith(base)
    assert od.startswith(base)
    assert od_lc.startswith(lc)
    lc_block = lc[len(base):]
    od_block = od[len(base):]
    assert od_lc == base + lc_block + od_block
    assert "The photograph was taken near Downtown Miami, Florida." in lc
    assert "The photograph was taken" not in od
    assert "list of objects (separated by semicolon)" in od
    assert "list of objects" not in lc


def test_rendering_is_pure():
    a = example_annotation()
    ctx = example_context()
    first = render_prompt(a, PromptScenario.OD_LC, ctx)
    second = render_prompt(a, PromptScenario.OD_LC, ctx)
    assert first.text == second.text
    assert first == second


def test_context_deduplicates_objects_preserving_order():
    ctx = PromptContext(detected_objects=("Signage", "Bench", "Signage", "Pole", "Bench"))
    assert ctx.detected_objects == ("Signage", "Bench", "Pole")
    text = render_body(example_annotation(), PromptScenario.OD, ctx)
    assert text.endswith("photograph: Signage; Bench; Pole")


def test_unknown_answers_render_na():
    a = Annotation(
        road_osm_id=1,
        image_id="i",
        analyst_id="a",
        caption="A street.",
    )
    text = render_body(a, PromptScenario.BASELINE, PromptContext())
    assert "mainly used by: N/A." in text
    assert "surface of the road is: N/A." in text
    assert "traffic lanes there are on the road, one would answer: N/A." in text
    assert "one-way road, one would answer: N/A." in text
    assert "street lights in the photograph, one would answer: N/A." in text


def test_prompt_record():
    prompt = render_prompt(example_annotation(), PromptScenario.LC)
    assert prompt.to_record() == {
        "road": 712,
        "analyst": "analyst1",
        "scenario": "lc",
        "text": prompt.text,
    }
    assert isinstance(prompt, Prompt)
