"""Chat bridge: response parsing, caching, retries, and orchestration."""

import json
import random
import re
import string

import pytest

from tagscout.errors import ConfigError, PreconditionError, TransportError, ValidationError
from tagscout.llm import (
    AuditLog,
    MockChatBackend,
    ModelConfig,
    ResponseCache,
    build_suggestion,
    complete,
    extract_tag_map,
    prompt_messages,
    response_cache_key,
    serialize_tag_map,
    suggest_all,
    utcnow_iso,
)
from tagscout.models import ParseStatus, PromptScenario
from tagscout.prompts import PREAMBLE, PromptContext, render_prompt

from conftest import make_annotation, make_road

# ---------------------------------------------------------------------------
# parser corpus: 10 ok, 10 recovered, 10 failed
# ---------------------------------------------------------------------------

OK = ParseStatus.OK
RECOVERED = ParseStatus.RECOVERED
FAILED = ParseStatus.FAILED

PARSER_CORPUS = [
    # --- bare objects ---
    ('{"highway": "residential"}', OK, {"highway": "residential"}),
    ('{"highway": "primary", "lanes": 2}', OK, {"highway": "primary", "lanes": 2}),
    ('\n  {"highway": "service", "surface": "asphalt"}\n', OK,
     {"highway": "service", "surface": "asphalt"}),
    ('{"HIGHWAY": "Residential"}', OK, {"highway": "Residential"}),
    ('{"highway": "residential", "lit": true}', OK, {"highway": "residential", "lit": True}),
    ('{"highway": "residential", "lanes": 2.0}', OK, {"highway": "residential", "lanes": 2}),
    ('{"highway": "residential", "width": 3.5}', OK,
     {"highway": "residential", "width": "3.5"}),
    ('{"highway": "residential", "note": null}', OK, {"highway": "residential"}),
    ('{"oneway": "yes", "surface": "asphalt"}', OK, {"oneway": "yes", "surface": "asphalt"}),
    ('{\n  "highway": "tertiary",\n  "lanes": 4\n}', OK, {"highway": "tertiary", "lanes": 4}),
    # --- fenced / prose-wrapped ---
    ('```json\n{"highway": "residential"}\n```', RECOVERED, {"highway": "residential"}),
    ('```\n{"highway": "tertiary"}\n```', RECOVERED, {"highway": "tertiary"}),
    ('Here is my suggestion: {"highway": "residential"} I hope this helps!',
     RECOVERED, {"highway": "residential"}),
    ('Sure! {"highway": "unclassified", "surface": "asphalt"}.',
     RECOVERED, {"highway": "unclassified", "surface": "asphalt"}),
    ('Based on the description, the tags are:\n\n{"highway": "footway"}',
     RECOVERED, {"highway": "footway"}),
    ('Answer: {"highway": "residential", "name": "Joe\'s {fancy} road"}',
     RECOVERED, {"highway": "residential", "name": "Joe's {fancy} road"}),
    ('{not json} then {"highway": "service"}', RECOVERED, {"highway": "service"}),
    ('Result: {"highway": "residential", "note": "a \\"quoted\\" word"}',
     RECOVERED, {"highway": "residential", "note": 'a "quoted" word'}),
    ('```json\n{"highway": "primary"}\n``` {,}', RECOVERED, {"highway": "primary"}),
    ('stray } first, object later: {"highway": "pedestrian"}',
     RECOVERED, {"highway": "pedestrian"}),
    # --- failures ---
    ("", FAILED, {}),
    ("   \n  ", FAILED, {}),
    ("I cannot determine the road type from this description.", FAILED, {}),
    ("{}", FAILED, {}),
    ('{"highway": {"value": "residential"}}', FAILED, {}),
    ('{"tags": ["highway=residential"]}', FAILED, {}),
    ('{"highway": "resi', FAILED, {}),
    ("{this is not json}", FAILED, {}),
    ('{"highway": null}', FAILED, {}),
    ('"just a quoted string"', FAILED, {}),
]


def test_parser_corpus_is_thirty_cases():
    assert len(PARSER_CORPUS) == 30
    by_status = {OK: 0, RECOVERED: 0, FAILED: 0}
    for _, status, _ in PARSER_CORPUS:
        by_status[status] += 1
    assert by_status == {OK: 10, RECOVERED: 10, FAILED: 10}


@pytest.mark.parametrize("raw,status,tags", PARSER_CORPUS)
def test_parser_corpus(raw, status, tags):
    got_tags, got_status = extract_tag_map(raw)
    assert got_status is status
    assert got_tags == tags
    if status is FAILED:
        assert got_tags == {}
    else:
        assert got_tags


def test_extract_is_total_on_junk():
    for junk in [None, 42, 3.5, b"{}", ["{}"], {"highway": "x"}, object()]:
        tags, status = extract_tag_map(junk)
        assert status is FAILED
        assert tags == {}


def test_round_trip_random_flat_maps():
    rng = random.Random(1234)
    alphabet = string.ascii_lowercase + string.digits + "_:"
    printable = string.ascii_letters + string.digits + " .,;:!?'\"\\/{}[]-_éüß漢"

    def rand_key():
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))

    def rand_value():
        kind = rng.randrange(3)
        if kind == 0:
            return "".join(rng.choice(printable) for _ in range(rng.randint(0, 30)))
        if kind == 1:
            return rng.randint(-10_000, 10_000)
        return rng.random() < 0.5

    for _ in range(1000):
        tags = {}
        while len(tags) < rng.randint(1, 8):
            tags[rand_key()] = rand_value()
        got, status = extract_tag_map(serialize_tag_map(tags))
        assert status is OK
        assert got == tags


# ---------------------------------------------------------------------------
# config, messages, cache keys
# ---------------------------------------------------------------------------


def test_model_config_validation():
    ModelConfig(temperature=0.0)
    ModelConfig(temperature=2.0)
    with pytest.raises(ValidationError):
        ModelConfig(temperature=2.5)
    with pytest.raises(ValidationError):
        ModelConfig(temperature=-0.1)
    with pytest.raises(ValidationError):
        ModelConfig(max_retries=-1)


def sample_prompt(scenario=PromptScenario.BASELINE):
    return render_prompt(make_annotation(), scenario, PromptContext())


def test_prompt_messages_single_user_by_default():
    msgs = prompt_messages(sample_prompt(), ModelConfig())
    assert [m["role"] for m in msgs] == ["user"]
    assert msgs[0]["content"].startswith(PREAMBLE)


def test_prompt_messages_system_split():
    msgs = prompt_messages(sample_prompt(), ModelConfig(system_preamble=True))
    assert [m["role"] for m in msgs] == ["system", "user"]
    assert msgs[0]["content"] == PREAMBLE
    assert not msgs[1]["content"].startswith(PREAMBLE)


def test_response_cache_key_depends_on_both_parts():
    a = response_cache_key("model-a", "prompt")
    b = response_cache_key("model-b", "prompt")
    c = response_cache_key("model-a", "prompt2")
    assert len({a, b, c}) == 3
    assert re.fullmatch(r"[0-9a-f]{64}", a)


def test_utcnow_iso_format():
    assert re.fullmatch(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z", utcnow_iso())


# ---------------------------------------------------------------------------
# complete(): retries, caching, auditing
# ---------------------------------------------------------------------------


class FlakyBackend:
    """Raises TransportError for the first ``fail_times`` calls."""

    def __init__(self, fail_times=0, response='{"highway": "residential"}'):
        self.fail_times = fail_times
        self.response = response
        self.calls = 0

    def complete(self, prompt, cfg):
        self.calls += 1
        if self.calls <= self.fail_times:
            raise TransportError("boom")
        return self.response


class RejectingBackend:
    def __init__(self):
        self.calls = 0

    def complete(self, prompt, cfg):
        self.calls += 1
        raise ConfigError("bad request")


def fast_cfg(**kw):
    kw.setdefault("backoff_base_s", 0.0)
    return ModelConfig(**kw)


def test_complete_retries_then_succeeds():
    backend = FlakyBackend(fail_times=2)
    text, created_at = complete(sample_prompt(), fast_cfg(max_retries=3), backend)
    assert text == '{"highway": "residential"}'
    assert backend.calls == 3
    assert re.fullmatch(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z", created_at)


def test_complete_exhausts_retries():
    backend = FlakyBackend(fail_times=99)
    with pytest.raises(TransportError):
        complete(sample_prompt(), fast_cfg(max_retries=2), backend)
    assert backend.calls == 3  # initial try plus two retries


def test_complete_config_error_not_retried():
    backend = RejectingBackend()
    with pytest.raises(ConfigError):
        complete(sample_prompt(), fast_cfg(max_retries=5), backend)
    assert backend.calls == 1


def test_complete_cache_hit_preserves_created_at(tmp_path):
    cache = ResponseCache(tmp_path / "llm")
    prompt = sample_prompt()
    first_backend = FlakyBackend()
    text1, created1 = complete(prompt, fast_cfg(), first_backend, cache=cache)
    assert first_backend.calls == 1

    second_backend = FlakyBackend(response="SHOULD NOT BE USED")
    text2, created2 = complete(prompt, fast_cfg(), second_backend, cache=cache)
    assert second_backend.calls == 0
    assert text2 == text1
    assert created2 == created1


def test_complete_audits_real_calls_only(tmp_path):
    cache = ResponseCache(tmp_path / "llm")
    audit = AuditLog(tmp_path / "audit.jsonl")
    prompt = sample_prompt()
    complete(prompt, fast_cfg(), FlakyBackend(), cache=cache, audit=audit)
    assert audit.line_count() == 1
    # cache hit: no backend call, no audit line
    complete(prompt, fast_cfg(), FlakyBackend(), cache=cache, audit=audit)
    assert audit.line_count() == 1


def test_complete_audits_error_attempts(tmp_path):
    audit = AuditLog(tmp_path / "audit.jsonl")
    complete(sample_prompt(), fast_cfg(max_retries=3), FlakyBackend(fail_times=2), audit=audit)
    records = [json.loads(line) for line in audit.path.read_text().splitlines()]
    assert [r["status"] for r in records] == ["error", "error", "ok"]
    assert [r["attempt"] for r in records] == [1, 2, 3]


def test_response_cache_round_trip(tmp_path):
    cache = ResponseCache(tmp_path / "llm")
    assert cache.get("0" * 64) is None
    entry = {"model": "m", "prompt_sha256": "0" * 64, "response": "r", "created_at": "t"}
    cache.put("0" * 64, entry)
    assert cache.get("0" * 64) == entry


# ---------------------------------------------------------------------------
# mock backend
# ---------------------------------------------------------------------------


def test_mock_backend_from_file(tmp_path):
    path = tmp_path / "mock.jsonl"
    path.write_text(
        json.dumps({"key": "1|analyst1|baseline", "response": '{"highway": "x"}'}) + "\n\n"
        + json.dumps({"key": "1|analyst1|lc", "response": '{"highway": "y"}'}) + "\n"
    )
    backend = MockChatBackend.from_file(path)
    prompt = render_prompt(make_annotation(), PromptScenario.BASELINE, PromptContext())
    assert backend.complete(prompt, ModelConfig()) == '{"highway": "x"}'
    od_prompt = render_prompt(make_annotation(), PromptScenario.OD, PromptContext())
    with pytest.raises(ConfigError):
        backend.complete(od_prompt, ModelConfig())


def test_mock_backend_default():
    backend = MockChatBackend({}, default='{"highway": "road"}')
    prompt = render_prompt(make_annotation(), PromptScenario.OD, PromptContext())
    assert backend.complete(prompt, ModelConfig()) == '{"highway": "road"}'


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def test_build_suggestion_missing_highway_flag():
    s = build_suggestion(1, "a", PromptScenario.BASELINE, '{"surface": "asphalt"}', "t")
    assert s.parse_status is OK
    assert s.missing_highway
    ok = build_suggestion(1, "a", PromptScenario.BASELINE, '{"highway": "service"}', "t")
    assert not ok.missing_highway
    failed = build_suggestion(1, "a", PromptScenario.BASELINE, "nope", "t")
    assert failed.parse_status is FAILED
    assert not failed.missing_highway


def three_annotations(road_id=1):
    return [
        make_annotation(road_id, "blip2"),
        make_annotation(road_id, "analyst2"),
        make_annotation(road_id, "analyst1"),
    ]


def test_suggest_all_full_matrix_ordered():
    road = make_road(1, ("residential",))
    backend = MockChatBackend({}, default='{"highway": "residential"}')
    out = suggest_all(road, three_annotations(), PromptContext(), fast_cfg(), backend)
    assert len(out) == 12
    assert backend.calls == 12
    expected = [
        (a, sc.value)
        for a in ["analyst1", "analyst2", "blip2"]
        for sc in PromptScenario
    ]
    assert [(s.analyst_id, s.scenario.value) for s in out] == expected
    assert all(s.road_osm_id == 1 for s in out)
    assert all(s.parse_status is OK for s in out)


def test_suggest_all_rejects_foreign_annotation():
    road = make_road(1)
    anns = three_annotations() + [make_annotation(2, "zz")]
    with pytest.raises(PreconditionError):
        suggest_all(road, anns, PromptContext(), fast_cfg(), MockChatBackend({}, default="{}"))


def test_suggest_all_roster_names_missing_analysts():
    road = make_road(1)
    anns = [make_annotation(1, "analyst1")]
    with pytest.raises(PreconditionError) as exc:
        suggest_all(
            road, anns, PromptContext(), fast_cfg(),
            MockChatBackend({}, default="{}"),
            analysts=["analyst1", "analyst2", "blip2"],
        )
    assert "analyst2" in str(exc.value)
    assert "blip2" in str(exc.value)


def test_suggest_all_requires_three_without_roster():
    road = make_road(1)
    anns = [make_annotation(1, "analyst1"), make_annotation(1, "analyst2")]
    with pytest.raises(PreconditionError):
        suggest_all(road, anns, PromptContext(), fast_cfg(), MockChatBackend({}, default="{}"))


def test_suggest_all_backend_failure_becomes_failed_suggestion():
    road = make_road(1)
    backend = FlakyBackend(fail_times=10_000)
    out = suggest_all(
        road, three_annotations(), PromptContext(), fast_cfg(max_retries=0), backend
    )
    assert len(out) == 12
    assert all(s.parse_status is FAILED for s in out)
    assert all(s.raw_response == "" for s in out)


def test_suggest_all_scenario_subset():
    road = make_road(1)
    backend = MockChatBackend({}, default='{"highway": "residential"}')
    out = suggest_all(
        road, three_annotations(), PromptContext(), fast_cfg(), backend,
        scenarios=[PromptScenario.OD],
    )
    assert len(out) == 3
    assert {s.scenario for s in out} == {PromptScenario.OD}
