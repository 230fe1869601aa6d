"""Scoring of tag suggestions and the accuracy / lit-tag reports.

Two correctness methods are implemented:

* historical: the suggested highway value matches the current or any
  previous version of the road's highway tag (case-insensitive, trimmed).
* semantic: the suggested value falls in the same semantic road category
  as some version's value. An exact historical match always counts, so
  historical correctness implies semantic correctness for every input.

Report arithmetic uses decimal round-half-up throughout. Row and column
averages are means of the already-rounded cell percentages; pooled
averages computed from raw counts are carried alongside for audit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum

from tagscout.errors import PreconditionError, ValidationError
from tagscout.models import ParseStatus, PromptScenario, RoadSegment, TagSuggestion, TagVersion


class SemanticCategory(Enum):
    MAJOR_ACCESS_CONTROLLED = "major_access_controlled"
    MAIN_ROAD = "main_road"
    REGULAR_ROAD = "regular_road"
    NOT_MOTORIZED = "not_motorized"
    UNMAPPED = "unmapped"

    @property
    def label(self) -> str:
        return _CATEGORY_LABELS[self]


_CATEGORY_LABELS = {
    SemanticCategory.MAJOR_ACCESS_CONTROLLED: "Major, access controlled road",
    SemanticCategory.MAIN_ROAD: "Main road",
    SemanticCategory.REGULAR_ROAD: "Regular road",
    SemanticCategory.NOT_MOTORIZED: "Not for motorized traffic",
    SemanticCategory.UNMAPPED: "Unmapped",
}

CATEGORY_VALUES: dict[SemanticCategory, tuple[str, ...]] = {
    SemanticCategory.MAJOR_ACCESS_CONTROLLED: ("motorway", "trunk"),
    SemanticCategory.MAIN_ROAD: ("primary", "secondary", "tertiary"),
    SemanticCategory.REGULAR_ROAD: ("residential", "unclassified", "service"),
    SemanticCategory.NOT_MOTORIZED: ("pedestrian", "footway", "cycleway"),
}

_VALUE_TO_CATEGORY = {
    value: cat for cat, values in CATEGORY_VALUES.items() for value in values
}


def semantic_category(highway_value) -> SemanticCategory:
    """Map a highway value to its semantic road category (Unmapped if none)."""
    if highway_value is None:
        return SemanticCategory.UNMAPPED
    return _VALUE_TO_CATEGORY.get(
        str(highway_value).strip().lower(), SemanticCategory.UNMAPPED
    )


def _norm_highway(value) -> str:
    return "" if value is None else str(value).strip().lower()


def correct_historical(suggested_highway, history: list[TagVersion]) -> bool:
    """True iff the suggestion equals the highway value of any version."""
    if not history:
        raise PreconditionError("road history is empty")
    s = _norm_highway(suggested_highway)
    if not s:
        return False
    return any(_norm_highway(v.highway()) == s for v in history if v.highway() is not None)


def correct_semantic(
    suggested_highway, history: list[TagVersion], current_only: bool = False
) -> bool:
    """True iff the suggestion shares a semantic category with some version.

    Exact value matches are always correct (so semantic correctness is a
    superset of historical correctness). ``current_only`` restricts the
    comparison to the latest version.
    """
    versions = history[-1:] if current_only else history
    if correct_historical(suggested_highway, versions):
        return True
    cat = semantic_category(suggested_highway)
    if cat is SemanticCategory.UNMAPPED:
        return False
    return any(
        semantic_category(v.highway()) is cat
        for v in versions
        if v.highway() is not None
    )


def suggestion_is_correct(
    suggestion: TagSuggestion,
    road: RoadSegment,
    method: str,
    semantic_current_only: bool = False,
) -> bool:
    """Score one suggestion. Failed parses and missing highway keys score False."""
    if suggestion.parse_status is ParseStatus.FAILED:
        return False
    highway = suggestion.tags.get("highway")
    if highway is None:
        return False
    if method == "historical":
        return correct_historical(highway, road.history)
    if method == "semantic":
        return correct_semantic(highway, road.history, current_only=semantic_current_only)
    raise ValidationError(f"unknown method: {method!r}", ["method"])


# ---------------------------------------------------------------------------
# rounding helpers
# ---------------------------------------------------------------------------

_TENTH = Decimal("0.1")


def round1(x) -> Decimal:
    """Round to one decimal, half away from zero."""
    return Decimal(x).quantize(_TENTH, rounding=ROUND_HALF_UP)


def pct1(n_correct: int, n_total: int) -> Decimal:
    """Percentage with one decimal (round-half-up) from exact counts."""
    if n_total <= 0:
        return Decimal("0.0")
    return round1(Decimal(100 * n_correct) / Decimal(n_total))


def pct_int(n_correct: int, n_total: int) -> int:
    """Integer percentage, round-half-up (15/24 -> 63)."""
    if n_total <= 0:
        return 0
    return int(
        (Decimal(100 * n_correct) / Decimal(n_total)).quantize(
            Decimal("1"), rounding=ROUND_HALF_UP
        )
    )


def _mean1(values: list[Decimal]) -> Decimal:
    return round1(sum(values, Decimal(0)) / Decimal(len(values)))


# ---------------------------------------------------------------------------
# accuracy matrix
# ---------------------------------------------------------------------------


@dataclass
class CellScore:
    n_correct: int
    n_total: int
    pct: Decimal


@dataclass
class EvaluationReport:
    """The scenario x analyst accuracy matrix with averages and % change.

    ``row_avg``/``col_avg`` are means of the rounded cell percentages;
    ``row_avg_pooled``/``col_avg_pooled`` are the same quantities computed
    from pooled raw counts, emitted for audit.
    """

    method: str
    analysts: list[str]
    n_total: int
    excluded_roads: list[int]
    cells: dict[tuple[str, str], CellScore]  # (scenario value, analyst id)
    row_avg: dict[str, Decimal]
    pct_change: dict[str, Decimal | None]
    col_avg: dict[str, Decimal]
    row_avg_pooled: dict[str, Decimal] = field(default_factory=dict)
    col_avg_pooled: dict[str, Decimal] = field(default_factory=dict)

    def to_json(self) -> dict:
        scenarios = []
        for scenario in PromptScenario:
            sv = scenario.value
            scenarios.append(
                {
                    "scenario": sv,
                    "label": scenario.label,
                    "cells": [
                        {
                            "analyst_id": a,
                            "n_correct": self.cells[(sv, a)].n_correct,
                            "n_total": self.cells[(sv, a)].n_total,
                            "pct": float(self.cells[(sv, a)].pct),
                        }
                        for a in self.analysts
                    ],
                    "row_avg": float(self.row_avg[sv]),
                    "row_avg_pooled": float(self.row_avg_pooled[sv]),
                    "pct_change": (
                        None if self.pct_change[sv] is None else float(self.pct_change[sv])
                    ),
                }
            )
        return {
            "method": self.method,
            "analysts": self.analysts,
            "n_total": self.n_total,
            "excluded_roads": self.excluded_roads,
            "scenarios": scenarios,
            "col_avg": {a: float(self.col_avg[a]) for a in self.analysts},
            "col_avg_pooled": {a: float(self.col_avg_pooled[a]) for a in self.analysts},
        }


def accuracy_table(
    suggestions: list[TagSuggestion],
    roads: list[RoadSegment],
    method: str,
    analyst_order: list[str] | None = None,
    semantic_current_only: bool = False,
) -> EvaluationReport:
    """Build the accuracy matrix for one scoring method.

    Every (road, analyst, scenario) key may appear at most once. Roads
    missing any of the analyst x scenario suggestions are excluded from
    all cells (keeping n_total identical across the matrix) and reported
    in ``excluded_roads``.
    """
    if method not in ("historical", "semantic"):
        raise ValidationError(f"unknown method: {method!r}", ["method"])
    road_map = {r.osm_id: r for r in roads}

    by_key: dict[tuple[int, str, str], TagSuggestion] = {}
    for s in suggestions:
        if s.key in by_key:
            raise ValidationError(
                f"duplicate suggestion for road={s.road_osm_id} "
                f"analyst={s.analyst_id} scenario={s.scenario.value}",
                ["suggestions"],
            )
        if s.road_osm_id not in road_map:
            raise ValidationError(
                f"suggestion references unknown road {s.road_osm_id}", ["suggestions"]
            )
        by_key[s.key] = s

    analysts = analyst_order or sorted({s.analyst_id for s in suggestions})
    if not analysts:
        raise ValidationError("no suggestions to evaluate", ["suggestions"])
    scenarios = list(PromptScenario)

    complete, excluded = [], []
    for road in roads:
        have_all = all(
            (road.osm_id, a, sc.value) in by_key for a in analysts for sc in scenarios
        )
        (complete if have_all else excluded).append(road.osm_id)
    if not complete:
        raise ValidationError("no road has a complete suggestion set", ["suggestions"])

    cells: dict[tuple[str, str], CellScore] = {}
    for sc in scenarios:
        for a in analysts:
            n_correct = sum(
                1
                for rid in complete
                if suggestion_is_correct(
                    by_key[(rid, a, sc.value)],
                    road_map[rid],
                    method,
                    semantic_current_only=semantic_current_only,
                )
            )
            cells[(sc.value, a)] = CellScore(n_correct, len(complete), pct1(n_correct, len(complete)))

    n_total = len(complete)
    row_avg = {
        sc.value: _mean1([cells[(sc.value, a)].pct for a in analysts]) for sc in scenarios
    }
    baseline = row_avg[PromptScenario.BASELINE.value]
    pct_change = {
        sc.value: (None if sc is PromptScenario.BASELINE else row_avg[sc.value] - baseline)
        for sc in scenarios
    }
    col_avg = {
        a: _mean1([cells[(sc.value, a)].pct for sc in scenarios]) for a in analysts
    }
    row_avg_pooled = {
        sc.value: pct1(
            sum(cells[(sc.value, a)].n_correct for a in analysts),
            n_total * len(analysts),
        )
        for sc in scenarios
    }
    col_avg_pooled = {
        a: pct1(
            sum(cells[(sc.value, a)].n_correct for sc in scenarios),
            n_total * len(scenarios),
        )
        for a in analysts
    }
    return EvaluationReport(
        method=method,
        analysts=analysts,
        n_total=n_total,
        excluded_roads=sorted(excluded),
        cells=cells,
        row_avg=row_avg,
        pct_change=pct_change,
        col_avg=col_avg,
        row_avg_pooled=row_avg_pooled,
        col_avg_pooled=col_avg_pooled,
    )


# ---------------------------------------------------------------------------
# lit-tag report
# ---------------------------------------------------------------------------


@dataclass
class LitAnalystScore:
    analyst_id: str
    n_ground_truth: int
    n_correct: int
    pct_correct: int  # integer percent, round-half-up
    n_additional: int
    additional_road_ids: list[int]


@dataclass
class LitReport:
    scenario: PromptScenario
    per_analyst: list[LitAnalystScore]
    n_at_least_two: int
    n_all_three: int

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "per_analyst": [
                {
                    "analyst_id": s.analyst_id,
                    "n_ground_truth": s.n_ground_truth,
                    "n_correct": s.n_correct,
                    "pct_correct": s.pct_correct,
                    "n_additional": s.n_additional,
                }
                for s in self.per_analyst
            ],
            "n_at_least_two": self.n_at_least_two,
            "n_all_three": self.n_all_three,
        }


def _lit_is_yes(value) -> bool:
    if value is True:
        return True
    if isinstance(value, str):
        return value.strip().lower() == "yes"
    return False


def lit_report(
    suggestions: list[TagSuggestion],
    roads: list[RoadSegment],
    scenario: PromptScenario = PromptScenario.OD,
    analyst_order: list[str] | None = None,
) -> LitReport:
    """Per-analyst lit-tag hits on ground-truth roads plus consensus counts
    for the additional (not-yet-tagged) roads, for one scenario."""
    subset = [s for s in suggestions if s.scenario is scenario]
    analysts = analyst_order or sorted({s.analyst_id for s in subset})
    by_key = {(s.road_osm_id, s.analyst_id): s for s in subset}

    gt_ids = {
        r.osm_id for r in roads if _lit_is_yes(r.current_tags.get("lit"))
    }
    other_ids = [r.osm_id for r in roads if r.osm_id not in gt_ids]

    per_analyst = []
    additional_sets: list[set[int]] = []
    for a in analysts:
        def suggested_lit(rid: int) -> bool:
            s = by_key.get((rid, a))
            return s is not None and _lit_is_yes(s.tags.get("lit"))

        n_correct = sum(1 for rid in gt_ids if suggested_lit(rid))
        additional = sorted(rid for rid in other_ids if suggested_lit(rid))
        additional_sets.append(set(additional))
        per_analyst.append(
            LitAnalystScore(
                analyst_id=a,
                n_ground_truth=len(gt_ids),
                n_correct=n_correct,
                pct_correct=pct_int(n_correct, len(gt_ids)),
                n_additional=len(additional),
                additional_road_ids=additional,
            )
        )

    union = set().union(*additional_sets) if additional_sets else set()
    n_at_least_two = sum(
        1 for rid in union if sum(rid in s for s in additional_sets) >= 2
    )
    n_all = sum(
        1
        for rid in union
        if sum(rid in s for s in additional_sets) == len(additional_sets)
    ) if additional_sets else 0
    return LitReport(
        scenario=scenario,
        per_analyst=per_analyst,
        n_at_least_two=n_at_least_two,
        n_all_three=n_all,
    )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _col_label(analyst_id: str, display_names: dict[str, str] | None) -> str:
    if display_names and analyst_id in display_names:
        return display_names[analyst_id]
    return analyst_id


def render_report_text(
    report: EvaluationReport, display_names: dict[str, str] | None = None
) -> str:
    """Fixed-width text rendering: scenario rows, analyst columns, average
    column, % change column, and an analyst-average footer row."""
    labels = [_col_label(a, display_names) for a in report.analysts]
    title = {
        "historical": 'Accuracy based on historical "highway" values',
        "semantic": "Accuracy based on semantic road categories",
    }[report.method]
    header = ["Scenario"] + labels + ["Avg. correct [%]", "% change"]
    rows = [header]
    for scenario in PromptScenario:
        sv = scenario.value
        change = report.pct_change[sv]
        rows.append(
            [scenario.label]
            + [str(report.cells[(sv, a)].pct) for a in report.analysts]
            + [str(report.row_avg[sv]), "-" if change is None else f"{change:+}"]
        )
    rows.append(
        ["Avg. correct [%]"] + [str(report.col_avg[a]) for a in report.analysts] + ["", ""]
    )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = [f"{title} (n={report.n_total})"]
    for r in rows:
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                for i, cell in enumerate(r)
            ).rstrip()
        )
    if report.excluded_roads:
        lines.append(f"Excluded roads (incomplete suggestions): {report.excluded_roads}")
    return "\n".join(lines) + "\n"


def render_report_csv(
    report: EvaluationReport, display_names: dict[str, str] | None = None
) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labels = [_col_label(a, display_names) for a in report.analysts]
    w.writerow(["scenario"] + labels + ["avg_correct_pct", "pct_change"])
    for scenario in PromptScenario:
        sv = scenario.value
        change = report.pct_change[sv]
        w.writerow(
            [scenario.label]
            + [str(report.cells[(sv, a)].pct) for a in report.analysts]
            + [str(report.row_avg[sv]), "" if change is None else f"{change:+}"]
        )
    w.writerow(
        ["avg_correct_pct"] + [str(report.col_avg[a]) for a in report.analysts] + ["", ""]
    )
    return buf.getvalue()


def render_lit_csv(
    report: LitReport, display_names: dict[str, str] | None = None
) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labels = [_col_label(s.analyst_id, display_names) for s in report.per_analyst]
    w.writerow([""] + labels)
    w.writerow(
        ["correctly_tagged"]
        + [f"{s.n_correct} ({s.pct_correct}%)" for s in report.per_analyst]
    )
    w.writerow(["additional"] + [str(s.n_additional) for s in report.per_analyst])
    w.writerow(["suggested_by_at_least_two", str(report.n_at_least_two)])
    w.writerow(["suggested_by_all", str(report.n_all_three)])
    return buf.getvalue()
