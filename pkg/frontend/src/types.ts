// Payload shapes mirrored from the workbench HTTP API. The UI treats these
// as the single source of truth: correctness flags, category labels, and
// report numbers are rendered as received, never recomputed client-side.

export type ScenarioValue = "baseline" | "lc" | "od" | "od_lc";

export const SCENARIOS: ReadonlyArray<{ value: ScenarioValue; label: string }> = [
  { value: "baseline", label: "Baseline" },
  { value: "lc", label: "LC" },
  { value: "od", label: "OD" },
  { value: "od_lc", label: "OD + LC" },
];

export type Verdict = "accept" | "reject" | "unsure";

export const VERDICTS: ReadonlyArray<Verdict> = ["accept", "reject", "unsure"];

export interface Question {
  variable: string;
  text: string;
}

export interface Analyst {
  analyst_id: string;
  kind: "human" | "artificial";
  display_name: string;
}

export interface RoadRow {
  osm_id: number;
  highway: string | null;
  length_m: number;
  matched_image_id: string | null;
  annotated_by: Record<string, boolean>;
  n_suggestions: number;
  n_reviewed: number;
}

export interface TagHistoryVersion {
  version: number;
  tags: Record<string, string>;
  timestamp: string;
}

export interface AnnotationRecord {
  road_osm_id: number;
  image_id: string;
  analyst_id: string;
  caption: string;
  users: string;
  lanes: number | null;
  surface: string | null;
  oneway: string;
  lit: string;
}

export interface RoadDetail {
  osm_id: number;
  geometry: Array<[number, number]>;
  tags: Record<string, string>;
  history: TagHistoryVersion[];
  length_m: number;
  matched_image_id: string | null;
  image_url: string | null;
  detections: string[];
  annotations: AnnotationRecord[];
}

export interface SuggestionView {
  road_osm_id: number;
  analyst_id: string;
  scenario: ScenarioValue;
  raw_response: string;
  tags: Record<string, unknown>;
  parse_status: "ok" | "recovered" | "failed";
  missing_highway: boolean;
  created_at: string;
  suggestion_id: string;
  highway: string | null;
  semantic_category: string | null;
  correct_historical: boolean;
  correct_semantic: boolean;
  verdict: Verdict | null;
}

export interface ReportCell {
  analyst_id: string;
  n_correct: number;
  n_total: number;
  pct: number;
}

export interface ReportScenarioRow {
  scenario: ScenarioValue;
  label: string;
  cells: ReportCell[];
  row_avg: number;
  row_avg_pooled: number;
  pct_change: number | null;
}

export interface Report {
  method: string;
  analysts: string[];
  n_total: number;
  excluded_roads: number[];
  scenarios: ReportScenarioRow[];
  col_avg: Record<string, number>;
  col_avg_pooled: Record<string, number>;
}

export interface ReviewRecord {
  suggestion_id: string;
  verdict: Verdict;
  ts: string;
}

export interface JobRecord {
  job_id: string;
  kind: string;
  status: "pending" | "running" | "done" | "failed";
  started_at: string | null;
  finished_at: string | null;
  processed: number;
  failed: number;
}

// Outbound annotation body. Structured fields left unanswered are sent as
// null; the server stores them as unknown.
export interface AnnotationDraft {
  road_osm_id: number;
  analyst_id: string;
  image_id?: string | null;
  caption: string;
  users?: string | null;
  lanes?: string | number | null;
  surface?: string | null;
  oneway?: string | null;
  lit?: string | null;
}
