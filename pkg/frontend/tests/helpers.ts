import type {
  Analyst,
  AnnotationRecord,
  Question,
  RoadDetail,
  SuggestionView,
} from "../src/types.js";
import type { FetchLike } from "../src/api.js";

export const QUESTIONS: Question[] = [
  { variable: "caption", text: "Describe what you see in the photo in your own words." },
  {
    variable: "users",
    text: "Who are the primary users of the road that is located in the middle of the photograph? Cars, pedestrians or bicyclists?",
  },
  {
    variable: "lanes",
    text: "How many traffic lanes are there on the road that is in the middle of the photograph?",
  },
  {
    variable: "surface",
    text: "What is the material of the surface of the road that is in the center of the photograph",
  },
  { variable: "oneway", text: "Is the road that is in the center of the photograph one-way?" },
  { variable: "lit", text: "Are there any street lights in the photograph?" },
];

export const ANALYSTS: Analyst[] = [
  { analyst_id: "blip2", kind: "artificial", display_name: "BLIP-2" },
  { analyst_id: "analyst1", kind: "human", display_name: "Analyst #1" },
  { analyst_id: "analyst2", kind: "human", display_name: "Analyst #2" },
];

export function roadDetail(overrides: Partial<RoadDetail> = {}): RoadDetail {
  return {
    osm_id: 42,
    geometry: [
      [-80.2, 25.77],
      [-80.199, 25.771],
    ],
    tags: { highway: "residential", name: "NW 1st Ave" },
    history: [
      { version: 1, tags: { highway: "residential" }, timestamp: "2016-01-01T00:00:00Z" },
    ],
    length_m: 140.5,
    matched_image_id: "im-42",
    image_url: "image://im-42",
    detections: ["Signage"],
    annotations: [],
    ...overrides,
  };
}

export function annotationRecord(overrides: Partial<AnnotationRecord> = {}): AnnotationRecord {
  return {
    road_osm_id: 42,
    image_id: "im-42",
    analyst_id: "analyst1",
    caption: "A quiet residential street.",
    users: "cars",
    lanes: 2,
    surface: "asphalt",
    oneway: "no",
    lit: "yes",
    ...overrides,
  };
}

export function suggestionView(overrides: Partial<SuggestionView> = {}): SuggestionView {
  const base: SuggestionView = {
    road_osm_id: 42,
    analyst_id: "analyst1",
    scenario: "baseline",
    raw_response: '{"highway": "residential"}',
    tags: { highway: "residential" },
    parse_status: "ok",
    missing_highway: false,
    created_at: "2026-01-01T00:00:00Z",
    suggestion_id: "42:analyst1:baseline",
    highway: "residential",
    semantic_category: "Regular road",
    correct_historical: true,
    correct_semantic: true,
    verdict: null,
  };
  const merged = { ...base, ...overrides };
  merged.suggestion_id = `${merged.road_osm_id}:${merged.analyst_id}:${merged.scenario}`;
  return merged;
}

export interface StubCall {
  url: string;
  init?: RequestInit;
}

// fetch stub with canned route handlers; records every call for assertions
export function stubFetch(
  routes: Record<string, (call: StubCall) => { status?: number; body: unknown }>,
): { fetch: FetchLike; calls: StubCall[] } {
  const calls: StubCall[] = [];
  const impl: FetchLike = async (url, init) => {
    const call = { url, init };
    calls.push(call);
    const method = init?.method ?? "GET";
    const key = `${method} ${url.split("?")[0]}`;
    const handler = routes[key] ?? routes[`${method} *`];
    if (!handler) {
      return new Response(JSON.stringify({ detail: `no stub for ${key}` }), { status: 500 });
    }
    const { status = 200, body } = handler(call);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetch: impl, calls };
}

export function postedBody(call: StubCall): unknown {
  return JSON.parse(String(call.init?.body ?? "null"));
}
