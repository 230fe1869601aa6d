import type {
  Analyst,
  AnnotationDraft,
  AnnotationRecord,
  JobRecord,
  Question,
  Report,
  ReviewRecord,
  RoadDetail,
  RoadRow,
  SuggestionView,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;
  readonly fields: string[];

  constructor(status: number, detail: string, fields: string[] = []) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
    this.fields = fields;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = `HTTP ${res.status}`;
      let fields: string[] = [];
      try {
        const body = (await res.json()) as { detail?: unknown; fields?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
        if (Array.isArray(body.fields)) fields = body.fields.map(String);
      } catch {
        // non-JSON error body, keep the generic detail
      }
      throw new ApiError(res.status, detail, fields);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  questions(): Promise<Question[]> {
    return this.request("/api/questions");
  }

  analysts(): Promise<Analyst[]> {
    return this.request("/api/analysts");
  }

  roads(): Promise<RoadRow[]> {
    return this.request("/api/roads");
  }

  road(osmId: number): Promise<RoadDetail> {
    return this.request(`/api/roads/${osmId}`);
  }

  suggestions(roadOsmId: number): Promise<SuggestionView[]> {
    return this.request(`/api/suggestions?road=${roadOsmId}`);
  }

  report(method: "historical" | "semantic"): Promise<Report> {
    return this.request(`/api/report?method=${method}`);
  }

  litReport(): Promise<unknown> {
    return this.request("/api/lit-report");
  }

  submitAnnotation(draft: AnnotationDraft): Promise<AnnotationRecord> {
    return this.post("/api/annotations", draft);
  }

  review(suggestionId: string, verdict: Verdict): Promise<ReviewRecord> {
    return this.post(`/api/review/${encodeURIComponent(suggestionId)}`, { verdict });
  }

  suggestRoad(roadOsmId: number, analystId: string): Promise<SuggestionView[]> {
    return this.post(`/api/suggest/${roadOsmId}`, { analyst_id: analystId });
  }

  startSuggestJob(): Promise<JobRecord> {
    return this.post("/api/jobs", { kind: "suggest" });
  }

  job(jobId: string): Promise<JobRecord> {
    return this.request(`/api/jobs/${encodeURIComponent(jobId)}`);
  }
}
