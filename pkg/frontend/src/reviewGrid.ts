import { ApiError, WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";
import type {
  Analyst,
  RoadDetail,
  SuggestionView,
  Verdict,
} from "./types.js";
import { SCENARIOS, VERDICTS } from "./types.js";

export interface ReviewGridOptions {
  onStale?: () => void; // a reviewed suggestion vanished server-side
}

function badge(text: string, on: boolean): HTMLElement {
  return el("span", { class: `badge ${on ? "match" : "miss"}` }, text);
}

function mapSnippet(road: RoadDetail): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "map-snippet");
  svg.setAttribute("viewBox", "0 0 100 100");
  const lons = road.geometry.map((p) => p[0]);
  const lats = road.geometry.map((p) => p[1]);
  const minLon = Math.min(...lons);
  const minLat = Math.min(...lats);
  const spanLon = Math.max(...lons) - minLon || 1e-9;
  const spanLat = Math.max(...lats) - minLat || 1e-9;
  const span = Math.max(spanLon, spanLat);
  const points = road.geometry
    .map(([lon, lat]) => {
      const x = 5 + (90 * (lon - minLon)) / span;
      const y = 95 - (90 * (lat - minLat)) / span;
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
  const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "currentColor");
  line.setAttribute("stroke-width", "2");
  svg.append(line);
  return svg;
}

export class ReviewGrid {
  readonly root: HTMLElement;
  private readonly byCell = new Map<string, SuggestionView>();
  private readonly banner: HTMLElement;

  constructor(
    private readonly api: WorkbenchClient,
    private readonly analysts: Analyst[],
    private readonly road: RoadDetail,
    suggestions: SuggestionView[],
    private readonly opts: ReviewGridOptions = {},
  ) {
    for (const s of suggestions) {
      this.byCell.set(`${s.analyst_id}:${s.scenario}`, s);
    }
    this.banner = el("div", { class: "banner", role: "alert", hidden: true });
    this.root = el(
      "section",
      { class: "review-screen" },
      this.buildHeader(),
      this.banner,
      this.buildGrid(),
    );
  }

  private buildHeader(): HTMLElement {
    const tagList = Object.entries(this.road.tags)
      .map(([k, v]) => `${k}=${v}`)
      .join(", ");
    const history = this.road.history
      .map((v) => `v${v.version}: ${v.tags["highway"] ?? "(no highway)"}`)
      .join("  ");
    return el(
      "header",
      { class: "review-header" },
      mapSnippet(this.road),
      el(
        "div",
        {},
        el("h2", {}, `Road ${this.road.osm_id}`),
        el("div", { class: "current-tags" }, tagList),
        el("div", { class: "tag-history" }, history),
      ),
    );
  }

  private buildGrid(): HTMLElement {
    const table = el("table", { class: "suggestion-grid" });
    const head = el("tr", {}, el("th", {}, "Analyst"));
    for (const sc of SCENARIOS) head.append(el("th", {}, sc.label));
    table.append(el("thead", {}, head));
    const body = el("tbody", {});
    for (const analyst of this.analysts) {
      const row = el("tr", {}, el("th", {}, analyst.display_name));
      for (const sc of SCENARIOS) {
        row.append(this.buildCell(analyst.analyst_id, sc.value));
      }
      body.append(row);
    }
    table.append(body);
    return table;
  }

  private buildCell(analystId: string, scenario: string): HTMLTableCellElement {
    const cell = el("td", { class: "cell", "data-cell": `${analystId}:${scenario}` });
    const s = this.byCell.get(`${analystId}:${scenario}`);
    if (!s || s.parse_status === "failed") {
      // a missing suggestion is indistinguishable from a failed one here
      cell.classList.add("failed");
      cell.append(el("span", { class: "failure-marker" }, "failed"));
      return cell;
    }
    cell.append(
      el("div", { class: "highway-value" }, s.highway ?? "(no highway)"),
      el("div", { class: "category-badge" }, s.semantic_category ?? "Unmapped"),
      el(
        "div",
        { class: "correctness" },
        badge(s.correct_historical ? "history: match" : "history: no match", s.correct_historical),
        badge(s.correct_semantic ? "category: match" : "category: no match", s.correct_semantic),
      ),
      this.buildVerdictPicker(s),
    );
    return cell;
  }

  private buildVerdictPicker(s: SuggestionView): HTMLElement {
    const picker = el("div", { class: "verdict-picker" });
    for (const verdict of VERDICTS) {
      const button = el(
        "button",
        { type: "button", class: "verdict", "data-verdict": verdict },
        verdict,
      );
      if (s.verdict === verdict) button.classList.add("selected");
      button.addEventListener("click", () => void this.submitVerdict(s, verdict, picker));
      picker.append(button);
    }
    return picker;
  }

  private async submitVerdict(
    s: SuggestionView,
    verdict: Verdict,
    picker: HTMLElement,
  ): Promise<void> {
    try {
      const record = await this.api.review(s.suggestion_id, verdict);
      // reflect the server-confirmed verdict, not the clicked one
      s.verdict = record.verdict;
      this.banner.hidden = true;
      for (const button of picker.querySelectorAll("button.verdict")) {
        button.classList.toggle(
          "selected",
          button.getAttribute("data-verdict") === record.verdict,
        );
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.banner.hidden = false;
        this.banner.className = "banner error";
        this.banner.textContent =
          "This suggestion no longer exists on the server; refresh the road.";
        this.opts.onStale?.();
      } else {
        this.banner.hidden = false;
        this.banner.className = "banner error";
        this.banner.textContent = err instanceof Error ? err.message : String(err);
      }
    }
  }

  verdictOf(analystId: string, scenario: string): Verdict | null {
    return this.byCell.get(`${analystId}:${scenario}`)?.verdict ?? null;
  }

  mount(parent: HTMLElement): void {
    clear(parent).append(this.root);
  }
}
