import { WorkbenchClient } from "./api.js";
import { AnnotationForm } from "./annotationForm.js";
import { Dashboard } from "./dashboard.js";
import { clear, el } from "./dom.js";
import { ReviewGrid } from "./reviewGrid.js";
import type { Analyst, Question, RoadRow } from "./types.js";

type Tab = "annotate" | "review" | "dashboard";

class App {
  private readonly api = new WorkbenchClient();
  private analysts: Analyst[] = [];
  private questions: Question[] = [];
  private roads: RoadRow[] = [];
  private analystId: string | null = null;
  private tab: Tab = "annotate";
  private selectedRoad: number | null = null;
  private readonly main = el("main", { class: "pane" });
  private readonly sidebar = el("aside", { class: "road-list" });

  constructor(private readonly rootEl: HTMLElement) {}

  async start(): Promise<void> {
    [this.analysts, this.questions, this.roads] = await Promise.all([
      this.api.analysts(),
      this.api.questions(),
      this.api.roads(),
    ]);
    this.renderAnalystPicker();
  }

  // session starts by picking who is annotating; no auth, by design
  private renderAnalystPicker(): void {
    const picker = el("section", { class: "analyst-picker" }, el("h1", {}, "Who is working?"));
    for (const analyst of this.analysts) {
      const button = el("button", { type: "button", class: "analyst" }, analyst.display_name);
      button.addEventListener("click", () => {
        this.analystId = analyst.analyst_id;
        this.renderShell();
      });
      picker.append(button);
    }
    clear(this.rootEl).append(picker);
  }

  private renderShell(): void {
    const tabs = el("nav", { class: "tabs" });
    const entries: Array<[Tab, string]> = [
      ["annotate", "Annotate"],
      ["review", "Review"],
      ["dashboard", "Dashboard"],
    ];
    for (const [tab, label] of entries) {
      const button = el("button", { type: "button", "data-tab": tab }, label);
      button.addEventListener("click", () => {
        this.tab = tab;
        this.refreshTabs(tabs);
        void this.renderPane();
      });
      tabs.append(button);
    }
    this.refreshTabs(tabs);
    clear(this.rootEl).append(
      el("header", { class: "topbar" }, el("span", { class: "brand" }, "tagscout"), tabs),
      el("div", { class: "layout" }, this.sidebar, this.main),
    );
    this.renderRoadList();
    void this.renderPane();
  }

  private refreshTabs(tabs: HTMLElement): void {
    for (const button of tabs.querySelectorAll("button")) {
      button.classList.toggle("active", button.getAttribute("data-tab") === this.tab);
    }
  }

  private renderRoadList(): void {
    clear(this.sidebar);
    for (const road of this.roads) {
      const mine = this.analystId ? road.annotated_by[this.analystId] : false;
      const item = el(
        "button",
        { type: "button", class: `road-item ${mine ? "done" : ""}` },
        el("span", { class: "road-id" }, String(road.osm_id)),
        el("span", { class: "road-highway" }, road.highway ?? ""),
        el(
          "span",
          { class: "road-progress" },
          `${road.n_reviewed}/${road.n_suggestions}`,
        ),
      );
      item.addEventListener("click", () => {
        this.selectedRoad = road.osm_id;
        void this.renderPane();
      });
      this.sidebar.append(item);
    }
  }

  private nextUnannotated(after: number | null): number | null {
    if (!this.analystId) return null;
    const pending = this.roads.filter((r) => !r.annotated_by[this.analystId!]);
    if (pending.length === 0) return null;
    if (after !== null) {
      const later = pending.find((r) => r.osm_id > after);
      if (later) return later.osm_id;
    }
    return pending[0].osm_id;
  }

  private async renderPane(): Promise<void> {
    if (this.tab === "dashboard") {
      const dashboard = new Dashboard(this.api, this.analysts);
      dashboard.mount(this.main);
      await dashboard.show("historical");
      return;
    }
    const roadId = this.selectedRoad ?? this.nextUnannotated(null) ?? this.roads[0]?.osm_id;
    if (roadId === undefined) {
      clear(this.main).append(el("div", { class: "placeholder" }, "No roads in this project."));
      return;
    }
    const road = await this.api.road(roadId);
    if (this.tab === "annotate" && this.analystId) {
      const form = new AnnotationForm(this.api, this.questions, road, this.analystId, {
        onSubmitted: async () => {
          this.roads = await this.api.roads();
          this.renderRoadList();
          this.selectedRoad = this.nextUnannotated(roadId);
          void this.renderPane();
        },
      });
      form.mount(this.main);
    } else {
      const suggestions = await this.api.suggestions(roadId);
      const grid = new ReviewGrid(this.api, this.analysts, road, suggestions, {
        onStale: () => void this.renderPane(),
      });
      grid.mount(this.main);
    }
  }
}

const rootEl = document.getElementById("app");
if (rootEl) {
  void new App(rootEl).start();
}

export { App };
