import { ApiError, WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";
import type { Analyst, Report } from "./types.js";

type Method = "historical" | "semantic";

const PANEL_TITLES: Record<Method, string> = {
  historical: 'Accuracy based on historical "highway" values',
  semantic: "Accuracy based on semantic road categories",
};

function fmt(value: number): string {
  return value.toFixed(1);
}

function fmtChange(value: number | null): string {
  if (value === null) return "-";
  return `${value >= 0 ? "+" : ""}${value.toFixed(1)}`;
}

export class Dashboard {
  readonly root: HTMLElement;
  private readonly panel: HTMLElement;
  private readonly cache = new Map<Method, Report>();
  private method: Method = "historical";
  private readonly displayNames: Map<string, string>;

  constructor(
    private readonly api: WorkbenchClient,
    analysts: Analyst[],
  ) {
    this.displayNames = new Map(analysts.map((a) => [a.analyst_id, a.display_name]));
    this.panel = el("div", { class: "report-panel" });
    const toggle = el("div", { class: "method-toggle" });
    for (const method of ["historical", "semantic"] as Method[]) {
      const button = el(
        "button",
        { type: "button", class: "method", "data-method": method },
        method,
      );
      button.addEventListener("click", () => void this.show(method));
      toggle.append(button);
    }
    this.root = el("section", { class: "dashboard" }, toggle, this.panel);
  }

  async show(method: Method): Promise<void> {
    this.method = method;
    for (const button of this.root.querySelectorAll("button.method")) {
      button.classList.toggle("active", button.getAttribute("data-method") === method);
    }
    let report = this.cache.get(method);
    if (!report) {
      try {
        report = await this.api.report(method);
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          clear(this.panel).append(
            el(
              "div",
              { class: "placeholder" },
              "No report yet. Run evaluate on the project to build one.",
            ),
          );
          return;
        }
        throw err;
      }
      this.cache.set(method, report);
    }
    this.renderReport(report);
  }

  private renderReport(report: Report): void {
    const table = el("table", { class: "report-table" });
    const head = el("tr", {}, el("th", {}, "Scenario"));
    for (const analystId of report.analysts) {
      head.append(el("th", {}, this.displayNames.get(analystId) ?? analystId));
    }
    head.append(el("th", {}, "Avg. correct [%]"), el("th", {}, "% change"));
    table.append(el("thead", {}, head));

    const body = el("tbody", {});
    for (const row of report.scenarios) {
      const tr = el("tr", { "data-scenario": row.scenario }, el("th", {}, row.label));
      for (const cell of row.cells) {
        tr.append(el("td", { class: "pct" }, fmt(cell.pct)));
      }
      tr.append(
        el("td", { class: "row-avg" }, fmt(row.row_avg)),
        el("td", { class: "pct-change" }, fmtChange(row.pct_change)),
      );
      body.append(tr);
    }
    const footer = el("tr", { class: "col-avg" }, el("th", {}, "Avg. correct [%]"));
    for (const analystId of report.analysts) {
      footer.append(el("td", { class: "pct" }, fmt(report.col_avg[analystId] ?? 0)));
    }
    footer.append(el("td", {}), el("td", {}));
    body.append(footer);
    table.append(body);

    clear(this.panel).append(
      el("h2", {}, `${PANEL_TITLES[report.method as Method]} (n=${report.n_total})`),
      table,
    );
  }

  activeMethod(): Method {
    return this.method;
  }

  mount(parent: HTMLElement): void {
    clear(parent).append(this.root);
  }
}
