// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { WorkbenchClient } from "../src/api.js";
import { Dashboard } from "../src/dashboard.js";
import type { Report } from "../src/types.js";
import { ANALYSTS, stubFetch } from "./helpers.js";

function reportFixture(method: string): Report {
  const pcts: Record<string, [number, number, number]> =
    method === "historical"
      ? { baseline: [23.4, 37.2, 31.9], lc: [24.5, 46.8, 34.0] }
      : { baseline: [25.5, 54.3, 41.5], lc: [35.1, 64.9, 45.7] };
  const rows = [
    { scenario: "baseline" as const, label: "Baseline", change: null },
    { scenario: "lc" as const, label: "LC", change: method === "historical" ? 4.3 : 8.2 },
  ];
  const analysts = ["analyst1", "analyst2", "blip2"];
  return {
    method,
    analysts,
    n_total: 94,
    excluded_roads: [],
    scenarios: rows.map((row) => {
      const cells = pcts[row.scenario];
      const avg = (cells[0] + cells[1] + cells[2]) / 3;
      return {
        scenario: row.scenario,
        label: row.label,
        cells: analysts.map((analyst_id, i) => ({
          analyst_id,
          n_correct: Math.round((cells[i] / 100) * 94),
          n_total: 94,
          pct: cells[i],
        })),
        row_avg: Math.round(avg * 10) / 10,
        row_avg_pooled: Math.round(avg * 10) / 10,
        pct_change: row.change,
      };
    }),
    col_avg: { analyst1: 26.6, analyst2: 45.0, blip2: 38.8 },
    col_avg_pooled: { analyst1: 26.6, analyst2: 45.0, blip2: 38.8 },
  };
}

function dashboard(routes: Parameters<typeof stubFetch>[0]) {
  const { fetch, calls } = stubFetch(routes);
  const d = new Dashboard(new WorkbenchClient("", fetch), ANALYSTS);
  document.body.replaceChildren(d.root);
  return { d, calls };
}

const reportRoute = {
  "GET /api/report": (call: { url: string }) => {
    const method = new URL(call.url, "http://x").searchParams.get("method") ?? "historical";
    return { body: reportFixture(method) };
  },
};

describe("Dashboard", () => {
  it("renders the historical panel with the baseline average", async () => {
    const { d } = dashboard(reportRoute);
    await d.show("historical");
    expect(document.querySelector("h2")?.textContent).toBe(
      'Accuracy based on historical "highway" values (n=94)',
    );
    const baseline = document.querySelector('tr[data-scenario="baseline"]')!;
    expect(baseline.querySelector(".row-avg")?.textContent).toBe("30.8");
    const headers = [...document.querySelectorAll("thead th")].map((n) => n.textContent);
    expect(headers).toEqual([
      "Scenario",
      "Analyst #1",
      "Analyst #2",
      "BLIP-2",
      "Avg. correct [%]",
      "% change",
    ]);
  });

  it("formats the change column with a sign and a dash for the baseline", async () => {
    const { d } = dashboard(reportRoute);
    await d.show("historical");
    const changes = [...document.querySelectorAll("td.pct-change")].map((n) => n.textContent);
    expect(changes).toEqual(["-", "+4.3"]);
  });

  it("shows the column averages in the footer", async () => {
    const { d } = dashboard(reportRoute);
    await d.show("historical");
    const footer = [...document.querySelectorAll("tr.col-avg td.pct")].map((n) => n.textContent);
    expect(footer).toEqual(["26.6", "45.0", "38.8"]);
  });

  it("switches panels without refetching a method it already has", async () => {
    const { d, calls } = dashboard(reportRoute);
    await d.show("historical");
    await d.show("semantic");
    expect(document.querySelector("h2")?.textContent).toBe(
      "Accuracy based on semantic road categories (n=94)",
    );
    await d.show("historical");
    await d.show("semantic");
    await d.show("historical");
    expect(calls).toHaveLength(2);
    expect(d.activeMethod()).toBe("historical");
    expect(
      document.querySelector('button.method[data-method="historical"]')?.classList.contains(
        "active",
      ),
    ).toBe(true);
  });

  it("offers a call to action when no report exists yet", async () => {
    const { d } = dashboard({
      "GET /api/report": () => ({ status: 404, body: { detail: "no report" } }),
    });
    await d.show("historical");
    expect(document.querySelector(".placeholder")?.textContent).toContain("No report yet");
    expect(document.querySelector("table.report-table")).toBeNull();
  });
});
