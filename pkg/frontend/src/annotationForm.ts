import { ApiError, WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";
import type { AnnotationDraft, AnnotationRecord, Question, RoadDetail } from "./types.js";

// Questions answered with a yes/no choice; everything else is free text
// that the server normalizes ("three" -> 3, "asphalt." -> "asphalt").
const CHOICE_FIELDS = new Set(["oneway", "lit"]);

export interface AnnotationFormOptions {
  onSubmitted?: (record: AnnotationRecord) => void;
}

export class AnnotationForm {
  readonly root: HTMLElement;
  private readonly form: HTMLFormElement;
  private readonly inputs = new Map<
    string,
    HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement
  >();
  private readonly rows = new Map<string, HTMLElement>();
  private readonly banner: HTMLElement;
  private readonly submitButton: HTMLButtonElement;
  private busy = false;

  constructor(
    private readonly api: WorkbenchClient,
    private readonly questions: Question[],
    private readonly road: RoadDetail,
    private readonly analystId: string,
    private readonly opts: AnnotationFormOptions = {},
  ) {
    this.banner = el("div", { class: "banner", role: "alert", hidden: true });
    this.submitButton = el("button", { type: "submit", class: "submit" }, "Submit and next");
    this.form = this.buildForm();
    this.root = el(
      "section",
      { class: "annotation-screen" },
      this.buildImagePanel(),
      this.banner,
      this.form,
    );
    const mine = road.annotations.find((a) => a.analyst_id === analystId);
    if (mine) this.setValues(mine);
    this.updateSubmitState();
  }

  private buildForm(): HTMLFormElement {
    const form = el("form", { class: "annotation-form", novalidate: true });
    for (const q of this.questions) {
      // the question text is displayed exactly as the server sent it
      const label = el("label", { class: "question-text", for: `q-${q.variable}` }, q.text);
      let input: HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement;
      if (q.variable === "caption") {
        input = el("textarea", { id: `q-${q.variable}`, rows: "3" });
        input.addEventListener("keydown", (ev) => {
          if ((ev as KeyboardEvent).key === "Enter" && (ev as KeyboardEvent).ctrlKey) {
            ev.preventDefault();
            this.form.requestSubmit();
          }
        });
      } else if (CHOICE_FIELDS.has(q.variable)) {
        input = el(
          "select",
          { id: `q-${q.variable}` },
          el("option", { value: "" }, "(unanswered)"),
          el("option", { value: "yes" }, "yes"),
          el("option", { value: "no" }, "no"),
        );
      } else {
        input = el("input", { id: `q-${q.variable}`, type: "text" });
      }
      input.addEventListener("input", () => this.updateSubmitState());
      this.inputs.set(q.variable, input);
      const row = el("div", { class: "question", "data-variable": q.variable }, label, input);
      this.rows.set(q.variable, row);
      form.append(row);
    }
    form.append(el("div", { class: "actions" }, this.submitButton));
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit();
    });
    return form;
  }

  private buildImagePanel(): HTMLElement {
    const img = el("img", {
      class: "road-photo",
      src: this.road.image_url ?? "",
      alt: `photograph of road ${this.road.osm_id}`,
      draggable: false,
    });
    const frame = el("div", { class: "photo-frame" }, img);
    // pan and zoom only; there is deliberately no drawing tooling
    let scale = 1;
    let ox = 0;
    let oy = 0;
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    const apply = () => {
      img.style.transform = `translate(${ox}px, ${oy}px) scale(${scale})`;
    };
    frame.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      scale = Math.min(8, Math.max(1, scale * (ev.deltaY < 0 ? 1.15 : 1 / 1.15)));
      apply();
    });
    frame.addEventListener("pointerdown", (ev) => {
      dragging = true;
      lastX = ev.clientX;
      lastY = ev.clientY;
    });
    frame.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      ox += ev.clientX - lastX;
      oy += ev.clientY - lastY;
      lastX = ev.clientX;
      lastY = ev.clientY;
      apply();
    });
    frame.addEventListener("pointerup", () => {
      dragging = false;
    });
    return el(
      "div",
      { class: "image-panel" },
      frame,
      el("div", { class: "image-meta" }, `road ${this.road.osm_id}, image ${this.road.matched_image_id ?? "none"}`),
    );
  }

  value(variable: string): string {
    return this.inputs.get(variable)?.value ?? "";
  }

  setValue(variable: string, value: string): void {
    const input = this.inputs.get(variable);
    if (!input) return;
    input.value = value;
    this.updateSubmitState();
  }

  setValues(record: AnnotationRecord): void {
    this.setValue("caption", record.caption);
    this.setValue("users", record.users === "unknown" ? "" : record.users);
    this.setValue("lanes", record.lanes === null ? "" : String(record.lanes));
    this.setValue("surface", record.surface ?? "");
    this.setValue("oneway", record.oneway === "unknown" ? "" : record.oneway);
    this.setValue("lit", record.lit === "unknown" ? "" : record.lit);
  }

  canSubmit(): boolean {
    return this.value("caption").trim().length > 0 && !this.busy;
  }

  private updateSubmitState(): void {
    this.submitButton.disabled = !this.canSubmit();
  }

  draft(): AnnotationDraft {
    const optional = (variable: string): string | null => {
      const v = this.value(variable).trim();
      return v === "" ? null : v;
    };
    return {
      road_osm_id: this.road.osm_id,
      analyst_id: this.analystId,
      image_id: this.road.matched_image_id,
      caption: this.value("caption"),
      users: optional("users"),
      lanes: optional("lanes"),
      surface: optional("surface"),
      oneway: optional("oneway"),
      lit: optional("lit"),
    };
  }

  private showBanner(text: string, kind: "error" | "ok"): void {
    this.banner.hidden = false;
    this.banner.className = `banner ${kind}`;
    this.banner.textContent = text;
  }

  private clearFieldMarks(): void {
    for (const row of this.rows.values()) row.classList.remove("invalid");
  }

  async submit(): Promise<AnnotationRecord | null> {
    if (!this.canSubmit()) return null;
    this.busy = true;
    this.updateSubmitState();
    this.clearFieldMarks();
    try {
      const record = await this.api.submitAnnotation(this.draft());
      this.banner.hidden = true;
      this.opts.onSubmitted?.(record);
      return record;
    } catch (err) {
      // errors never wipe the form; the analyst's answers stay put
      if (err instanceof ApiError && err.status === 409) {
        this.showBanner(`Already annotated: ${err.detail}`, "error");
      } else if (err instanceof ApiError && err.status === 422) {
        this.showBanner(err.detail, "error");
        for (const field of err.fields) this.rows.get(field)?.classList.add("invalid");
      } else {
        this.showBanner(err instanceof Error ? err.message : String(err), "error");
      }
      return null;
    } finally {
      this.busy = false;
      this.updateSubmitState();
    }
  }

  invalidFields(): string[] {
    return [...this.rows.entries()]
      .filter(([, row]) => row.classList.contains("invalid"))
      .map(([variable]) => variable);
  }

  bannerText(): string {
    return this.banner.hidden ? "" : this.banner.textContent ?? "";
  }

  mount(parent: HTMLElement): void {
    clear(parent).append(this.root);
  }
}
