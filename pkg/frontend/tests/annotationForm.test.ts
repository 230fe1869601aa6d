// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { WorkbenchClient } from "../src/api.js";
import { AnnotationForm } from "../src/annotationForm.js";
import {
  ANALYSTS,
  QUESTIONS,
  annotationRecord,
  postedBody,
  roadDetail,
  stubFetch,
} from "./helpers.js";

function buildForm(routes: Parameters<typeof stubFetch>[0], road = roadDetail()) {
  const { fetch, calls } = stubFetch(routes);
  const api = new WorkbenchClient("", fetch);
  const form = new AnnotationForm(api, QUESTIONS, road, "analyst1");
  document.body.append(form.root);
  return { form, calls };
}

describe("AnnotationForm", () => {
  it("renders all six question texts byte-identical to the payload", () => {
    const { form } = buildForm({});
    const labels = [...form.root.querySelectorAll("label.question-text")].map(
      (l) => l.textContent,
    );
    expect(labels).toEqual(QUESTIONS.map((q) => q.text));
    expect(labels).toHaveLength(6);
  });

  it("disables submit until the caption is non-empty", () => {
    const { form } = buildForm({});
    const button = form.root.querySelector<HTMLButtonElement>("button.submit")!;
    expect(button.disabled).toBe(true);
    form.setValue("caption", "   ");
    expect(button.disabled).toBe(true);
    form.setValue("caption", "A street.");
    expect(button.disabled).toBe(false);
    form.setValue("caption", "");
    expect(button.disabled).toBe(true);
  });

  it("submits unanswered structured fields as null", async () => {
    const { form, calls } = buildForm({
      "POST /api/annotations": () => ({ status: 201, body: annotationRecord() }),
    });
    form.setValue("caption", "A street.");
    await form.submit();
    expect(postedBody(calls[0])).toMatchObject({
      road_osm_id: 42,
      analyst_id: "analyst1",
      image_id: "im-42",
      caption: "A street.",
      users: null,
      lanes: null,
      surface: null,
      oneway: null,
      lit: null,
    });
  });

  it("sends all six answers when filled in", async () => {
    const { form, calls } = buildForm({
      "POST /api/annotations": () => ({ status: 201, body: annotationRecord() }),
    });
    form.setValue("caption", "Two lane street with parked cars.");
    form.setValue("users", "cars");
    form.setValue("lanes", "2");
    form.setValue("surface", "asphalt");
    form.setValue("oneway", "no");
    form.setValue("lit", "yes");
    await form.submit();
    expect(postedBody(calls[0])).toMatchObject({
      caption: "Two lane street with parked cars.",
      users: "cars",
      lanes: "2",
      surface: "asphalt",
      oneway: "no",
      lit: "yes",
    });
  });

  it("keeps the typed values and shows a banner on 409", async () => {
    const { form } = buildForm({
      "POST /api/annotations": () => ({
        status: 409,
        body: { detail: "road 42 already annotated by analyst1" },
      }),
    });
    form.setValue("caption", "My caption.");
    form.setValue("lanes", "3");
    const result = await form.submit();
    expect(result).toBeNull();
    expect(form.bannerText()).toContain("Already annotated");
    expect(form.bannerText()).toContain("analyst1");
    expect(form.value("caption")).toBe("My caption.");
    expect(form.value("lanes")).toBe("3");
  });

  it("marks the offending fields on 422 and clears marks on retry", async () => {
    let attempt = 0;
    const { form } = buildForm({
      "POST /api/annotations": () => {
        attempt += 1;
        if (attempt === 1) {
          return {
            status: 422,
            body: { detail: "invalid annotation", fields: ["users", "lanes"] },
          };
        }
        return { status: 201, body: annotationRecord() };
      },
    });
    form.setValue("caption", "A street.");
    form.setValue("users", "spaceships");
    form.setValue("lanes", "0");
    await form.submit();
    expect(form.invalidFields()).toEqual(["users", "lanes"]);
    expect(form.bannerText()).toBe("invalid annotation");

    form.setValue("users", "cars");
    form.setValue("lanes", "2");
    await form.submit();
    expect(form.invalidFields()).toEqual([]);
    expect(form.bannerText()).toBe("");
  });

  it("notifies the caller with the stored record on success", async () => {
    const stored = annotationRecord({ lanes: 2, users: "cars" });
    const { fetch } = stubFetch({
      "POST /api/annotations": () => ({ status: 201, body: stored }),
    });
    const submitted: unknown[] = [];
    const form = new AnnotationForm(
      new WorkbenchClient("", fetch),
      QUESTIONS,
      roadDetail(),
      "analyst1",
      { onSubmitted: (record) => submitted.push(record) },
    );
    form.setValue("caption", "A street.");
    await form.submit();
    expect(submitted).toEqual([stored]);
  });

  it("redisplays an existing annotation by the same analyst", () => {
    const mine = annotationRecord({
      caption: "Stored caption.",
      users: "pedestrians",
      lanes: 4,
      surface: "concrete",
      oneway: "yes",
      lit: "no",
    });
    const other = annotationRecord({ analyst_id: "analyst2", caption: "Not mine." });
    const road = roadDetail({ annotations: [other, mine] });
    const { fetch } = stubFetch({});
    const form = new AnnotationForm(new WorkbenchClient("", fetch), QUESTIONS, road, "analyst1");
    expect(form.value("caption")).toBe("Stored caption.");
    expect(form.value("users")).toBe("pedestrians");
    expect(form.value("lanes")).toBe("4");
    expect(form.value("surface")).toBe("concrete");
    expect(form.value("oneway")).toBe("yes");
    expect(form.value("lit")).toBe("no");
  });

  it("shows unknown stored answers as unanswered", () => {
    const mine = annotationRecord({ users: "unknown", lanes: null, oneway: "unknown" });
    const road = roadDetail({ annotations: [mine] });
    const { fetch } = stubFetch({});
    const form = new AnnotationForm(new WorkbenchClient("", fetch), QUESTIONS, road, "analyst1");
    expect(form.value("users")).toBe("");
    expect(form.value("lanes")).toBe("");
    expect(form.value("oneway")).toBe("");
  });
});
