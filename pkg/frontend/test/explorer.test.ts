// End-to-end explorer tests against the live backing service: jsdom hosts
// the page, all requests hit the real HTTP routes, and every displayed
// number must be traceable to a recorded response.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { initExplorer, ExplorerApp } from "../src/main.js";
import { heightToY } from "../src/dendrogram.js";
import {
  LiveService,
  numbersIn,
  recordingFetch,
  RecordingFetch,
  startService,
} from "./service.js";

const PAGE = readFileSync(
  join(dirname(fileURLToPath(import.meta.url)), "..", "index.html"), "utf-8");

let service: LiveService;

beforeAll(async () => {
  service = await startService();
}, 30_000);

afterAll(async () => {
  await service.stop();
});

function mountPage(): void {
  const html = PAGE.replace(/^[\s\S]*?<body>/, "").replace("</body>", "")
    .replace(/<script[\s\S]*?<\/script>/, "");
  document.body.innerHTML = html;
}

async function bootApp(): Promise<{ app: ExplorerApp; rec: RecordingFetch }> {
  mountPage();
  const rec = recordingFetch();
  const app = initExplorer(document, {
    baseUrl: service.baseUrl,
    fetchImpl: rec.fetchImpl,
  });
  await app.loadRobotModel();
  await app.idle();
  return { app, rec };
}

function setSlider(index: number, value: number): void {
  const slider = document.getElementById(`weight-${index}`) as HTMLInputElement;
  slider.value = String(value);
  slider.dispatchEvent(new Event("input", { bubbles: true }));
}

function setNumberInput(id: string, value: number): void {
  const input = document.getElementById(id) as HTMLInputElement;
  input.value = String(value);
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function categoryMemberSets(): Set<string> {
  const sets = new Set<string>();
  document.querySelectorAll("#category-list .members").forEach((node) => {
    sets.add(node.textContent ?? "");
  });
  return sets;
}

describe("explorer", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("loads the robot fixture and shows hallway/office/class as one group "
     + "at the initial weights with k=4", async () => {
    const { app } = await bootApp();
    expect(app.state.weights).toEqual([0.1, 0.9]);
    expect(app.state.k).toBe(4);
    const groups = categoryMemberSets();
    expect(groups.has("Hallway, Office, Class")).toBe(true);
    expect(groups.size).toBe(4);

    // The three grouped leaves share one color, distinct from the rest.
    const fills = new Map<string, string>();
    document.querySelectorAll(".leaf-label").forEach((node) => {
      fills.set(node.getAttribute("data-leaf")!, node.getAttribute("fill")!);
    });
    expect(fills.get("Hallway")).toBe(fills.get("Office"));
    expect(fills.get("Office")).toBe(fills.get("Class"));
    expect(fills.get("Closet")).not.toBe(fills.get("Hallway"));
  });

  it("re-forms the three revised groups after dragging weights to "
     + "(0.9, 0.1) and k=3", async () => {
    const { app } = await bootApp();
    setSlider(0, 0.9);
    setSlider(1, 0.1);
    setNumberInput("k-input", 3);
    await app.idle();
    expect(app.state.weights).toEqual([0.9, 0.1]);
    const groups = categoryMemberSets();
    expect(groups).toEqual(new Set([
      "Office, Restroom, Class",
      "Hallway, Stairwell",
      "Closet",
    ]));
  });

  it("shows every leaf as a singleton when the cutoff drops below the "
     + "first merge", async () => {
    const { app } = await bootApp();
    const radio = document.getElementById(
      "cutoff-mode-tolerance") as HTMLInputElement;
    radio.checked = true;
    radio.dispatchEvent(new Event("change", { bubbles: true }));
    const firstMerge = app.lastDendrogram!.merges[0].height;
    setNumberInput("tolerance-input", firstMerge / 2);
    await app.idle();
    const groups = categoryMemberSets();
    expect(groups.size).toBe(6);
    for (const group of groups) {
      expect(group.includes(",")).toBe(false);
    }
  });

  it("displays only numbers that appear in service responses", async () => {
    const { app, rec } = await bootApp();
    setSlider(0, 0.9);
    setSlider(1, 0.1);
    setNumberInput("k-input", 3);
    await app.idle();

    const served = new Set<number>();
    for (const response of rec.responses) numbersIn(response, served);

    const displayed = document.querySelectorAll("[data-num]");
    expect(displayed.length).toBeGreaterThan(5);
    displayed.forEach((node) => {
      for (const raw of node.getAttribute("data-num")!.split(" ")) {
        expect(served.has(Number(raw))).toBe(true);
      }
    });
  });

  it("keeps merge lines at y-coordinates proportional to their heights",
     async () => {
    const { app } = await bootApp();
    const dendro = app.lastDendrogram!;
    const labels = document.querySelectorAll(".merge-height");
    expect(labels.length).toBe(dendro.merges.length);
    const byText = new Map<string, number>();
    labels.forEach((node) => {
      byText.set(node.getAttribute("data-num")!,
                 Number(node.getAttribute("y")));
    });
    for (const merge of dendro.merges) {
      const labelY = byText.get(String(merge.height))!;
      expect(labelY).toBeCloseTo(heightToY(merge.height, dendro) - 4, 6);
    }
  });

  it("shows the minimax verdict with an expected-utility fallback",
     async () => {
    const { app } = await bootApp();
    const rule = document.getElementById("rule") as HTMLSelectElement;
    rule.value = "minimax";
    rule.dispatchEvent(new Event("change", { bubbles: true }));
    setNumberInput("k-input", 1);
    await app.idle();
    expect(app.lastDecision!.rule).toBe("minimax");
    expect(app.lastDecision!.chosen).toBeNull();
    const verdict = document.getElementById("dominance-verdict");
    expect(verdict?.textContent).toBe("no dominant candidate");
    expect(document.getElementById("fallback-table")).not.toBeNull();
  });

  it("surfaces service errors inline and keeps the previous render",
     async () => {
    const { app } = await bootApp();
    const before = categoryMemberSets();
    const metric = document.getElementById("metric") as HTMLSelectElement;
    metric.value = "weighted"; // undefined over hypothesis targets: 422
    metric.dispatchEvent(new Event("change", { bubbles: true }));
    await app.idle();
    const errorPanel = document.getElementById("error-panel")!;
    expect(errorPanel.hidden).toBe(false);
    expect(errorPanel.textContent).toContain("422");
    expect(categoryMemberSets()).toEqual(before);
    expect(app.state.metric).toBe("weighted"); // state preserved
  });

  it("clusters actions when the target flips", async () => {
    const { app } = await bootApp();
    const target = document.getElementById("target") as HTMLSelectElement;
    target.value = "actions";
    target.dispatchEvent(new Event("change", { bubbles: true }));
    setNumberInput("k-input", 2);
    await app.idle();
    expect(app.lastDendrogram!.kind).toBe("actions");
    const leaves = new Set(app.lastDendrogram!.leaves);
    expect(leaves).toEqual(new Set(
      ["Charge/Scan", "Query Assist", "Meander/Scan", "Gather"]));
    // Decision candidates are now category labels.
    const rows = document.querySelectorAll("#decision-table td");
    expect(rows.length).toBeGreaterThan(0);
  });
});
