/**
 * Explorer wiring: weight sliders and cutoff controls drive cluster/cut/
 * decide requests against the service, and the dendrogram, category, and
 * decision panels re-render from the responses. The UI performs no decision
 * math of its own; every number on screen is lifted from a service payload.
 *
 * Interaction model: control changes are debounced (150 ms) and at most one
 * request pipeline is in flight; a newer change aborts the older pipeline
 * (latest wins).
 */

import {
  DecisionDoc,
  DendrogramDoc,
  FetchLike,
  Metric,
  Mode,
  PartitionDoc,
  Rule,
  LinkageKind,
  ServiceClient,
  ServiceError,
  Target,
} from "./api.js";
import {
  formatNumber,
  heightToY,
  PALETTE,
  renderDendrogram,
  yToHeight,
} from "./dendrogram.js";
import { ROBOT_MODEL } from "./robot-model.js";
import {
  clampCutoff,
  clampWeights,
  ExplorerState,
  initialState,
  uniformDist,
} from "./state.js";

const DEBOUNCE_MS = 150;

export interface ExplorerApp {
  state: ExplorerState;
  client: ServiceClient;
  /** Resolves once no refresh is scheduled or in flight. */
  idle(): Promise<void>;
  loadRobotModel(): Promise<void>;
  refreshNow(): Promise<void>;
  lastDendrogram: DendrogramDoc | null;
  lastPartition: PartitionDoc | null;
  lastDecision: DecisionDoc | null;
}

interface Elements {
  loadRobot: HTMLButtonElement;
  modelStatus: HTMLElement;
  weightsPanel: HTMLElement;
  target: HTMLSelectElement;
  metric: HTMLSelectElement;
  linkage: HTMLSelectElement;
  modeK: HTMLInputElement;
  modeTolerance: HTMLInputElement;
  kInput: HTMLInputElement;
  toleranceInput: HTMLInputElement;
  rule: HTMLSelectElement;
  mode: HTMLSelectElement;
  preview: HTMLInputElement;
  dendrogramPanel: HTMLElement;
  categoriesPanel: HTMLElement;
  decisionPanel: HTMLElement;
  errorPanel: HTMLElement;
}

function grab(doc: Document): Elements {
  const byId = <T extends Element>(id: string): T => {
    const node = doc.getElementById(id);
    if (!node) throw new Error(`missing #${id} in explorer page`);
    return node as unknown as T;
  };
  return {
    loadRobot: byId("load-robot"),
    modelStatus: byId("model-status"),
    weightsPanel: byId("weights-panel"),
    target: byId("target"),
    metric: byId("metric"),
    linkage: byId("linkage"),
    modeK: byId("cutoff-mode-k"),
    modeTolerance: byId("cutoff-mode-tolerance"),
    kInput: byId("k-input"),
    toleranceInput: byId("tolerance-input"),
    rule: byId("rule"),
    mode: byId("mode"),
    preview: byId("preview"),
    dendrogramPanel: byId("dendrogram-panel"),
    categoriesPanel: byId("categories-panel"),
    decisionPanel: byId("decision-panel"),
    errorPanel: byId("error-panel"),
  };
}

export function initExplorer(
  doc: Document,
  options: { baseUrl?: string; fetchImpl?: FetchLike } = {},
): ExplorerApp {
  const state = initialState();
  const client = new ServiceClient(options.baseUrl ?? "", options.fetchImpl);
  const els = grab(doc);

  let timer: ReturnType<typeof setTimeout> | null = null;
  let controller: AbortController | null = null;
  let inflight: Promise<void> = Promise.resolve();

  const app: ExplorerApp = {
    state,
    client,
    idle,
    loadRobotModel,
    refreshNow,
    lastDendrogram: null,
    lastPartition: null,
    lastDecision: null,
  };

  async function idle(): Promise<void> {
    // Timers and requests can cascade; poll until both are quiet.
    for (;;) {
      await inflight;
      if (timer === null) return;
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
  }

  function schedule(): void {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      inflight = refreshNow();
    }, DEBOUNCE_MS);
  }

  async function loadRobotModel(): Promise<void> {
    try {
      const { id } = await client.uploadModel(ROBOT_MODEL);
      const doc_ = await client.getModel(id);
      state.modelId = id;
      state.attributes = doc_.attributes.map((a) => a.id);
      state.weights = doc_.attributes.map((a) => a.weight);
      clampWeights(state);
      els.modelStatus.textContent =
        `model ${id} (${doc_.actions.length} actions x ` +
        `${doc_.hypotheses.length} hypotheses)`;
      buildWeightSliders();
      showError(null);
      await refreshNow();
    } catch (err) {
      showError(err);
    }
  }

  async function refreshNow(): Promise<void> {
    if (!state.modelId) return;
    controller?.abort();
    controller = new AbortController();
    const signal = controller.signal;
    try {
      const model = await client.getModel(state.modelId, signal);
      const hypotheses = model.hypotheses;
      const needDist = state.metric === "weighted" || state.preview;
      const dist = needDist ? { probs: uniformDist(hypotheses) } : undefined;

      const dendro = await client.cluster(state.modelId, {
        target: state.target,
        metric: state.metric,
        linkage: state.linkage,
        weights: state.weights,
        ...(state.metric === "weighted" ? { dist } : {}),
      }, signal);
      clampCutoff(state, dendro);
      syncCutoffInputs();

      const partition = await client.cut(state.modelId, {
        dendrogram: dendro,
        weights: state.weights,
        ...(state.cutoffMode === "k"
          ? { k: state.k }
          : { tolerance: state.tolerance }),
      }, signal);

      let decision: DecisionDoc | null = null;
      if (state.preview && dist) {
        decision = await client.decide(state.modelId, {
          dist,
          partition,
          rule: state.rule,
          mode: state.mode,
          weights: state.weights,
        }, signal);
      }

      app.lastDendrogram = dendro;
      app.lastPartition = partition;
      app.lastDecision = decision;
      renderAll(dendro, partition, decision);
      showError(null);
    } catch (err) {
      if ((err as Error).name === "AbortError") return;
      showError(err);
    }
  }

  function showError(err: unknown): void {
    if (err === null) {
      els.errorPanel.textContent = "";
      els.errorPanel.hidden = true;
      return;
    }
    const prefix = err instanceof ServiceError ? `service ${err.status}: ` : "";
    els.errorPanel.textContent = prefix + String((err as Error).message ?? err);
    els.errorPanel.hidden = false;
  }

  function buildWeightSliders(): void {
    els.weightsPanel.textContent = "";
    state.attributes.forEach((attr, i) => {
      const row = doc.createElement("label");
      row.className = "weight-row";
      const name = doc.createElement("span");
      name.textContent = attr;
      const slider = doc.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.01";
      slider.value = String(state.weights[i]);
      slider.id = `weight-${i}`;
      const readout = doc.createElement("output");
      readout.textContent = slider.value;
      slider.addEventListener("input", () => {
        state.weights[i] = Number(slider.value);
        readout.textContent = slider.value;
        schedule();
      });
      row.append(name, slider, readout);
      els.weightsPanel.appendChild(row);
    });
  }

  function syncCutoffInputs(): void {
    els.kInput.value = String(state.k);
    els.toleranceInput.value = String(state.tolerance);
    els.modeK.checked = state.cutoffMode === "k";
    els.modeTolerance.checked = state.cutoffMode === "tolerance";
  }

  function renderAll(dendro: DendrogramDoc, partition: PartitionDoc,
                     decision: DecisionDoc | null): void {
    renderDendrogramPanel(dendro, partition);
    renderCategories(partition);
    renderDecision(decision);
  }

  function renderDendrogramPanel(dendro: DendrogramDoc,
                                 partition: PartitionDoc): void {
    els.dendrogramPanel.textContent = "";
    const cutoff = state.cutoffMode === "tolerance"
      ? state.tolerance
      : partition.cutoff;
    const svg = renderDendrogram(doc, dendro, partition, cutoff);
    els.dendrogramPanel.appendChild(svg);
    attachCutoffDrag(svg, dendro);
  }

  function attachCutoffDrag(svg: SVGSVGElement, dendro: DendrogramDoc): void {
    const line = svg.querySelector<SVGLineElement>("#cutoff-line");
    if (!line) return;
    let dragging = false;
    const toHeight = (event: PointerEvent): number => {
      const rect = svg.getBoundingClientRect();
      const scale = rect.height > 0 ? 400 / rect.height : 1;
      return yToHeight((event.clientY - rect.top) * scale, dendro);
    };
    line.addEventListener("pointerdown", (event) => {
      dragging = true;
      (event.target as Element).setPointerCapture?.(event.pointerId);
    });
    svg.addEventListener("pointermove", (event) => {
      if (!dragging) return;
      state.cutoffMode = "tolerance";
      state.tolerance = toHeight(event as PointerEvent);
      syncCutoffInputs();
      const y = heightToY(state.tolerance, dendro);
      line.setAttribute("y1", String(y));
      line.setAttribute("y2", String(y));
      schedule();
    });
    svg.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  function renderCategories(partition: PartitionDoc): void {
    els.categoriesPanel.textContent = "";
    const heading = doc.createElement("h3");
    heading.textContent = `${partition.categories.length} categories`;
    els.categoriesPanel.appendChild(heading);
    const list = doc.createElement("ul");
    list.id = "category-list";
    partition.categories.forEach((cat, i) => {
      const item = doc.createElement("li");
      item.className = "category";
      const swatch = doc.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = PALETTE[i % PALETTE.length];
      const members = doc.createElement("span");
      members.className = "members";
      members.textContent = cat.members.join(", ");
      item.append(swatch, members);
      if (cat.max_span !== undefined) {
        const span = doc.createElement("span");
        span.className = "max-span";
        span.setAttribute("data-num", String(cat.max_span));
        span.textContent = `span ${formatNumber(cat.max_span)}`;
        item.appendChild(span);
      }
      list.appendChild(item);
    });
    els.categoriesPanel.appendChild(list);
  }

  function renderDecision(decision: DecisionDoc | null): void {
    els.decisionPanel.textContent = "";
    if (!decision) {
      const note = doc.createElement("p");
      note.textContent = "decision preview off";
      els.decisionPanel.appendChild(note);
      return;
    }
    els.decisionPanel.appendChild(decisionTable(decision, "decision"));
    if (decision.rule === "minimax") {
      const verdict = doc.createElement("p");
      verdict.id = "dominance-verdict";
      verdict.textContent = decision.dominated
        ? `dominant: ${decision.chosen}`
        : "no dominant candidate";
      els.decisionPanel.appendChild(verdict);
      if (decision.fallback) {
        const label = doc.createElement("p");
        label.textContent = "expected-utility fallback:";
        els.decisionPanel.appendChild(label);
        els.decisionPanel.appendChild(
          decisionTable(decision.fallback, "fallback"));
      }
    }
  }

  function decisionTable(decision: DecisionDoc, idPrefix: string): HTMLElement {
    const table = doc.createElement("table");
    table.id = `${idPrefix}-table`;
    for (const [candidate, score] of Object.entries(decision.scores)) {
      const row = doc.createElement("tr");
      if (candidate === decision.chosen) row.className = "chosen";
      const name = doc.createElement("td");
      name.textContent = candidate + (candidate === decision.chosen ? " *" : "");
      const value = doc.createElement("td");
      value.setAttribute("data-num", String(score));
      value.textContent = formatNumber(score);
      row.append(name, value);
      const bounds = decision.intervals?.[candidate];
      if (bounds) {
        const cell = doc.createElement("td");
        cell.setAttribute("data-num", `${bounds[0]} ${bounds[1]}`);
        cell.textContent =
          `[${formatNumber(bounds[0])}, ${formatNumber(bounds[1])}]`;
        row.appendChild(cell);
      }
      table.appendChild(row);
    }
    return table;
  }

  // -- control bindings ------------------------------------------------

  els.loadRobot.addEventListener("click", () => {
    inflight = loadRobotModel();
  });
  for (const [select, apply] of [
    [els.target, (v: string) => { state.target = v as Target; }],
    [els.metric, (v: string) => { state.metric = v as Metric; }],
    [els.linkage, (v: string) => { state.linkage = v as LinkageKind; }],
    [els.rule, (v: string) => { state.rule = v as Rule; }],
    [els.mode, (v: string) => { state.mode = v as Mode; }],
  ] as const) {
    select.addEventListener("change", () => {
      apply(select.value);
      schedule();
    });
  }
  els.modeK.addEventListener("change", () => {
    if (els.modeK.checked) {
      state.cutoffMode = "k";
      schedule();
    }
  });
  els.modeTolerance.addEventListener("change", () => {
    if (els.modeTolerance.checked) {
      state.cutoffMode = "tolerance";
      schedule();
    }
  });
  els.kInput.addEventListener("input", () => {
    state.cutoffMode = "k";
    state.k = Number(els.kInput.value);
    els.modeK.checked = true;
    schedule();
  });
  els.toleranceInput.addEventListener("input", () => {
    state.cutoffMode = "tolerance";
    state.tolerance = Number(els.toleranceInput.value);
    els.modeTolerance.checked = true;
    schedule();
  });
  els.preview.addEventListener("change", () => {
    state.preview = els.preview.checked;
    schedule();
  });

  return app;
}
