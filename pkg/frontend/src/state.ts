/**
 * Explorer state and its invariants: the weight vector always matches the
 * model's attribute count, k stays within [1, leaf count], and the span
 * tolerance stays within the current dendrogram's height range.
 */

import type { DendrogramDoc, Metric, Mode, Rule, LinkageKind, Target } from "./api.js";

export interface ExplorerState {
  modelId: string | null;
  attributes: string[];
  weights: number[];
  target: Target;
  metric: Metric;
  linkage: LinkageKind;
  cutoffMode: "k" | "tolerance";
  k: number;
  tolerance: number;
  rule: Rule;
  mode: Mode;
  /** Decision preview on/off; the distribution itself is uniform. */
  preview: boolean;
}

export function initialState(): ExplorerState {
  return {
    modelId: null,
    attributes: [],
    weights: [],
    target: "hypotheses",
    metric: "euclidean",
    linkage: "complete",
    cutoffMode: "k",
    k: 4,
    tolerance: 0,
    rule: "eu",
    mode: "conditional",
    preview: true,
  };
}

export function clampWeights(state: ExplorerState): void {
  while (state.weights.length < state.attributes.length) state.weights.push(0);
  state.weights.length = state.attributes.length;
  state.weights = state.weights.map((w) => (Number.isFinite(w) && w >= 0 ? w : 0));
}

export function clampCutoff(state: ExplorerState, dendro: DendrogramDoc): void {
  const n = dendro.leaves.length;
  state.k = Math.min(Math.max(Math.round(state.k) || 1, 1), n);
  const maxHeight = dendro.merges.length
    ? dendro.merges[dendro.merges.length - 1].height
    : 0;
  if (!Number.isFinite(state.tolerance) || state.tolerance < 0) {
    state.tolerance = 0;
  }
  if (state.tolerance > maxHeight) state.tolerance = maxHeight;
}

/**
 * Uniform distribution over the given hypotheses. These values are request
 * inputs for the decision preview, never displayed; every number shown in
 * the UI comes back from the service.
 */
export function uniformDist(hypotheses: string[]): Record<string, number> {
  const p = 1 / hypotheses.length;
  return Object.fromEntries(hypotheses.map((h) => [h, p]));
}
