/**
 * SVG dendrogram rendering. Merge lines sit at a y-coordinate proportional
 * to their recorded height, with the height value labeled at each merger
 * line; leaves are colored by the category that contains them.
 */

import type { DendrogramDoc, NodeRef, PartitionDoc } from "./api.js";

export const PALETTE = [
  "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
  "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
];

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Layout {
  width: number;
  height: number;
  top: number;
  bottom: number;
  left: number;
  right: number;
}

export const DEFAULT_LAYOUT: Layout = {
  width: 640, height: 400, top: 24, bottom: 300, left: 48, right: 608,
};

export function maxHeight(dendro: DendrogramDoc): number {
  return dendro.merges.length
    ? dendro.merges[dendro.merges.length - 1].height
    : 0;
}

/** y pixel for a merge height: proportional between baseline and top. */
export function heightToY(h: number, dendro: DendrogramDoc,
                          layout: Layout = DEFAULT_LAYOUT): number {
  const span = maxHeight(dendro) || 1;
  return layout.bottom - (h / span) * (layout.bottom - layout.top);
}

export function yToHeight(y: number, dendro: DendrogramDoc,
                          layout: Layout = DEFAULT_LAYOUT): number {
  const span = maxHeight(dendro) || 1;
  const h = ((layout.bottom - y) / (layout.bottom - layout.top)) * span;
  return Math.min(Math.max(h, 0), span);
}

function leafOrder(dendro: DendrogramDoc): number[] {
  const order: number[] = [];
  const visit = (ref: NodeRef): void => {
    if ("leaf" in ref) {
      order.push(ref.leaf);
    } else {
      visit(dendro.merges[ref.merge].left);
      visit(dendro.merges[ref.merge].right);
    }
  };
  if (dendro.merges.length === 0) {
    return dendro.leaves.map((_, i) => i);
  }
  visit({ merge: dendro.merges.length - 1 });
  return order;
}

export function categoryColors(partition: PartitionDoc): Map<string, string> {
  const colors = new Map<string, string>();
  partition.categories.forEach((cat, i) => {
    for (const member of cat.members) {
      colors.set(member, PALETTE[i % PALETTE.length]);
    }
  });
  return colors;
}

function el(doc: Document, tag: string,
            attrs: Record<string, string>): Element {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

/**
 * Build the dendrogram SVG. Heights shown at merger lines come verbatim
 * from the service document; the cutoff line (when given) is draggable by
 * the caller via the `cutoff-line` id.
 */
export function renderDendrogram(
  doc: Document,
  dendro: DendrogramDoc,
  partition: PartitionDoc | null,
  cutoff: number | null,
  layout: Layout = DEFAULT_LAYOUT,
): SVGSVGElement {
  const svg = el(doc, "svg", {
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    width: String(layout.width),
    height: String(layout.height),
    id: "dendrogram-svg",
  }) as SVGSVGElement;

  const order = leafOrder(dendro);
  const slotWidth = (layout.right - layout.left) / Math.max(order.length - 1, 1);
  const xOf = new Map<number, number>();
  order.forEach((leaf, slot) => xOf.set(leaf, layout.left + slot * slotWidth));
  const colors = partition ? categoryColors(partition) : new Map<string, string>();

  const lines = el(doc, "g", {
    stroke: "#1f3b73", "stroke-width": "1.5", fill: "none",
  });
  const labels = el(doc, "g", {
    "font-size": "11", "font-family": "sans-serif", fill: "#222",
  });

  const place = (ref: NodeRef): [number, number] => {
    if ("leaf" in ref) {
      return [xOf.get(ref.leaf)!, layout.bottom];
    }
    const merge = dendro.merges[ref.merge];
    const [lx, ly] = place(merge.left);
    const [rx, ry] = place(merge.right);
    const y = heightToY(merge.height, dendro, layout);
    lines.appendChild(el(doc, "path", {
      d: `M ${lx} ${ly} V ${y} H ${rx} V ${ry}`,
    }));
    const text = el(doc, "text", {
      x: String((lx + rx) / 2),
      y: String(y - 4),
      "text-anchor": "middle",
      class: "merge-height",
      "data-num": String(merge.height),
    });
    text.textContent = formatNumber(merge.height);
    labels.appendChild(text);
    return [(lx + rx) / 2, y];
  };

  if (dendro.merges.length > 0) {
    place({ merge: dendro.merges.length - 1 });
  }
  svg.appendChild(lines);
  svg.appendChild(labels);

  const leafLabels = el(doc, "g", {
    "font-size": "12", "font-family": "sans-serif",
  });
  for (const leaf of order) {
    const name = dendro.leaves[leaf];
    const x = xOf.get(leaf)!;
    const text = el(doc, "text", {
      x: String(x),
      y: String(layout.bottom + 14),
      "text-anchor": "end",
      transform: `rotate(-45 ${x} ${layout.bottom + 14})`,
      class: "leaf-label",
      fill: colors.get(name) ?? "#222",
      "data-leaf": name,
    });
    text.textContent = name;
    leafLabels.appendChild(text);
  }
  svg.appendChild(leafLabels);

  if (cutoff !== null && dendro.merges.length > 0) {
    const y = heightToY(cutoff, dendro, layout);
    svg.appendChild(el(doc, "line", {
      id: "cutoff-line",
      x1: String(layout.left - 24),
      x2: String(layout.right + 24),
      y1: String(y),
      y2: String(y),
      stroke: "#b23a48",
      "stroke-width": "2",
      "stroke-dasharray": "6 4",
      cursor: "ns-resize",
    }));
  }
  return svg;
}

/** Single formatting rule for every number the UI displays. */
export function formatNumber(x: number): string {
  if (Number.isInteger(x)) return String(x);
  return Number(x.toPrecision(6)).toString();
}
