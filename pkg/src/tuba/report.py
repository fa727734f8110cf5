"""Report generation: figures and delimited summaries written to a directory.

One report run clusters a model, cuts the hierarchy, and writes:

* ``dendrogram.json`` / ``partition.json``  canonical documents,
* ``dendrogram.svg``                        the deterministic vector render,
* ``dendrogram.png``                        a matplotlib figure with the cut
  line and per-merge heights,
* ``merges.csv`` / ``categories.csv``       delimited summaries.
"""

from __future__ import annotations

import csv
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from tuba import workflows
from tuba.clustering import Dendrogram, NodeRef, Partition, render_dendrogram
from tuba.metrics import Kind, Linkage, MetricKind
from tuba.model import ProbabilityDist, UtilityModel


def _leaf_positions(d: Dendrogram) -> dict[int, int]:
    order: list[int] = []

    def collect(ref: NodeRef):
        if ref.kind == "leaf":
            order.append(ref.index)
        else:
            m = d.merges[ref.index]
            collect(m.left)
            collect(m.right)

    root = NodeRef("merge", len(d.merges) - 1) if d.merges else NodeRef("leaf", 0)
    collect(root)
    return {leaf: slot for slot, leaf in enumerate(order)}


def dendrogram_figure(d: Dendrogram, cutoff: float | None = None) -> Figure:
    """Draw the merge tree with heights labeled at the merger lines."""
    fig = Figure(figsize=(8.0, 5.0))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    xpos = _leaf_positions(d)

    def place(ref: NodeRef) -> tuple[float, float]:
        if ref.kind == "leaf":
            return float(xpos[ref.index]), 0.0
        m = d.merges[ref.index]
        lx, ly = place(m.left)
        rx, ry = place(m.right)
        ax.plot([lx, lx, rx, rx], [ly, m.height, m.height, ry],
                color="#1f3b73", linewidth=1.5)
        ax.annotate(f"{m.height:.4g}", ((lx + rx) / 2, m.height),
                    textcoords="offset points", xytext=(0, 3),
                    ha="center", fontsize=8)
        return (lx + rx) / 2, m.height

    root = NodeRef("merge", len(d.merges) - 1) if d.merges else NodeRef("leaf", 0)
    place(root)
    if cutoff is not None:
        ax.axhline(cutoff, color="#b23a48", linestyle="--", linewidth=1.0,
                   label=f"cutoff {cutoff:.4g}")
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xticks(sorted(xpos.values()))
    ax.set_xticklabels([d.leaves[leaf] for leaf, _ in
                        sorted(xpos.items(), key=lambda kv: kv[1])],
                       rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("merge distance")
    ax.set_title(f"{d.kind.value} hierarchy ({d.metric.value}, "
                 f"{d.linkage.value} linkage)")
    ax.margins(x=0.02)
    fig.tight_layout()
    return fig


def _write_merges_csv(path: Path, d: Dendrogram) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["merge", "left", "right", "height", "members"])
        for k, m in enumerate(d.merges):
            writer.writerow([
                k,
                f"{m.left.kind}:{m.left.index}",
                f"{m.right.kind}:{m.right.index}",
                repr(m.height),
                "|".join(d.members_under(NodeRef("merge", k))),
            ])


def _write_categories_csv(path: Path, partition: Partition) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["category", "size", "max_span", "members"])
        for i, cat in enumerate(partition.categories):
            span = partition.max_span_per_category.get(cat)
            writer.writerow([i, len(cat.members),
                             "" if span is None else repr(span),
                             "|".join(cat.members)])


def write_report(model: UtilityModel, *, target: Kind, metric: MetricKind,
                 linkage: Linkage, out_dir, weights=None, actions=None,
                 hypotheses=None, dist: ProbabilityDist | None = None,
                 tolerance: float | None = None,
                 k: int | None = None) -> list[Path]:
    """Cluster, cut, and write every artifact; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = workflows.build_matrix(model, weights, actions, hypotheses)
    dendrogram = workflows.cluster(
        model, target, metric, linkage, weights=weights, actions=actions,
        hypotheses=hypotheses, dist=dist)
    partition = workflows.cut(dendrogram, matrix, tolerance=tolerance, k=k)

    paths = []

    def emit(name: str, data: bytes) -> None:
        path = out / name
        path.write_bytes(data)
        paths.append(path)

    emit("dendrogram.json",
         (workflows.dendrogram_output(dendrogram) + "\n").encode("utf-8"))
    emit("partition.json",
         (workflows.partition_output(partition) + "\n").encode("utf-8"))
    emit("dendrogram.svg", render_dendrogram(dendrogram, "svg"))

    fig = dendrogram_figure(dendrogram, partition.cutoff)
    png_path = out / "dendrogram.png"
    fig.savefig(png_path, dpi=150)
    paths.append(png_path)

    merges_path = out / "merges.csv"
    _write_merges_csv(merges_path, dendrogram)
    paths.append(merges_path)
    categories_path = out / "categories.csv"
    _write_categories_csv(categories_path, partition)
    paths.append(categories_path)
    return paths
