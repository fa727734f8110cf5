"""Agglomerative abstraction hierarchies over utility space.

Starting from the atomic hypotheses (or actions) as singleton groups, the
two closest groups are merged and inter-group distances updated, until one
group remains. Each merge records the inter-group distance at merge time as
its height, so the resulting dendrogram can be cut at any tolerance: the
maximal subtrees whose merge heights stay at or below the tolerance become
the working categories.

The merge scan is deterministic: among pairs at exactly the minimum
distance, the pair whose (smaller, larger) minimum-leaf-index key is
lexicographically smallest wins. Complete and single linkage are both
reducible, so recorded heights never decrease.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from tuba import canonical
from tuba.errors import InvalidKError, ModelFormatError
from tuba.metrics import (
    Category,
    Kind,
    Linkage,
    MetricKind,
    distance,
    uspan,
)
from tuba.model import ProbabilityDist, UtilityMatrix

#: Slack allowed when asserting merge heights are non-decreasing.
HEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NodeRef:
    """Reference to a dendrogram node: a leaf index or a prior merge index."""

    kind: str  # "leaf" or "merge"
    index: int

    def __post_init__(self):
        if self.kind not in ("leaf", "merge"):
            raise ValueError(f"bad node kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("node index must be nonnegative")


@dataclass(frozen=True)
class MergeRecord:
    left: NodeRef
    right: NodeRef
    height: float

    def __post_init__(self):
        if self.left == self.right:
            raise ValueError("a merge must join two distinct nodes")
        if self.height < 0:
            raise ValueError(f"negative merge height {self.height!r}")


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree over one axis of a utility matrix.

    ``leaves`` fixes leaf indices; ``merges[k]`` joins two previously
    unmerged roots and may be referenced later as ``NodeRef("merge", k)``.
    Structural invariants (single tree, each node consumed once,
    non-decreasing heights) are enforced on construction.
    """

    kind: Kind
    leaves: tuple[str, ...]
    merges: tuple[MergeRecord, ...]
    metric: MetricKind
    linkage: Linkage

    def __post_init__(self):
        object.__setattr__(self, "leaves", tuple(self.leaves))
        object.__setattr__(self, "merges", tuple(self.merges))
        n = len(self.leaves)
        if n == 0:
            raise ValueError("dendrogram needs at least one leaf")
        if len(set(self.leaves)) != n:
            raise ValueError("duplicate leaf ids")
        if len(self.merges) != n - 1:
            raise ValueError(
                f"{n} leaves require {n - 1} merges, got {len(self.merges)}")
        consumed: set[tuple[str, int]] = set()
        prev = 0.0
        for k, m in enumerate(self.merges):
            for ref in (m.left, m.right):
                if ref.kind == "leaf" and ref.index >= n:
                    raise ValueError(f"merge {k}: leaf index {ref.index} out of range")
                if ref.kind == "merge" and ref.index >= k:
                    raise ValueError(
                        f"merge {k}: forward reference to merge {ref.index}")
                key = (ref.kind, ref.index)
                if key in consumed:
                    raise ValueError(f"merge {k}: node {key} merged twice")
                consumed.add(key)
            if m.height < prev - HEIGHT_TOLERANCE:
                raise ValueError(
                    f"merge {k}: height {m.height!r} decreases below {prev!r}")
            prev = max(prev, m.height)
        # Every node except the final root must be consumed exactly once.
        expected = {("leaf", i) for i in range(n)}
        expected |= {("merge", k) for k in range(max(len(self.merges) - 1, 0))}
        if self.merges and consumed != expected:
            raise ValueError("merges do not form a single tree")

    def leaf_indices_under(self, ref: NodeRef) -> tuple[int, ...]:
        """Leaf indices beneath a node, in leaf order."""
        if ref.kind == "leaf":
            return (ref.index,)
        m = self.merges[ref.index]
        combined = self.leaf_indices_under(m.left) + self.leaf_indices_under(m.right)
        return tuple(sorted(combined))

    def members_under(self, ref: NodeRef) -> tuple[str, ...]:
        return tuple(self.leaves[i] for i in self.leaf_indices_under(ref))


@dataclass(frozen=True)
class Partition:
    """Disjoint categories covering all leaves, cut from a dendrogram.

    ``cutoff`` records the threshold that produced the partition (the height
    of the last admitted merge, for count-based cuts). ``max_span_per_category``
    holds each category's recomputed maximum utility span; entries are None
    for partitions parsed from files that omit spans.
    """

    kind: Kind
    categories: tuple[Category, ...]
    cutoff: float | None
    max_span_per_category: dict[Category, float | None]

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        seen: set[str] = set()
        for cat in self.categories:
            if cat.kind is not self.kind:
                raise ValueError("category kind does not match partition kind")
            dup = seen & set(cat.members)
            if dup:
                raise ValueError(f"categories overlap on {sorted(dup)}")
            seen |= set(cat.members)


def build_hierarchy(matrix: UtilityMatrix, kind: Kind, metric: MetricKind,
                    linkage: Linkage,
                    dist: ProbabilityDist | None = None) -> Dendrogram:
    """Cluster one axis of the matrix bottom-up into a dendrogram.

    Repeatedly merges the pair of current roots at minimum inter-group
    distance, recording that distance as the merge height. Inter-group
    distances are maintained incrementally: after merging groups a and b,
    the distance from the merged group to any other root is max (complete
    linkage) or min (single linkage) of the two old distances, which is
    exact for these linkages. Ties break to the lexicographically smallest
    (min leaf index, max leaf index) pair of group representatives.
    """
    ids = matrix.hypotheses if kind is Kind.HYPOTHESES else matrix.actions
    n = len(ids)
    if n == 0:
        raise ValueError("cannot cluster an empty axis")

    # Pairwise base distances, symmetric; keyed by leaf index pairs.
    base = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(matrix, ids[i], ids[j], kind, metric, dist)
            base[i][j] = base[j][i] = d

    refs: list[NodeRef] = [NodeRef("leaf", i) for i in range(n)]
    reps: list[int] = list(range(n))  # min leaf index per active root
    dmat: dict[tuple[int, int], float] = {
        (i, j): base[i][j] for i in range(n) for j in range(i + 1, n)
    }

    def rootdist(ra: int, rb: int) -> float:
        return dmat[(ra, rb) if ra < rb else (rb, ra)]

    merges: list[MergeRecord] = []
    while len(refs) > 1:
        best_d = None
        best_key = None
        best_pair = None
        for ia in range(len(refs)):
            for ib in range(ia + 1, len(refs)):
                d = rootdist(reps[ia], reps[ib])
                key = (min(reps[ia], reps[ib]), max(reps[ia], reps[ib]))
                if best_d is None or d < best_d or (d == best_d and key < best_key):
                    best_d, best_key, best_pair = d, key, (ia, ib)
        ia, ib = best_pair
        if reps[ib] < reps[ia]:
            ia, ib = ib, ia
        rep_a, rep_b = reps[ia], reps[ib]
        merges.append(MergeRecord(refs[ia], refs[ib], best_d))

        for k in range(len(refs)):
            if k in (ia, ib):
                continue
            da = rootdist(rep_a, reps[k])
            db = rootdist(rep_b, reps[k])
            merged = max(da, db) if linkage is Linkage.COMPLETE else min(da, db)
            lo, hi = min(rep_a, reps[k]), max(rep_a, reps[k])
            dmat[(lo, hi)] = merged

        refs[ia] = NodeRef("merge", len(merges) - 1)
        del refs[ib]
        del reps[ib]

    return Dendrogram(kind, ids, tuple(merges), metric, linkage)


def _partition_from_roots(dendrogram: Dendrogram, roots: list[NodeRef],
                          cutoff: float | None,
                          matrix: UtilityMatrix) -> Partition:
    keyed = sorted(roots, key=lambda r: dendrogram.leaf_indices_under(r)[0])
    categories = tuple(
        Category(dendrogram.kind, dendrogram.members_under(r)) for r in keyed)
    spans = {c: uspan(matrix, c).max_span for c in categories}
    return Partition(dendrogram.kind, categories, cutoff, spans)


def _roots_after(dendrogram: Dendrogram, admitted: int) -> list[NodeRef]:
    """Roots of the forest once the first ``admitted`` merges are applied."""
    consumed: set[tuple[str, int]] = set()
    for m in dendrogram.merges[:admitted]:
        for ref in (m.left, m.right):
            consumed.add((ref.kind, ref.index))
    roots = [NodeRef("leaf", i) for i in range(len(dendrogram.leaves))
             if ("leaf", i) not in consumed]
    roots += [NodeRef("merge", k) for k in range(admitted)
              if ("merge", k) not in consumed]
    return roots


def cut_at_tolerance(dendrogram: Dendrogram, tolerance: float,
                     matrix: UtilityMatrix) -> Partition:
    """Partition into the maximal subtrees whose merge heights are all
    within the tolerance (inclusive: a merge exactly at the tolerance is
    admitted). Spans are recomputed from the matrix."""
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    admitted = 0
    for m in dendrogram.merges:
        if m.height <= tolerance:
            admitted += 1
        else:
            break
    roots = _roots_after(dendrogram, admitted)
    return _partition_from_roots(dendrogram, roots, float(tolerance), matrix)


def cut_to_k(dendrogram: Dendrogram, k: int,
             matrix: UtilityMatrix) -> Partition:
    """Partition into exactly k categories by undoing the last k - 1 merges."""
    n = len(dendrogram.leaves)
    if not 1 <= k <= n:
        raise InvalidKError(f"k must be in [1, {n}], got {k}")
    admitted = n - k
    roots = _roots_after(dendrogram, admitted)
    cutoff = dendrogram.merges[admitted - 1].height if admitted else 0.0
    return _partition_from_roots(dendrogram, roots, cutoff, matrix)


# ---------------------------------------------------------------------------
# Rendering and serialization


def _ref_obj(ref: NodeRef) -> dict:
    return {ref.kind: ref.index}


def dendrogram_to_obj(d: Dendrogram) -> dict:
    return {
        "kind": d.kind.value,
        "metric": d.metric.value,
        "linkage": d.linkage.value,
        "leaves": list(d.leaves),
        "merges": [
            {"left": _ref_obj(m.left), "right": _ref_obj(m.right),
             "height": float(m.height)}
            for m in d.merges
        ],
    }


def _parse_ref(obj, path: str) -> NodeRef:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ModelFormatError("expected {\"leaf\": i} or {\"merge\": i}", path)
    (key, idx), = obj.items()
    if key not in ("leaf", "merge") or not isinstance(idx, int):
        raise ModelFormatError("expected {\"leaf\": i} or {\"merge\": i}", path)
    return NodeRef(key, idx)


def _enum_value(enum_cls, raw, path: str):
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = [e.value for e in enum_cls]
        raise ModelFormatError(f"expected one of {allowed}, got {raw!r}",
                               path) from None


def parse_dendrogram(data) -> Dendrogram:
    """Parse dendrogram JSON (the inverse of the Json render)."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ModelFormatError("dendrogram document must be a JSON object")
    required = {"kind", "metric", "linkage", "leaves", "merges"}
    unknown = set(data) - required
    if unknown:
        raise ModelFormatError(f"unknown keys {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise ModelFormatError(f"missing keys {sorted(missing)}")
    kind = _enum_value(Kind, data["kind"], "kind")
    metric = _enum_value(MetricKind, data["metric"], "metric")
    linkage = _enum_value(Linkage, data["linkage"], "linkage")
    leaves = data["leaves"]
    if (not isinstance(leaves, list)
            or not all(isinstance(x, str) for x in leaves)):
        raise ModelFormatError("expected a list of strings", "leaves")
    merges = []
    if not isinstance(data["merges"], list):
        raise ModelFormatError("expected a list", "merges")
    for i, m in enumerate(data["merges"]):
        path = f"merges[{i}]"
        if not isinstance(m, dict) or set(m) != {"left", "right", "height"}:
            raise ModelFormatError(
                "expected keys left, right, height", path)
        if not isinstance(m["height"], (int, float)) or isinstance(m["height"], bool):
            raise ModelFormatError("height must be a number", f"{path}.height")
        merges.append(MergeRecord(
            _parse_ref(m["left"], f"{path}.left"),
            _parse_ref(m["right"], f"{path}.right"),
            float(m["height"]),
        ))
    try:
        return Dendrogram(kind, tuple(leaves), tuple(merges), metric, linkage)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def _render_text(d: Dendrogram) -> str:
    lines: list[str] = []

    def label(ref: NodeRef) -> str:
        if ref.kind == "leaf":
            return d.leaves[ref.index]
        return f"[{d.merges[ref.index].height:.6g}]"

    def walk(ref: NodeRef, prefix: str, connector: str, child_prefix: str):
        lines.append(prefix + connector + label(ref))
        if ref.kind == "merge":
            m = d.merges[ref.index]
            walk(m.left, prefix + child_prefix, "├─ ", "│  ")
            walk(m.right, prefix + child_prefix, "└─ ", "   ")

    root = (NodeRef("merge", len(d.merges) - 1) if d.merges
            else NodeRef("leaf", 0))
    walk(root, "", "", "")
    return "\n".join(lines) + "\n"


def _render_svg(d: Dendrogram) -> str:
    width, height = 640, 400
    margin = 40
    label_space = 90
    top = margin
    bottom = height - label_space
    max_h = max((m.height for m in d.merges), default=1.0) or 1.0
    n = len(d.leaves)
    step = (width - 2 * margin) / max(n - 1, 1)

    def y_of(h: float) -> float:
        return bottom - (h / max_h) * (bottom - top)

    # Leaf x positions follow the left-to-right order of the tree.
    order: list[int] = []

    def collect(ref: NodeRef):
        if ref.kind == "leaf":
            order.append(ref.index)
        else:
            m = d.merges[ref.index]
            collect(m.left)
            collect(m.right)

    root = (NodeRef("merge", len(d.merges) - 1) if d.merges
            else NodeRef("leaf", 0))
    collect(root)
    xpos = {leaf: margin + slot * step for slot, leaf in enumerate(order)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        '<g stroke="#1f3b73" stroke-width="1.5" fill="none">',
    ]
    texts = []

    def place(ref: NodeRef) -> tuple[float, float]:
        if ref.kind == "leaf":
            return xpos[ref.index], bottom
        m = d.merges[ref.index]
        lx, ly = place(m.left)
        rx, ry = place(m.right)
        hy = y_of(m.height)
        parts.append(
            f'<path d="M {lx:.2f} {ly:.2f} V {hy:.2f} H {rx:.2f} V {ry:.2f}"/>')
        texts.append(
            f'<text x="{(lx + rx) / 2:.2f}" y="{hy - 4:.2f}" '
            f'text-anchor="middle">{m.height:.6g}</text>')
        return (lx + rx) / 2, hy

    place(root)
    parts.append("</g>")
    parts.append('<g font-family="sans-serif" font-size="11" fill="#222">')
    parts.extend(texts)
    for leaf, x in xpos.items():
        name = d.leaves[leaf].replace("&", "&amp;").replace("<", "&lt;")
        texts_y = bottom + 12
        parts.append(
            f'<text x="{x:.2f}" y="{texts_y:.2f}" text-anchor="end" '
            f'transform="rotate(-45 {x:.2f} {texts_y:.2f})">{name}</text>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_dendrogram(d: Dendrogram, format: str = "json") -> bytes:
    """Render as 'text' (ASCII tree, heights at merge lines), 'svg'
    (height axis = merge distance, heights labeled at merger lines), or
    'json' (canonical serialization; parses back identically)."""
    if format == "json":
        return canonical.dumps(dendrogram_to_obj(d)).encode("utf-8")
    if format == "text":
        return _render_text(d).encode("utf-8")
    if format == "svg":
        return _render_svg(d).encode("utf-8")
    raise ValueError(f"unknown render format {format!r}")
