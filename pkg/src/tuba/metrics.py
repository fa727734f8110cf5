"""Utility spans and utility-space distances.

The span of a category along one axis is the max-minus-min utility its
members produce there: for a category of hypotheses, one span per action;
for a category of actions, one span per hypothesis. The maximum span over
axes bounds the loss of treating the category's members interchangeably.

Three pairwise distances over utility vectors drive clustering:

* euclidean: straight-line distance between utility vectors,
* weighted: euclidean with each hypothesis axis scaled by its probability
  (action pairs only; hypothesis axes carry the probabilities), and
* chebyshev: the largest per-axis gap, which makes complete-linkage merge
  heights coincide with category max spans.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from tuba.errors import (
    MissingDistributionError,
    OverlapError,
    UnsupportedMetricError,
)
from tuba.model import ProbabilityDist, UtilityMatrix, dist_vector


class Kind(str, Enum):
    """Which axis a category or dendrogram lives on."""

    HYPOTHESES = "hypotheses"
    ACTIONS = "actions"


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    WEIGHTED_EUCLIDEAN = "weighted"
    CHEBYSHEV = "chebyshev"


class Linkage(str, Enum):
    COMPLETE = "complete"
    SINGLE = "single"


@dataclass(frozen=True)
class Category:
    """A nonempty group of hypotheses (a disjunction of world states) or
    of interchangeable actions."""

    kind: Kind
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("category members must be nonempty")
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"duplicate members in category {self.members}")

    @property
    def label(self) -> str:
        """Stable display id: members joined by '|' ('|' is banned in ids)."""
        return "|".join(self.members)


@dataclass(frozen=True)
class SpanReport:
    """Per-axis utility spans of one category, plus their maximum."""

    per_axis: dict[str, float]
    max_span: float


def _member_indices(matrix: UtilityMatrix, category: Category) -> list[int]:
    if category.kind is Kind.HYPOTHESES:
        return [matrix.hypothesis_index(m) for m in category.members]
    return [matrix.action_index(m) for m in category.members]


def uspan(matrix: UtilityMatrix, category: Category) -> SpanReport:
    """Span of utility per axis for one category, and the maximum span.

    For a hypothesis category the axes are actions; for an action category
    the axes are hypotheses. A singleton category spans 0 everywhere.
    """
    idx = _member_indices(matrix, category)
    if category.kind is Kind.HYPOTHESES:
        sub = matrix.values[:, idx]
        spans = sub.max(axis=1) - sub.min(axis=1)
        axis_ids = matrix.actions
    else:
        sub = matrix.values[idx, :]
        spans = sub.max(axis=0) - sub.min(axis=0)
        axis_ids = matrix.hypotheses
    per_axis = {aid: float(s) for aid, s in zip(axis_ids, spans)}
    return SpanReport(per_axis, float(spans.max()))


def expected_uspan(matrix: UtilityMatrix, category: Category,
                   dist: ProbabilityDist) -> float:
    """Probability-weighted span of an action category.

    Sums, over hypotheses, the state probability times the span of member
    utilities in that state. Never exceeds the category's max span.
    """
    if category.kind is not Kind.ACTIONS:
        raise ValueError("expected_uspan is defined for action categories")
    idx = _member_indices(matrix, category)
    p = dist_vector(dist, matrix.hypotheses)
    sub = matrix.values[idx, :]
    spans = sub.max(axis=0) - sub.min(axis=0)
    return float(p @ spans)


def _axis_vectors(matrix: UtilityMatrix, a: str, b: str,
                  kind: Kind) -> tuple[np.ndarray, np.ndarray]:
    if kind is Kind.HYPOTHESES:
        return matrix.column(a), matrix.column(b)
    return matrix.row(a), matrix.row(b)


def distance(matrix: UtilityMatrix, a: str, b: str, kind: Kind,
             metric: MetricKind,
             dist: ProbabilityDist | None = None) -> float:
    """Distance between two hypotheses or two actions in utility space.

    ``kind`` names the axis ``a`` and ``b`` live on. The weighted metric is
    only defined between actions (hypothesis axes carry the probabilities)
    and requires ``dist``.
    """
    if metric is MetricKind.WEIGHTED_EUCLIDEAN:
        if kind is Kind.HYPOTHESES:
            raise UnsupportedMetricError(
                "weighted euclidean distance is undefined for hypothesis "
                "pairs: there is no probability weighting over action axes")
        if dist is None:
            raise MissingDistributionError(
                "weighted euclidean distance requires a probability "
                "distribution over hypotheses")
    va, vb = _axis_vectors(matrix, a, b, kind)
    diff = va - vb
    if metric is MetricKind.EUCLIDEAN:
        return float(np.sqrt(np.sum(diff * diff)))
    if metric is MetricKind.CHEBYSHEV:
        return float(np.max(np.abs(diff)))
    p = dist_vector(dist, matrix.hypotheses)
    return float(np.sqrt(np.sum(p * diff * diff)))


def group_distance(matrix: UtilityMatrix, g1: Category, g2: Category,
                   metric: MetricKind, linkage: Linkage,
                   dist: ProbabilityDist | None = None) -> float:
    """Inter-group distance under complete (farthest pair) or single
    (closest pair) linkage. Groups must be of the same kind and disjoint."""
    if g1.kind is not g2.kind:
        raise ValueError("cannot compare categories of different kinds")
    shared = set(g1.members) & set(g2.members)
    if shared:
        raise OverlapError(f"categories overlap on {sorted(shared)}")
    cross = [
        distance(matrix, m1, m2, g1.kind, metric, dist)
        for m1 in g1.members for m2 in g2.members
    ]
    return max(cross) if linkage is Linkage.COMPLETE else min(cross)
