"""Shared composition layer behind the CLI and the HTTP service.

Both frontends call these functions and print/return the strings verbatim,
so a service response is byte-identical to the corresponding CLI output by
construction. All functions are pure; none touch process state.
"""

from __future__ import annotations

from tuba.clustering import (
    Dendrogram,
    Partition,
    build_hierarchy,
    cut_at_tolerance,
    cut_to_k,
    render_dendrogram,
)
from tuba.decisions import (
    DecisionReport,
    Mode,
    Rule,
    best_action,
    decide_with_action_categories,
    decide_with_event_categories,
    minimax_decide_action_categories,
    minimax_decide_events,
    singleton_partition,
)
from tuba.metrics import Category, Kind, Linkage, MetricKind, uspan
from tuba.model import (
    ModelView,
    ProbabilityDist,
    UtilityMatrix,
    UtilityModel,
    reweight,
    utility_matrix,
)
from tuba.modelfile import (
    serialize_model,
    serialize_partition,
    serialize_report,
    serialize_span_report,
)


def build_matrix(model: UtilityModel, weights=None,
                 actions: tuple[str, ...] | None = None,
                 hypotheses: tuple[str, ...] | None = None) -> UtilityMatrix:
    """Apply an optional weight override and subset projection, then
    materialize the utility matrix."""
    if weights is not None:
        model = reweight(model, weights)
    view = ModelView(model, actions or model.actions,
                     hypotheses or model.hypotheses)
    return utility_matrix(view)


def cluster(model: UtilityModel, target: Kind, metric: MetricKind,
            linkage: Linkage, *, weights=None, actions=None, hypotheses=None,
            dist: ProbabilityDist | None = None) -> Dendrogram:
    matrix = build_matrix(model, weights, actions, hypotheses)
    return build_hierarchy(matrix, target, metric, linkage, dist)


def cut(dendrogram: Dendrogram, matrix: UtilityMatrix, *,
        tolerance: float | None = None, k: int | None = None) -> Partition:
    if (tolerance is None) == (k is None):
        raise ValueError("exactly one of tolerance or k must be given")
    if tolerance is not None:
        return cut_at_tolerance(dendrogram, tolerance, matrix)
    return cut_to_k(dendrogram, k, matrix)


def decide(matrix: UtilityMatrix, dist: ProbabilityDist,
           partition: Partition | None = None,
           rule: Rule = Rule.EXPECTED_UTILITY,
           mode: Mode = Mode.CONDITIONAL) -> DecisionReport:
    """Dispatch to the right decision rule for the partition's axis.

    No partition means base-level decision making (minimax then degenerates
    to a strict dominance screen over singleton events).
    """
    if partition is None:
        if rule is Rule.EXPECTED_UTILITY:
            return best_action(matrix, dist)
        partition = singleton_partition(matrix, Kind.HYPOTHESES)
    if partition.kind is Kind.HYPOTHESES:
        if rule is Rule.EXPECTED_UTILITY:
            return decide_with_event_categories(matrix, partition, dist, mode)
        return minimax_decide_events(matrix, partition, dist)
    if rule is Rule.EXPECTED_UTILITY:
        return decide_with_action_categories(matrix, partition, dist)
    return minimax_decide_action_categories(matrix, partition, dist)


def span(matrix: UtilityMatrix, category: Category):
    return uspan(matrix, category)


# --- canonical output strings (no trailing newline) ---


def model_output(model: UtilityModel) -> str:
    return serialize_model(model)


def dendrogram_output(dendrogram: Dendrogram, fmt: str = "json") -> str:
    out = render_dendrogram(dendrogram, fmt).decode("utf-8")
    # Text and svg renders already end with a newline; json does not.
    return out.rstrip("\n")


def partition_output(partition: Partition) -> str:
    return serialize_partition(partition)


def report_output(report: DecisionReport) -> str:
    return serialize_report(report)


def span_output(category: Category, report) -> str:
    return serialize_span_report(category, report)
