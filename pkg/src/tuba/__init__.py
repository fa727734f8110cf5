"""tuba: utility-based abstraction for decision models.

Compute utility spans and distances over an actions-by-hypotheses utility
model, build abstraction hierarchies by agglomerative clustering, cut them
into categories under a span tolerance, and decide at the abstract level
with expected-utility and minimax-dominance rules.
"""

from tuba.clustering import (
    Dendrogram,
    MergeRecord,
    NodeRef,
    Partition,
    build_hierarchy,
    cut_at_tolerance,
    cut_to_k,
    parse_dendrogram,
    render_dendrogram,
)
from tuba.decisions import (
    DecisionReport,
    IntervalUtility,
    Mode,
    Rule,
    abstract_outcome_utility,
    best_action,
    category_probability,
    decide_with_action_categories,
    decide_with_event_categories,
    expected_utility,
    minimax_decide_action_categories,
    minimax_decide_events,
    representative_actions,
    singleton_partition,
)
from tuba.errors import (
    DistMismatchError,
    InvalidKError,
    InvalidWeightsError,
    MissingDistributionError,
    ModelFormatError,
    NotFoundError,
    OverlapError,
    TubaError,
    UnsupportedMetricError,
    ZeroMassCategoryError,
)
from tuba.metrics import (
    Category,
    Kind,
    Linkage,
    MetricKind,
    SpanReport,
    distance,
    expected_uspan,
    group_distance,
    uspan,
)
from tuba.model import (
    ModelView,
    ProbabilityDist,
    UtilityMatrix,
    UtilityModel,
    evaluate_utility,
    model_warnings,
    reweight,
    utility_matrix,
    validate_model,
)
from tuba.modelfile import (
    parse_dist,
    parse_model,
    parse_partition,
    serialize_dist,
    serialize_model,
    serialize_partition,
    serialize_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
