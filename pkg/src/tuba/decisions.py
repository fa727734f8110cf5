"""Decision rules at the base level and over abstract categories.

Base level: expected utility of each action under a probability distribution
over hypotheses, and the argmax action. Abstract level: the same machinery
over categories, with three ways to assign a point utility to an (action,
hypothesis-category) outcome (conditional expectation, plain average, or an
interval of the member utilities), plus minimax dominance screens that only
commit to a choice when its pessimistic score beats every rival's optimistic
score. Ties always break to model order and are flagged in the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from tuba.errors import DistMismatchError, ZeroMassCategoryError
from tuba.metrics import Category, Kind
from tuba.model import ProbabilityDist, UtilityMatrix, dist_vector


class Mode(str, Enum):
    """Point utility assigned to an (action, hypothesis-category) outcome."""

    CONDITIONAL = "conditional"
    AVERAGE = "average"
    INTERVAL = "interval"


class Rule(str, Enum):
    EXPECTED_UTILITY = "eu"
    MINIMAX_DOMINANCE = "minimax"


@dataclass(frozen=True)
class IntervalUtility:
    """Bounds [lo, hi] on the utility of an abstract outcome."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lo {self.lo!r} exceeds hi {self.hi!r}")

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2.0


@dataclass(frozen=True)
class DecisionReport:
    """Outcome of one decision rule.

    ``scores`` is keyed by action id or category label, in model/partition
    order. Under the expected-utility rule ``chosen`` attains the maximum
    score; under minimax dominance ``chosen`` is None unless exactly one
    candidate's pessimistic score meets or beats every rival's optimistic
    score, and ``fallback`` then carries an expected-utility answer so the
    caller is never left without one.
    """

    rule: Rule
    scores: dict[str, float]
    chosen: str | None
    dominated: bool | None = None
    tie: bool = False
    intervals: dict[str, IntervalUtility] | None = None
    fallback: "DecisionReport | None" = None


def _argmax_report(scores: dict[str, float], rule: Rule,
                   intervals: dict[str, IntervalUtility] | None = None,
                   ) -> DecisionReport:
    best = max(scores.values())
    winners = [k for k, v in scores.items() if v == best]
    return DecisionReport(rule=rule, scores=scores, chosen=winners[0],
                          tie=len(winners) > 1, intervals=intervals)


def expected_utility(matrix: UtilityMatrix, action: str,
                     dist: ProbabilityDist) -> float:
    """Probability-weighted utility of one action over all hypotheses."""
    p = dist_vector(dist, matrix.hypotheses)
    return float(p @ matrix.row(action))


def best_action(matrix: UtilityMatrix, dist: ProbabilityDist) -> DecisionReport:
    """The action with greatest expected utility (first in model order on ties)."""
    p = dist_vector(dist, matrix.hypotheses)
    scores = {a: float(p @ matrix.values[i])
              for i, a in enumerate(matrix.actions)}
    return _argmax_report(scores, Rule.EXPECTED_UTILITY)


def _check_event_partition(partition, dist: ProbabilityDist) -> None:
    if partition.kind is not Kind.HYPOTHESES:
        raise ValueError("expected a partition over hypotheses")
    covered = {m for c in partition.categories for m in c.members}
    if covered != set(dist.probs):
        missing = sorted(set(dist.probs) - covered)
        extra = sorted(covered - set(dist.probs))
        raise DistMismatchError(
            f"partition does not cover the distribution's hypotheses "
            f"(missing {missing}, extra {extra})")


def category_probability(partition, dist: ProbabilityDist) -> dict[Category, float]:
    """Probability of each category: the sum over its member hypotheses."""
    _check_event_partition(partition, dist)
    return {c: float(sum(dist.probs[m] for m in c.members))
            for c in partition.categories}


def abstract_outcome_utility(matrix: UtilityMatrix, action: str,
                             category: Category, mode: Mode,
                             dist: ProbabilityDist | None = None):
    """Utility of taking an action when only the category is known.

    Conditional mode renormalizes the member probabilities within the
    category (requires positive category mass); average mode treats members
    as equally likely; interval mode returns the [min, max] member utilities.
    """
    if category.kind is not Kind.HYPOTHESES:
        raise ValueError("abstract outcomes are defined for hypothesis categories")
    row = matrix.row(action)
    idx = [matrix.hypothesis_index(m) for m in category.members]
    member_u = row[idx]
    if mode is Mode.INTERVAL:
        return IntervalUtility(float(member_u.min()), float(member_u.max()))
    if mode is Mode.AVERAGE:
        return float(member_u.mean())
    if dist is None:
        raise DistMismatchError("conditional mode requires a distribution")
    mass = sum(dist.probs.get(m, 0.0) for m in category.members)
    if mass <= 0.0:
        raise ZeroMassCategoryError(
            f"category {category.label!r} has zero probability mass")
    weights = np.array([dist.probs.get(m, 0.0) for m in category.members])
    return float((weights / mass) @ member_u)


def decide_with_event_categories(matrix: UtilityMatrix, partition,
                                 dist: ProbabilityDist,
                                 mode: Mode = Mode.CONDITIONAL) -> DecisionReport:
    """Expected-utility decision where outcomes are scored per category.

    Each action's score sums, over categories, the category probability
    times the category's point utility under ``mode``. Zero-mass categories
    contribute nothing and are skipped (their conditional utility would be
    undefined, but their weight is zero). Interval mode scores by the
    midpoint of the aggregated interval and reports the interval itself.
    """
    p_cat = category_probability(partition, dist)
    scores: dict[str, float] = {}
    intervals: dict[str, IntervalUtility] | None = (
        {} if mode is Mode.INTERVAL else None)
    for action in matrix.actions:
        if mode is Mode.INTERVAL:
            lo = hi = 0.0
            for cat, pc in p_cat.items():
                iv = abstract_outcome_utility(matrix, action, cat, mode)
                lo += pc * iv.lo
                hi += pc * iv.hi
            agg = IntervalUtility(lo, hi)
            intervals[action] = agg
            scores[action] = agg.midpoint
        else:
            total = 0.0
            for cat, pc in p_cat.items():
                if mode is Mode.CONDITIONAL and pc <= 0.0:
                    continue
                total += pc * abstract_outcome_utility(
                    matrix, action, cat, mode, dist)
            scores[action] = total
    return _argmax_report(scores, Rule.EXPECTED_UTILITY, intervals)


def _event_bounds(matrix: UtilityMatrix,
                  p_cat: dict[Category, float]) -> dict[str, IntervalUtility]:
    bounds = {}
    for i, action in enumerate(matrix.actions):
        row = matrix.values[i]
        pess = opt = 0.0
        for cat, pc in p_cat.items():
            idx = [matrix.hypothesis_index(m) for m in cat.members]
            member_u = row[idx]
            pess += pc * float(member_u.min())
            opt += pc * float(member_u.max())
        bounds[action] = IntervalUtility(pess, opt)
    return bounds


def _unique_dominant(bounds: dict[str, IntervalUtility]) -> str | None:
    satisfiers = [
        k for k, iv in bounds.items()
        if all(iv.lo >= other.hi for ok, other in bounds.items() if ok != k)
    ]
    return satisfiers[0] if len(satisfiers) == 1 else None


def minimax_decide_events(matrix: UtilityMatrix, partition,
                          dist: ProbabilityDist) -> DecisionReport:
    """Dominance screen over event categories.

    Chooses the unique action whose pessimistic expected utility (category
    minima) meets or beats every rival's optimistic one (category maxima);
    otherwise chooses nothing and supplies an average-mode fallback.
    """
    p_cat = category_probability(partition, dist)
    bounds = _event_bounds(matrix, p_cat)
    chosen = _unique_dominant(bounds)
    return DecisionReport(
        rule=Rule.MINIMAX_DOMINANCE,
        scores={a: iv.lo for a, iv in bounds.items()},
        chosen=chosen,
        dominated=chosen is not None,
        intervals=bounds,
        fallback=(None if chosen is not None else
                  decide_with_event_categories(matrix, partition, dist,
                                               Mode.AVERAGE)),
    )


def _check_action_partition(matrix: UtilityMatrix, partition) -> None:
    if partition.kind is not Kind.ACTIONS:
        raise ValueError("expected a partition over actions")
    covered = {m for c in partition.categories for m in c.members}
    if covered != set(matrix.actions):
        missing = sorted(set(matrix.actions) - covered)
        extra = sorted(covered - set(matrix.actions))
        raise ValueError(
            f"partition does not cover the action axis "
            f"(missing {missing}, extra {extra})")


def representative_actions(matrix: UtilityMatrix, action_partition,
                           dist: ProbabilityDist) -> dict[Category, str]:
    """For each action category, its highest-expected-utility member."""
    _check_action_partition(matrix, action_partition)
    p = dist_vector(dist, matrix.hypotheses)
    reps = {}
    for cat in action_partition.categories:
        best_member = None
        best_eu = None
        for a in matrix.actions:  # model order fixes the tie-break
            if a not in cat.members:
                continue
            eu = float(p @ matrix.row(a))
            if best_eu is None or eu > best_eu:
                best_member, best_eu = a, eu
        reps[cat] = best_member
    return reps


def decide_with_action_categories(matrix: UtilityMatrix, action_partition,
                                  dist: ProbabilityDist) -> DecisionReport:
    """Expected-utility decision over action categories via representatives.

    Each category is scored by the expected utility of its representative
    member; the report's candidates are category labels.
    """
    reps = representative_actions(matrix, action_partition, dist)
    p = dist_vector(dist, matrix.hypotheses)
    scores = {cat.label: float(p @ matrix.row(rep))
              for cat, rep in reps.items()}
    return _argmax_report(scores, Rule.EXPECTED_UTILITY)


def minimax_decide_action_categories(matrix: UtilityMatrix, action_partition,
                                     dist: ProbabilityDist) -> DecisionReport:
    """Dominance screen over action categories.

    A category's pessimistic score takes the worst member utility in every
    state, its optimistic score the best; the unique category whose
    pessimistic score meets or beats every rival's optimistic score wins.
    """
    _check_action_partition(matrix, action_partition)
    p = dist_vector(dist, matrix.hypotheses)
    bounds = {}
    for cat in action_partition.categories:
        idx = [matrix.action_index(a) for a in cat.members]
        sub = matrix.values[idx, :]
        bounds[cat.label] = IntervalUtility(
            float(p @ sub.min(axis=0)), float(p @ sub.max(axis=0)))
    chosen = _unique_dominant(bounds)
    return DecisionReport(
        rule=Rule.MINIMAX_DOMINANCE,
        scores={k: iv.lo for k, iv in bounds.items()},
        chosen=chosen,
        dominated=chosen is not None,
        intervals=bounds,
        fallback=(None if chosen is not None else
                  decide_with_action_categories(matrix, action_partition, dist)),
    )


def singleton_partition(matrix: UtilityMatrix, kind: Kind):
    """The trivial partition: every element of the axis in its own category."""
    from tuba.clustering import Partition  # local import avoids a cycle

    ids = matrix.hypotheses if kind is Kind.HYPOTHESES else matrix.actions
    categories = tuple(Category(kind, (x,)) for x in ids)
    return Partition(kind, categories, None, {c: 0.0 for c in categories})
