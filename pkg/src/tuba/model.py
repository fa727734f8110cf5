"""Additive multiattribute utility models and their numeric views.

A utility model is a total table of outcomes: for every (action, hypothesis)
pair it records one value per attribute, and a weight vector turns that
vector into a scalar utility by weighted sum. Hypotheses are mutually
exclusive, exhaustive world states; actions are the feasible acts. All types
here are immutable after construction and every operation is pure, so values
can be shared freely across threads.

Scalar models are just the one-attribute case with weight 1; there is no
separate code path.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from tuba.errors import DistMismatchError, InvalidWeightsError, NotFoundError

#: Absolute tolerance for sum-to-one and equality checks.
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class UtilityModel:
    """An actions x hypotheses outcome table with additive attribute weights.

    ``outcome_values`` maps every (action, hypothesis) pair to a vector of
    attribute values; ``weights`` holds one coefficient per attribute.
    ``priors`` is an optional probability per hypothesis. Construction does
    not enforce the invariants; run :func:`validate_model` to check them.
    """

    actions: tuple[str, ...]
    hypotheses: tuple[str, ...]
    attributes: tuple[str, ...]
    outcome_values: dict[tuple[str, str], tuple[float, ...]]
    weights: tuple[float, ...]
    priors: dict[str, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "outcome_values", {
            (a, h): tuple(float(v) for v in vec)
            for (a, h), vec in self.outcome_values.items()
        })
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.priors is not None:
            object.__setattr__(
                self, "priors", {h: float(p) for h, p in self.priors.items()})


@dataclass(frozen=True)
class ProbabilityDist:
    """A probability distribution over the model's hypotheses.

    ``evidence_label`` is an opaque context tag (which evidence or situation
    the distribution reflects); it never influences computation.
    """

    probs: dict[str, float]
    evidence_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "probs",
                           {h: float(p) for h, p in self.probs.items()})

    @classmethod
    def uniform(cls, hypotheses, evidence_label: str | None = "uniform"):
        ids = tuple(hypotheses)
        p = 1.0 / len(ids)
        return cls({h: p for h in ids}, evidence_label)


@dataclass(frozen=True)
class ModelView:
    """An ordered projection of a model onto subsets of actions/hypotheses.

    Subsets must be nonempty, duplicate-free, and drawn from the base model.
    The given order is respected: reordering a subset list permutes the rows
    or columns of the resulting matrix identically.
    """

    base: UtilityModel
    action_subset: tuple[str, ...]
    hypothesis_subset: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "action_subset", tuple(self.action_subset))
        object.__setattr__(self, "hypothesis_subset",
                           tuple(self.hypothesis_subset))
        if not self.action_subset or not self.hypothesis_subset:
            raise ValueError("view subsets must be nonempty")
        for a in self.action_subset:
            if a not in self.base.actions:
                raise NotFoundError(f"unknown action {a!r}")
        for h in self.hypothesis_subset:
            if h not in self.base.hypotheses:
                raise NotFoundError(f"unknown hypothesis {h!r}")
        if len(set(self.action_subset)) != len(self.action_subset):
            raise ValueError("duplicate action in view subset")
        if len(set(self.hypothesis_subset)) != len(self.hypothesis_subset):
            raise ValueError("duplicate hypothesis in view subset")

    @classmethod
    def full(cls, model: UtilityModel) -> ModelView:
        return cls(model, model.actions, model.hypotheses)


@dataclass(frozen=True, eq=False)
class UtilityMatrix:
    """Materialized utilities, indexed (action, hypothesis).

    ``values[i, j]`` is the utility of taking ``actions[i]`` when
    ``hypotheses[j]`` is true. The array is read-only.
    """

    actions: tuple[str, ...]
    hypotheses: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        arr = np.array(self.values, dtype=float)
        if arr.shape != (len(self.actions), len(self.hypotheses)):
            raise ValueError(
                f"matrix shape {arr.shape} does not match "
                f"{len(self.actions)} actions x {len(self.hypotheses)} hypotheses")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def action_index(self, action: str) -> int:
        try:
            return self.actions.index(action)
        except ValueError:
            raise NotFoundError(f"unknown action {action!r}") from None

    def hypothesis_index(self, hypothesis: str) -> int:
        try:
            return self.hypotheses.index(hypothesis)
        except ValueError:
            raise NotFoundError(f"unknown hypothesis {hypothesis!r}") from None

    def row(self, action: str) -> np.ndarray:
        """Utilities of one action across all hypotheses."""
        return self.values[self.action_index(action)]

    def column(self, hypothesis: str) -> np.ndarray:
        """Utilities of all actions under one hypothesis."""
        return self.values[:, self.hypothesis_index(hypothesis)]


def evaluate_utility(model: UtilityModel, action: str, hypothesis: str) -> float:
    """Scalar utility of one outcome: the weighted sum of its attribute values."""
    if action not in model.actions:
        raise NotFoundError(f"unknown action {action!r}")
    if hypothesis not in model.hypotheses:
        raise NotFoundError(f"unknown hypothesis {hypothesis!r}")
    try:
        vec = model.outcome_values[(action, hypothesis)]
    except KeyError:
        raise NotFoundError(
            f"no outcome recorded for ({action!r}, {hypothesis!r})") from None
    return float(sum(w * v for w, v in zip(model.weights, vec)))


def utility_matrix(view: ModelView) -> UtilityMatrix:
    """Materialize the utilities of a view, rows and columns in view order."""
    values = [
        [evaluate_utility(view.base, a, h) for h in view.hypothesis_subset]
        for a in view.action_subset
    ]
    return UtilityMatrix(view.action_subset, view.hypothesis_subset, values)


def validate_model(model: UtilityModel) -> list[str]:
    """Check every model invariant; return one message per violation.

    An empty list means the model is well formed. Messages name the field
    and the failing constraint.
    """
    violations: list[str] = []
    if not model.actions:
        violations.append("actions: must be nonempty")
    if not model.hypotheses:
        violations.append("hypotheses: must be nonempty")
    if not model.attributes:
        violations.append("attributes: at least one attribute is required")
    for field_name, ids in (("actions", model.actions),
                            ("hypotheses", model.hypotheses),
                            ("attributes", model.attributes)):
        dupes = sorted({x for x in ids if ids.count(x) > 1})
        if dupes:
            violations.append(f"{field_name}: duplicate ids {dupes}")
    if len(model.weights) != len(model.attributes):
        violations.append(
            f"weights: {len(model.weights)} values for "
            f"{len(model.attributes)} attributes")

    expected = {(a, h) for a in model.actions for h in model.hypotheses}
    present = set(model.outcome_values)
    for a, h in sorted(expected - present):
        violations.append(
            f"outcome_values: missing cell for ({a!r}, {h!r}); "
            "the table must be total")
    for a, h in sorted(present - expected):
        violations.append(
            f"outcome_values: cell ({a!r}, {h!r}) references unknown ids")
    for (a, h), vec in sorted(model.outcome_values.items()):
        if (a, h) in expected and len(vec) != len(model.attributes):
            violations.append(
                f"outcome_values[({a!r}, {h!r})]: {len(vec)} values for "
                f"{len(model.attributes)} attributes")

    if model.priors is not None:
        extra = sorted(set(model.priors) - set(model.hypotheses))
        missing = sorted(set(model.hypotheses) - set(model.priors))
        if extra:
            violations.append(f"priors: unknown hypotheses {extra}")
        if missing:
            violations.append(f"priors: missing hypotheses {missing}")
        negative = sorted(h for h, p in model.priors.items() if p < 0)
        if negative:
            violations.append(f"priors: negative probability for {negative}")
        if not extra and not missing and not negative:
            total = sum(model.priors.values())
            if abs(total - 1.0) > SUM_TOLERANCE:
                violations.append(
                    f"priors: values sum to {total!r}, expected 1 within "
                    f"{SUM_TOLERANCE}")
    return violations


def model_warnings(model: UtilityModel) -> list[str]:
    """Non-fatal advisories: attribute values outside the conventional [0, 1]."""
    warnings = []
    for (a, h), vec in sorted(model.outcome_values.items()):
        for attr, v in zip(model.attributes, vec):
            if not 0.0 <= v <= 1.0:
                warnings.append(
                    f"outcome_values[({a!r}, {h!r})].{attr}: value {v!r} "
                    "is outside [0, 1]")
    return warnings


def reweight(model: UtilityModel, new_weights) -> UtilityModel:
    """Return a copy of the model with a new weight vector; input unchanged."""
    new_weights = tuple(float(w) for w in new_weights)
    if len(new_weights) != len(model.attributes):
        raise InvalidWeightsError(
            f"expected {len(model.attributes)} weights, got {len(new_weights)}")
    return replace(model, weights=new_weights)


def dist_vector(dist: ProbabilityDist, hypotheses: tuple[str, ...]) -> np.ndarray:
    """Check a distribution against a hypothesis axis and return it as an array.

    The distribution must cover exactly the given hypotheses, with
    nonnegative values summing to 1 within ``SUM_TOLERANCE``.
    """
    if set(dist.probs) != set(hypotheses):
        extra = sorted(set(dist.probs) - set(hypotheses))
        missing = sorted(set(hypotheses) - set(dist.probs))
        raise DistMismatchError(
            f"distribution does not cover the hypothesis axis "
            f"(missing {missing}, extra {extra})")
    p = np.array([dist.probs[h] for h in hypotheses], dtype=float)
    if (p < 0).any():
        bad = [h for h, v in zip(hypotheses, p) if v < 0]
        raise DistMismatchError(f"negative probability for {bad}")
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise DistMismatchError(
            f"probabilities sum to {total!r}, expected 1 within {SUM_TOLERANCE}")
    return p
