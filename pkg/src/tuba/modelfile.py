"""JSON file formats: models, distributions, partitions, decision reports.

The model format is a flat, diff-friendly document::

    {
      "actions": ["a1", ...],
      "hypotheses": ["h1", ...],
      "attributes": [{"id": "attr", "weight": 0.5}, ...],
      "outcomes": {"a1|h1": [v_attr1, v_attr2, ...], ...},
      "priors": {"h1": 0.25, ...}          // optional
    }

Unknown keys are rejected; ``|`` is forbidden inside ids (it separates the
action from the hypothesis in outcome keys, and joins members in category
labels). Serialization is canonical: same value, same bytes.
"""

from __future__ import annotations

import json

from tuba import canonical
from tuba.clustering import Partition
from tuba.decisions import DecisionReport, IntervalUtility
from tuba.errors import ModelFormatError
from tuba.metrics import Category, Kind, SpanReport
from tuba.model import ProbabilityDist, UtilityModel, validate_model


def _load_json(data) -> object:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            return json.loads(data)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"malformed JSON: {exc}") from None
    return data


def _require_keys(obj: dict, required: set[str], optional: set[str],
                  what: str) -> None:
    unknown = set(obj) - required - optional
    if unknown:
        raise ModelFormatError(
            f"unknown keys {sorted(unknown)} in {what}", sorted(unknown)[0])
    missing = required - set(obj)
    if missing:
        raise ModelFormatError(
            f"missing keys {sorted(missing)} in {what}", sorted(missing)[0])


def _string_list(obj, path: str) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise ModelFormatError("expected a list of strings", path)
    for x in obj:
        if "|" in x:
            raise ModelFormatError(f"id {x!r} contains forbidden '|'", path)
    return obj


def _number(obj, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ModelFormatError("expected a number", path)
    return float(obj)


def parse_model(data) -> UtilityModel:
    """Parse and validate a model document; raises ModelFormatError with a
    path to the offending field, or with the full violation list when the
    parsed model breaks an invariant."""
    doc = _load_json(data)
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    _require_keys(doc, {"actions", "hypotheses", "attributes", "outcomes"},
                  {"priors"}, "model")
    actions = _string_list(doc["actions"], "actions")
    hypotheses = _string_list(doc["hypotheses"], "hypotheses")
    if not actions:
        raise ModelFormatError("must be nonempty", "actions")
    if not hypotheses:
        raise ModelFormatError("must be nonempty", "hypotheses")

    if not isinstance(doc["attributes"], list) or not doc["attributes"]:
        raise ModelFormatError("expected a nonempty list", "attributes")
    attr_ids: list[str] = []
    weights: list[float] = []
    for i, item in enumerate(doc["attributes"]):
        path = f"attributes[{i}]"
        if not isinstance(item, dict):
            raise ModelFormatError("expected an object", path)
        _require_keys(item, {"id", "weight"}, set(), path)
        if not isinstance(item["id"], str) or "|" in item["id"]:
            raise ModelFormatError("id must be a '|'-free string", f"{path}.id")
        attr_ids.append(item["id"])
        weights.append(_number(item["weight"], f"{path}.weight"))

    if not isinstance(doc["outcomes"], dict):
        raise ModelFormatError("expected an object", "outcomes")
    outcome_values: dict[tuple[str, str], tuple[float, ...]] = {}
    for key, vec in doc["outcomes"].items():
        path = f"outcomes[{key!r}]"
        if key.count("|") != 1:
            raise ModelFormatError(
                "key must be 'action|hypothesis'", path)
        a, h = key.split("|")
        if a not in actions:
            raise ModelFormatError(f"unknown action {a!r}", path)
        if h not in hypotheses:
            raise ModelFormatError(f"unknown hypothesis {h!r}", path)
        if not isinstance(vec, list):
            raise ModelFormatError("expected a list of numbers", path)
        outcome_values[(a, h)] = tuple(
            _number(v, f"{path}[{i}]") for i, v in enumerate(vec))

    priors = None
    if "priors" in doc:
        if not isinstance(doc["priors"], dict):
            raise ModelFormatError("expected an object", "priors")
        priors = {h: _number(p, f"priors[{h!r}]")
                  for h, p in doc["priors"].items()}

    model = UtilityModel(tuple(actions), tuple(hypotheses), tuple(attr_ids),
                         outcome_values, tuple(weights), priors)
    violations = validate_model(model)
    if violations:
        raise ModelFormatError(
            "model violates invariants: " + "; ".join(violations),
            violations=violations)
    return model


def model_to_obj(model: UtilityModel) -> dict:
    obj = {
        "actions": list(model.actions),
        "hypotheses": list(model.hypotheses),
        "attributes": [
            {"id": a, "weight": w}
            for a, w in zip(model.attributes, model.weights)
        ],
        "outcomes": {
            f"{a}|{h}": list(model.outcome_values[(a, h)])
            for a in model.actions for h in model.hypotheses
        },
    }
    if model.priors is not None:
        obj["priors"] = {h: model.priors[h] for h in model.hypotheses}
    return obj


def serialize_model(model: UtilityModel) -> str:
    return canonical.dumps(model_to_obj(model))


def parse_dist(data, model: UtilityModel | None = None) -> ProbabilityDist:
    """Parse ``{"evidence_label"?, "probs": {...}}``; when a model is given,
    the probabilities must cover exactly its hypotheses."""
    doc = _load_json(data)
    if not isinstance(doc, dict):
        raise ModelFormatError("distribution document must be a JSON object")
    _require_keys(doc, {"probs"}, {"evidence_label"}, "distribution")
    if not isinstance(doc["probs"], dict):
        raise ModelFormatError("expected an object", "probs")
    probs = {h: _number(p, f"probs[{h!r}]") for h, p in doc["probs"].items()}
    label = doc.get("evidence_label")
    if label is not None and not isinstance(label, str):
        raise ModelFormatError("expected a string", "evidence_label")
    negative = sorted(h for h, p in probs.items() if p < 0)
    if negative:
        raise ModelFormatError(f"negative probability for {negative}", "probs")
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-9:
        raise ModelFormatError(
            f"probabilities sum to {total!r}, expected 1", "probs")
    if model is not None and set(probs) != set(model.hypotheses):
        missing = sorted(set(model.hypotheses) - set(probs))
        extra = sorted(set(probs) - set(model.hypotheses))
        raise ModelFormatError(
            f"does not cover the model's hypotheses "
            f"(missing {missing}, extra {extra})", "probs")
    return ProbabilityDist(probs, label)


def dist_to_obj(dist: ProbabilityDist) -> dict:
    obj = {}
    if dist.evidence_label is not None:
        obj["evidence_label"] = dist.evidence_label
    obj["probs"] = dict(dist.probs)
    return obj


def serialize_dist(dist: ProbabilityDist) -> str:
    return canonical.dumps(dist_to_obj(dist))


def partition_to_obj(partition: Partition) -> dict:
    categories = []
    for cat in partition.categories:
        entry: dict = {"members": list(cat.members)}
        span = partition.max_span_per_category.get(cat)
        if span is not None:
            entry["max_span"] = float(span)
        categories.append(entry)
    return {
        "kind": partition.kind.value,
        "cutoff": partition.cutoff,
        "categories": categories,
    }


def serialize_partition(partition: Partition) -> str:
    return canonical.dumps(partition_to_obj(partition))


def parse_partition(data) -> Partition:
    doc = _load_json(data)
    if not isinstance(doc, dict):
        raise ModelFormatError("partition document must be a JSON object")
    _require_keys(doc, {"kind", "categories"}, {"cutoff"}, "partition")
    try:
        kind = Kind(doc["kind"])
    except ValueError:
        raise ModelFormatError(
            f"expected 'hypotheses' or 'actions', got {doc['kind']!r}",
            "kind") from None
    cutoff = None
    if doc.get("cutoff") is not None:
        cutoff = _number(doc["cutoff"], "cutoff")
    if not isinstance(doc["categories"], list) or not doc["categories"]:
        raise ModelFormatError("expected a nonempty list", "categories")
    categories = []
    spans: dict[Category, float | None] = {}
    for i, entry in enumerate(doc["categories"]):
        path = f"categories[{i}]"
        if not isinstance(entry, dict):
            raise ModelFormatError("expected an object", path)
        _require_keys(entry, {"members"}, {"max_span"}, path)
        members = _string_list(entry["members"], f"{path}.members")
        if not members:
            raise ModelFormatError("must be nonempty", f"{path}.members")
        cat = Category(kind, tuple(members))
        categories.append(cat)
        spans[cat] = (_number(entry["max_span"], f"{path}.max_span")
                      if "max_span" in entry else None)
    try:
        return Partition(kind, tuple(categories), cutoff, spans)
    except ValueError as exc:
        raise ModelFormatError(str(exc), "categories") from None


def _interval_obj(iv: IntervalUtility) -> list[float]:
    return [iv.lo, iv.hi]


def report_to_obj(report: DecisionReport) -> dict:
    obj: dict = {
        "rule": report.rule.value,
        "scores": {k: float(v) for k, v in report.scores.items()},
        "chosen": report.chosen,
        "dominated": report.dominated,
        "tie": report.tie,
    }
    if report.intervals is not None:
        obj["intervals"] = {k: _interval_obj(iv)
                            for k, iv in report.intervals.items()}
    if report.fallback is not None:
        obj["fallback"] = report_to_obj(report.fallback)
    return obj


def serialize_report(report: DecisionReport) -> str:
    return canonical.dumps(report_to_obj(report))


def span_report_to_obj(category: Category, report: SpanReport) -> dict:
    return {
        "kind": category.kind.value,
        "members": list(category.members),
        "per_axis": {k: float(v) for k, v in report.per_axis.items()},
        "max_span": float(report.max_span),
    }


def serialize_span_report(category: Category, report: SpanReport) -> str:
    return canonical.dumps(span_report_to_obj(category, report))
