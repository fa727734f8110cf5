"""Bundled example data: the refuse-collecting robot model."""

from __future__ import annotations

from importlib import resources

from tuba.model import ProbabilityDist, UtilityModel
from tuba.modelfile import parse_dist, parse_model


def fixture_text(name: str) -> str:
    return (resources.files("tuba") / "fixtures" / name).read_text("utf-8")


def robot_model() -> UtilityModel:
    """Four robot actions by six location types, two attributes
    (quietness weighted 0.1, collection efficiency weighted 0.9)."""
    return parse_model(fixture_text("robot.json"))


def robot_uniform_dist() -> ProbabilityDist:
    """Uniform distribution over the robot model's six locations."""
    return parse_dist(fixture_text("robot_uniform_dist.json"))
