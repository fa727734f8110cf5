from __future__ import annotations

import numpy as np
import pytest

from tuba.fixtures import robot_model, robot_uniform_dist
from tuba.metrics import Category, Kind
from tuba.model import (
    ModelView,
    ProbabilityDist,
    UtilityMatrix,
    reweight,
    utility_matrix,
)


@pytest.fixture(scope="session")
def robot():
    return robot_model()


@pytest.fixture(scope="session")
def robot_matrix(robot):
    """Robot utilities at the initial weighting (0.1 quiet, 0.9 efficiency)."""
    return utility_matrix(ModelView.full(robot))


@pytest.fixture(scope="session")
def robot_matrix_flipped(robot):
    """Robot utilities at the revised weighting (0.9 quiet, 0.1 efficiency)."""
    return utility_matrix(ModelView.full(reweight(robot, (0.9, 0.1))))


@pytest.fixture(scope="session")
def uniform6(robot):
    return robot_uniform_dist()


def random_matrix(rng: np.random.Generator, n_actions: int,
                  n_hypotheses: int) -> UtilityMatrix:
    actions = tuple(f"a{i}" for i in range(n_actions))
    hypotheses = tuple(f"h{j}" for j in range(n_hypotheses))
    values = rng.uniform(-2.0, 2.0, size=(n_actions, n_hypotheses))
    return UtilityMatrix(actions, hypotheses, values)


def random_dist(rng: np.random.Generator, hypotheses) -> ProbabilityDist:
    raw = rng.uniform(0.05, 1.0, size=len(hypotheses))
    p = raw / raw.sum()
    return ProbabilityDist(dict(zip(hypotheses, p)))


def random_grouping(rng: np.random.Generator, ids, kind: Kind):
    """A random partition of ids into 1..len(ids) nonempty categories."""
    from tuba.clustering import Partition

    ids = list(ids)
    n_groups = int(rng.integers(1, len(ids) + 1))
    assignment = list(rng.integers(0, n_groups, size=len(ids)))
    # Guarantee every group is nonempty by seeding one member each.
    seeds = rng.permutation(len(ids))[:n_groups]
    for g, i in enumerate(seeds):
        assignment[i] = g
    categories = []
    for g in range(n_groups):
        members = tuple(x for x, a in zip(ids, assignment) if a == g)
        if members:
            categories.append(Category(kind, members))
    return Partition(kind, tuple(categories), None,
                     {c: None for c in categories})
