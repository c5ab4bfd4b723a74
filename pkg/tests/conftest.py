import numpy as np
import pytest

from mhmr.team import ConditionSnapshot, TeamTopology


def random_topology(rng: np.random.Generator, max_m: int = 20, max_h: int = 10):
    """Random bipartite team: each robot independently gets 0..3 operators."""
    m = int(rng.integers(1, max_m + 1))
    h = int(rng.integers(1, max_h + 1))
    robot_ids = tuple(range(1, m + 1))
    operator_ids = tuple(range(1, h + 1))
    edges = set()
    for r in robot_ids:
        k = int(rng.integers(0, min(3, h) + 1))
        for o in rng.choice(operator_ids, size=k, replace=False):
            edges.add((r, int(o)))
    return TeamTopology.build(robot_ids, operator_ids, edges)


def random_snapshot(rng: np.random.Generator, topology: TeamTopology):
    return ConditionSnapshot(
        robot_condition={r: float(rng.uniform()) for r in topology.robot_ids},
        operator_condition={o: float(rng.uniform()) for o in topology.operator_ids},
        robot_performance={r: float(rng.uniform()) for r in topology.robot_ids},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
