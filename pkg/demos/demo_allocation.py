"""Walk through the input-score and allocation math on a small team.

Three robots patrol a shared workspace; robots 1 and 2 are teleoperated,
robot 3 runs autonomously.  We deteriorate one operator and watch how the
proposed workload shifts, then incapacitate a robot outright and watch its
share gate to exactly zero.
"""

import numpy as np

from mhmr import (
    ConditionSnapshot,
    TeamTopology,
    compute_input_vector,
    propose_allocation,
)


def show(label, shares):
    print(f"{label:<38}" + "  ".join(f"{s:.4f}" for s in shares))


def main():
    team = TeamTopology.build([1, 2, 3], [1, 2], [(1, 1), (2, 2)])
    print("robots:", team.robot_ids, " operators:", team.operator_ids)
    print("robot 3 is autonomous:", team.is_autonomous(3))
    print()

    healthy = ConditionSnapshot.healthy(team)
    show("all healthy", propose_allocation(team, healthy).shares)

    tired = ConditionSnapshot(
        robot_condition={1: 1.0, 2: 1.0, 3: 1.0},
        operator_condition={1: 0.5, 2: 1.0},
        robot_performance={1: 1.0, 2: 1.0, 3: 1.0},
    )
    scores = compute_input_vector(team, tired)
    print("\noperator 1 drops to 0.5 -> input scores:", np.round(scores, 4))
    show("operator 1 at 0.5", propose_allocation(team, tired).shares)

    down = ConditionSnapshot(
        robot_condition={1: 1.0, 2: 1.0, 3: 0.0},
        operator_condition={1: 0.5, 2: 1.0},
        robot_performance={1: 1.0, 2: 1.0, 3: 1.0},
    )
    shares = propose_allocation(team, down).shares
    show("robot 3 fails (gated to zero)", shares)
    print("\nrobot 3 share is exactly", shares[2])


if __name__ == "__main__":
    main()
