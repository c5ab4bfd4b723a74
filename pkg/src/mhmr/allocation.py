"""Condition-driven workload allocation.

Each robot gets an input score combining its own condition, its operators'
conditions and its task performance, gated by the worst of those metrics so
that any incapacitated contributor forces the score to exactly zero.  The
proposed workload share is the score normalized over the team.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NoCapableAgentError
from .team import ConditionSnapshot, TeamTopology, WorkloadVector

#: Below this total score the team is considered fully incapacitated.
CAPABLE_TOTAL_THRESHOLD = 1e-12


def compute_input_vector(
    topology: TeamTopology, snapshot: ConditionSnapshot
) -> np.ndarray:
    """Per-robot input scores in [0, 1], index-aligned with ``topology.robot_ids``.

    For a human-operated robot the score averages its condition, every
    connected operator's condition and its performance, scaled by the
    minimum of those same metrics.  For an autonomous robot the operator
    terms drop out.  A zero anywhere in a robot's own metric set yields an
    exact 0.0 score.
    """
    snapshot.validate_against(topology)
    scores = np.empty(topology.m, dtype=float)
    for idx, rid in enumerate(topology.robot_ids):
        cond = snapshot.robot_condition[rid]
        perf = snapshot.robot_performance[rid]
        operators = topology.operators_of(rid)
        if operators:
            op_conds = [snapshot.operator_condition[o] for o in operators]
            gate = min(cond, perf, *op_conds)
            if gate == 0.0:
                scores[idx] = 0.0
            else:
                bracket = math.fsum([cond, perf, *op_conds])
                scores[idx] = gate / (len(operators) + 2) * bracket
        else:
            gate = min(cond, perf)
            if gate == 0.0:
                scores[idx] = 0.0
            else:
                scores[idx] = gate / 2.0 * (cond + perf)
    return scores


def propose_allocation(
    topology: TeamTopology, snapshot: ConditionSnapshot
) -> WorkloadVector:
    """Proposed workload shares: input scores normalized to sum to 1.

    Raises :class:`NoCapableAgentError` when every score is (effectively)
    zero; an allocation is undefined in that case and the caller decides
    whether to abort or freeze the current workload.
    """
    scores = compute_input_vector(topology, snapshot)
    total = math.fsum(scores.tolist())
    if total < CAPABLE_TOTAL_THRESHOLD:
        raise NoCapableAgentError(
            "no capable agent: all input scores are zero, allocation undefined"
        )
    shares = scores / total
    # Exact-zero scores must stay exactly zero after normalization.
    shares[scores == 0.0] = 0.0
    return WorkloadVector(shares, timestamp=snapshot.timestamp)
