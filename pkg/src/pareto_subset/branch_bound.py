"""Best-first branch and bound for mixed binary/continuous linear programs.

Layered on the bounded-variable simplex: every node solves an LP relaxation
with tightened variable bounds.  Branching fixes the most fractional binary
(ties to the lowest index) to 0 and to 1; node selection is best-first by
the parent LP bound with FIFO tie-breaking, so solves are deterministic.
No cuts and no primal heuristics; instance sizes here do not need them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import InputError, NodeLimitError
from .simplex import LinearProgram, LpStatus, solve_lp

INT_TOL = 1e-6    # a binary value within this of 0/1 counts as integral
PRUNE_TOL = 1e-9  # nodes with bound >= incumbent - PRUNE_TOL are discarded


class MilpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"


@dataclass
class MilpProblem:
    """A linear program plus a set of variable indices restricted to {0,1}."""

    lp: LinearProgram
    binary_vars: frozenset[int]

    def __post_init__(self):
        self.binary_vars = frozenset(int(j) for j in self.binary_vars)

    def validate(self) -> None:
        self.lp.validate()
        n = self.lp.num_vars
        for j in sorted(self.binary_vars):
            if not 0 <= j < n:
                raise InputError(f"binary variable index {j} out of range")
            if self.lp.lower[j] < 0.0 or self.lp.upper[j] > 1.0:
                raise InputError(
                    f"binary variable {j} must have bounds within [0, 1]")


@dataclass
class MilpSolution:
    status: MilpStatus
    x: np.ndarray | None
    objective_value: float
    nodes_explored: int


def solve_milp(problem: MilpProblem, node_limit: int = 100_000) -> MilpSolution:
    """Solve a mixed binary/continuous program to global optimality.

    Raises NodeLimitError (carrying the incumbent found so far, if any) when
    ``node_limit`` LP relaxations were solved with open nodes remaining.
    """
    problem.validate()
    if node_limit < 1:
        raise InputError("node_limit must be at least 1")

    minimize = problem.lp.sense == "min"
    lp_min = problem.lp if minimize else replace(
        problem.lp, objective=-problem.lp.objective, sense="min")
    binaries = np.array(sorted(problem.binary_vars), dtype=np.int64)

    incumbent_x: np.ndarray | None = None
    incumbent_val = np.inf
    nodes_explored = 0
    seq = 0
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    heapq.heappush(heap, (-np.inf, seq, lp_min.lower.copy(), lp_min.upper.copy()))

    def _result(status: MilpStatus) -> MilpSolution:
        value = incumbent_val if minimize else -incumbent_val
        return MilpSolution(status=status, x=incumbent_x,
                            objective_value=value if incumbent_x is not None
                            else float("nan"),
                            nodes_explored=nodes_explored)

    while heap:
        bound, _, lower, upper = heapq.heappop(heap)
        if bound >= incumbent_val - PRUNE_TOL:
            continue
        if nodes_explored >= node_limit:
            raise NodeLimitError(
                f"node limit {node_limit} exceeded",
                incumbent=None if incumbent_x is None else _result(MilpStatus.OPTIMAL))

        sol = solve_lp(lp_min.with_bounds(lower, upper))
        nodes_explored += 1
        if sol.status == LpStatus.INFEASIBLE:
            continue
        if sol.status == LpStatus.UNBOUNDED:
            raise InputError("the LP relaxation is unbounded; "
                             "every MILP variable set must be bounded")
        value = sol.objective_value
        if value >= incumbent_val - PRUNE_TOL:
            continue

        frac = sol.x[binaries] if binaries.size else np.zeros(0)
        dist = np.abs(frac - np.round(frac))
        if not binaries.size or float(dist.max()) <= INT_TOL:
            if value < incumbent_val:
                incumbent_val = value
                incumbent_x = sol.x.copy()
            continue

        j = int(binaries[int(np.argmax(dist))])  # argmax keeps the lowest index on ties
        for fix in (0.0, 1.0):
            child_lower = lower.copy()
            child_upper = upper.copy()
            child_lower[j] = max(child_lower[j], fix)
            child_upper[j] = min(child_upper[j], fix)
            if child_lower[j] > child_upper[j]:
                continue
            seq += 1
            heapq.heappush(heap, (value, seq, child_lower, child_upper))

    if incumbent_x is None:
        return _result(MilpStatus.INFEASIBLE)
    return _result(MilpStatus.OPTIMAL)
