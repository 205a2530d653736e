"""Bounded-variable revised simplex solver.

Solves  min/max c.x  subject to  A x {<=,>=,=} b  and  l <= x <= u,
with any mix of finite and infinite bounds.  The implementation is a
two-phase primal simplex over the standard equality form (one slack per
row, artificial variables only on rows the slack cannot satisfy), keeping
a dense explicit basis inverse that is refactorized periodically.  Pivots
follow the Dantzig rule with a Bland fallback once the objective stalls,
and ratio-test ties break toward the lowest variable index, so identical
inputs always produce identical solutions.

Problem sizes here are desk scale (at most a few hundred rows), which is
why dense algebra is used throughout.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import InputError, IterationLimitError, NumericalError

# Constraint relation codes for LinearProgram.relations.
LE, GE, EQ = 0, 1, 2
RELATION_SYMBOLS = {LE: "<=", GE: ">=", EQ: "="}

FEAS_TOL = 1e-7     # accepted bound/constraint violation at an Optimal return
OPT_TOL = 1e-9      # reduced-cost threshold for entering candidates
PIVOT_TOL = 1e-10   # smallest |w_i| that counts as blocking in the ratio test
STALL_EPS = 1e-12   # objective progress below this counts as a stall
REFACTOR_EVERY = 100

_NB_LOWER, _NB_UPPER, _NB_FREE, _BASIC = 0, 1, 2, 3


class LpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class LinearProgram:
    """A linear program over bounded variables.

    ``a`` is the dense constraint matrix (possibly with zero rows), one entry
    of ``relations`` (LE, GE or EQ) and ``rhs`` per row.  ``lower``/``upper``
    may contain -inf/+inf.  Instances are treated as immutable while a solve
    is running.
    """

    objective: np.ndarray
    a: np.ndarray
    relations: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sense: str = "min"

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.a = np.ascontiguousarray(self.a, dtype=float)
        self.relations = np.asarray(self.relations, dtype=np.int8)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_constraints(self) -> int:
        return self.a.shape[0]

    def with_bounds(self, lower, upper) -> "LinearProgram":
        """Copy of this program with replaced variable bounds (shares a)."""
        return replace(self, lower=np.asarray(lower, dtype=float),
                       upper=np.asarray(upper, dtype=float))

    def validate(self) -> None:
        n = self.num_vars
        if self.objective.ndim != 1 or n < 1:
            raise InputError("objective must be a nonempty vector")
        if self.a.ndim != 2 or self.a.shape[1] != n:
            raise InputError(f"constraint matrix must have {n} columns")
        m = self.a.shape[0]
        if self.relations.shape != (m,) or self.rhs.shape != (m,):
            raise InputError("relations/rhs must have one entry per constraint row")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise InputError("bounds must have one entry per variable")
        if not np.all(np.isfinite(self.a)):
            raise InputError("constraint matrix contains non-finite entries")
        if not np.all(np.isfinite(self.objective)):
            raise InputError("objective contains non-finite entries")
        if not np.all(np.isfinite(self.rhs)):
            raise InputError("rhs contains non-finite entries")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise InputError("bounds must not be NaN")
        if np.any(self.lower > self.upper):
            j = int(np.argmax(self.lower > self.upper))
            raise InputError(f"variable {j} has lower bound above upper bound")
        if not np.all(np.isin(self.relations, (LE, GE, EQ))):
            raise InputError("relations must be LE, GE or EQ")
        if self.sense not in ("min", "max"):
            raise InputError(f"unknown sense {self.sense!r}")


@dataclass
class LpSolution:
    """Result of one simplex solve.

    ``x``/``duals`` are None unless the status is OPTIMAL.
    ``feasibility_residual`` is the largest constraint or bound violation at
    the returned point, ``dual_gap`` the absolute difference between the
    primal objective and the dual objective reconstructed from the final
    basis; both are measured after a fresh factorization.
    """

    status: LpStatus
    x: np.ndarray | None
    objective_value: float
    iteration_count: int
    duals: np.ndarray | None = None
    feasibility_residual: float = float("nan")
    dual_gap: float = float("nan")


@dataclass(frozen=True)
class SimplexStart:
    """Advisory starting basis in standard-form indices.

    Structural variables keep their indices; the slack of constraint row i
    is ``num_vars + i``.  ``basic`` must list one variable per row.  Indices
    in ``at_upper`` start nonbasic at their (finite) upper bound.  A hint
    that is singular or infeasible is silently discarded.
    """

    basic: tuple[int, ...]
    at_upper: tuple[int, ...] = ()


@dataclass
class SolveStats:
    """Running audit of every Optimal return; used by the test suite."""

    optimal_returns: int = 0
    max_feasibility_residual: float = 0.0
    max_relative_dual_gap: float = 0.0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record(self, residual: float, relative_gap: float) -> None:
        with self._lock:
            self.optimal_returns += 1
            self.max_feasibility_residual = max(self.max_feasibility_residual, residual)
            self.max_relative_dual_gap = max(self.max_relative_dual_gap, relative_gap)

    def reset(self) -> None:
        with self._lock:
            self.optimal_returns = 0
            self.max_feasibility_residual = 0.0
            self.max_relative_dual_gap = 0.0


solve_stats = SolveStats()


def _slack_bounds(relations: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = relations.shape[0]
    lo = np.zeros(m)
    hi = np.zeros(m)
    hi[relations == LE] = np.inf
    lo[relations == GE] = -np.inf
    return lo, hi


class _Simplex:
    """Mutable solver state over the standard equality form."""

    def __init__(self, a_std: np.ndarray, b: np.ndarray,
                 lb: np.ndarray, ub: np.ndarray, *,
                 refactor_every: int = REFACTOR_EVERY,
                 ratio_relax: float = 1e-9):
        self.m = a_std.shape[0]
        self.a = a_std
        self.b = b
        self.lb = lb
        self.ub = ub
        self.nt = a_std.shape[1]
        self.x = np.zeros(self.nt)
        self.vstat = np.zeros(self.nt, dtype=np.int8)
        self.basis = np.zeros(self.m, dtype=np.int64)
        self.binv = np.zeros((self.m, self.m))
        self.artificials: np.ndarray = np.zeros(0, dtype=np.int64)
        self.iterations = 0
        self._since_refactor = 0
        self._refactor_every = refactor_every
        self._ratio_relax = ratio_relax

    # -- start-up -----------------------------------------------------------

    def _default_nonbasic(self) -> None:
        lb_fin = np.isfinite(self.lb)
        ub_fin = np.isfinite(self.ub)
        self.vstat[:] = _NB_FREE
        self.x[:] = 0.0
        at_up = ~lb_fin & ub_fin
        self.vstat[lb_fin] = _NB_LOWER
        self.x[lb_fin] = self.lb[lb_fin]
        self.vstat[at_up] = _NB_UPPER
        self.x[at_up] = self.ub[at_up]

    def try_start(self, start: SimplexStart, num_struct: int) -> bool:
        basic = np.asarray(start.basic, dtype=np.int64)
        if basic.shape != (self.m,) or len(set(start.basic)) != self.m:
            raise InputError("starting basis must name one distinct variable per row")
        if np.any(basic < 0) or np.any(basic >= self.nt):
            raise InputError("starting basis index out of range")
        self._default_nonbasic()
        for j in start.at_upper:
            if not np.isfinite(self.ub[j]):
                raise InputError(f"variable {j} cannot start at an infinite upper bound")
            self.vstat[j] = _NB_UPPER
            self.x[j] = self.ub[j]
        bmat = self.a[:, basic]
        try:
            binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError:
            return False
        x_nb = self.x.copy()
        x_nb[basic] = 0.0
        xb = binv @ (self.b - self.a @ x_nb)
        if np.any(xb < self.lb[basic] - FEAS_TOL) or np.any(xb > self.ub[basic] + FEAS_TOL):
            return False
        self.basis = basic
        self.binv = binv
        self.x[basic] = xb
        self.vstat[basic] = _BASIC
        self._since_refactor = 0
        return True

    def cold_start(self, num_struct: int) -> None:
        """Slack basis where feasible, one artificial per violated row."""
        self._default_nonbasic()
        residual = self.b - self.a @ self.x
        art_cols: list[np.ndarray] = []
        art_vals: list[float] = []
        art_rows: list[int] = []
        for i in range(self.m):
            s = num_struct + i
            v = residual[i]
            if self.lb[s] - FEAS_TOL <= v <= self.ub[s] + FEAS_TOL:
                self.basis[i] = s
                self.x[s] = v
                self.vstat[s] = _BASIC
            else:
                col = np.zeros(self.m)
                col[i] = 1.0 if v > 0 else -1.0
                art_cols.append(col)
                art_vals.append(abs(v))
                art_rows.append(i)
        if art_cols:
            k = len(art_cols)
            self.a = np.hstack([self.a, np.column_stack(art_cols)])
            self.lb = np.concatenate([self.lb, np.zeros(k)])
            self.ub = np.concatenate([self.ub, np.full(k, np.inf)])
            self.x = np.concatenate([self.x, np.asarray(art_vals)])
            self.vstat = np.concatenate([self.vstat, np.full(k, _BASIC, dtype=np.int8)])
            self.artificials = np.arange(self.nt, self.nt + k, dtype=np.int64)
            self.nt += k
            for offset, row in enumerate(art_rows):
                self.basis[row] = self.artificials[offset]
        self._refactorize()

    def seal_artificials(self) -> None:
        """Pin artificials to zero so phase two can never move them."""
        if self.artificials.size:
            self.lb[self.artificials] = 0.0
            self.ub[self.artificials] = 0.0

    # -- core machinery -----------------------------------------------------

    def _refactorize(self) -> None:
        bmat = self.a[:, self.basis]
        try:
            self.binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError:
            raise NumericalError("basis matrix became singular") from None
        x_nb = self.x.copy()
        x_nb[self.basis] = 0.0
        self.x[self.basis] = self.binv @ (self.b - self.a @ x_nb)
        self._since_refactor = 0

    def run(self, cost: np.ndarray, max_iterations: int, stall_threshold: int) -> str:
        """Iterate to optimality for ``cost``; returns 'optimal', 'unbounded'
        or 'limit'."""
        movable = (self.ub - self.lb) > 0.0
        bland = False
        best_obj = np.inf
        stall = 0
        while True:
            y = cost[self.basis] @ self.binv
            d = cost - y @ self.a

            cand = (
                ((self.vstat == _NB_LOWER) & movable & (d < -OPT_TOL))
                | ((self.vstat == _NB_UPPER) & movable & (d > OPT_TOL))
                | ((self.vstat == _NB_FREE) & (np.abs(d) > OPT_TOL))
            )
            if not cand.any():
                if self._since_refactor > 0:
                    self._refactorize()  # confirm optimality on a fresh basis
                    continue
                return "optimal"

            if self.iterations >= max_iterations:
                return "limit"

            if bland:
                q = int(np.nonzero(cand)[0][0])
            else:
                score = np.where(cand, np.abs(d), 0.0)
                q = int(np.argmax(score))
            t = 1.0 if (self.vstat[q] == _NB_LOWER
                        or (self.vstat[q] == _NB_FREE and d[q] < 0)) else -1.0

            w = self.binv @ self.a[:, q]
            tw = t * w
            xb = self.x[self.basis]
            # Two-pass ratio test: pass one relaxes every bound by a hair to
            # find the largest safe step, pass two picks the largest pivot
            # among rows whose exact ratio fits under that step.  This keeps
            # near-singular pivots out of the basis; ties still break toward
            # the lowest variable index.
            blocking = np.abs(tw) > PIVOT_TOL
            slack = np.where(tw > 0, xb - self.lb[self.basis],
                             self.ub[self.basis] - xb)
            with np.errstate(invalid="ignore", divide="ignore"):
                exact = np.where(blocking, slack / np.abs(tw), np.inf)
                relaxed = np.where(blocking,
                                   (slack + self._ratio_relax) / np.abs(tw),
                                   np.inf)
            exact[np.isnan(exact)] = np.inf
            relaxed[np.isnan(relaxed)] = np.inf
            theta_max = relaxed.min() if self.m else np.inf
            theta_flip = self.ub[q] - self.lb[q]
            if not (np.isfinite(theta_max) or np.isfinite(theta_flip)):
                if self._since_refactor > 0:
                    self._refactorize()  # confirm the ray on a fresh basis
                    continue
                return "unbounded"

            if theta_flip <= theta_max:
                # Entering variable traverses to its opposite bound.
                self.iterations += 1
                self.x[self.basis] = xb - theta_flip * tw
                self.x[q] = self.ub[q] if t > 0 else self.lb[q]
                self.vstat[q] = _NB_UPPER if t > 0 else _NB_LOWER
            else:
                candidates = np.nonzero(exact <= theta_max)[0]
                if candidates.size == 0:  # float pathology; re-derive state
                    if self._since_refactor > 0:
                        self._refactorize()
                        continue
                    raise NumericalError("ratio test found no usable pivot")
                pivots = np.abs(tw[candidates])
                best = pivots == pivots.max()
                rows = candidates[best]
                r = int(rows[np.argmin(self.basis[rows])])
                if abs(w[r]) < 1e-9 and self._since_refactor > 0:
                    self._refactorize()  # unreliable pivot, re-price
                    continue
                self.iterations += 1
                theta = max(float(exact[r]), 0.0)
                leaving = self.basis[r]
                hit_lower = tw[r] > 0
                self.x[self.basis] = xb - theta * tw
                self.x[leaving] = self.lb[leaving] if hit_lower else self.ub[leaving]
                self.vstat[leaving] = _NB_LOWER if hit_lower else _NB_UPPER
                self.x[q] = self.x[q] + theta * t
                self.vstat[q] = _BASIC
                self.basis[r] = q
                self._eta_update(w, r)
                self._since_refactor += 1
                if self._since_refactor >= self._refactor_every:
                    self._refactorize()

            obj = float(cost @ self.x)
            if obj < best_obj - STALL_EPS:
                best_obj = obj
                stall = 0
                bland = False
            else:
                stall += 1
                if stall >= stall_threshold:
                    bland = True  # anti-cycling fallback

    def _eta_update(self, w: np.ndarray, r: int) -> None:
        wr = w[r]
        self.binv[r] /= wr
        others = w.copy()
        others[r] = 0.0
        self.binv -= np.outer(others, self.binv[r])

    def objective(self, cost: np.ndarray) -> float:
        return float(cost @ self.x)


def solve_lp(lp: LinearProgram, *, max_iterations: int | None = None,
             start: SimplexStart | None = None) -> LpSolution:
    """Solve a linear program to proven optimality.

    Parameters
    ----------
    lp : LinearProgram
        The problem; validated before solving.
    max_iterations : int, optional
        Safety cap across both phases; exceeding it raises
        IterationLimitError (a resource error, not an Infeasible status).
    start : SimplexStart, optional
        Advisory warm basis; discarded if singular or infeasible.

    Returns
    -------
    LpSolution
        With status OPTIMAL the point is feasible within 1e-7 and no
        reduced cost beyond 1e-9 remained on a freshly factorized basis.
    """
    lp.validate()
    solution = _attempt(lp, max_iterations, start, REFACTOR_EVERY, 1e-9)
    if (solution.status == LpStatus.OPTIMAL
            and solution.feasibility_residual > FEAS_TOL):
        # The fast regime lost feasibility; redo the solve carefully.
        solution = _attempt(lp, max_iterations, None, 8, 0.0)
        if solution.status == LpStatus.OPTIMAL \
                and solution.feasibility_residual > FEAS_TOL:
            raise NumericalError(
                f"could not reduce the feasibility residual below {FEAS_TOL}")
    if solution.status == LpStatus.OPTIMAL:
        solve_stats.record(solution.feasibility_residual,
                           solution.dual_gap / (1.0 + abs(solution.objective_value)))
    return solution


def _attempt(lp: LinearProgram, max_iterations: int | None,
             start: SimplexStart | None, refactor_every: int,
             ratio_relax: float) -> LpSolution:
    n = lp.num_vars
    m = lp.num_constraints
    minimize = lp.sense == "min"
    c_user = lp.objective if minimize else -lp.objective

    slack_lo, slack_hi = _slack_bounds(lp.relations)
    a_std = np.hstack([lp.a, np.eye(m)]) if m else np.zeros((0, n))
    lb = np.concatenate([lp.lower, slack_lo])
    ub = np.concatenate([lp.upper, slack_hi])
    cost = np.concatenate([c_user, np.zeros(m)])

    if max_iterations is None:
        max_iterations = 2000 + 200 * (n + 2 * m)
    stall_threshold = max(n, 1)

    core = _Simplex(a_std, lp.rhs.copy(), lb, ub,
                    refactor_every=refactor_every, ratio_relax=ratio_relax)
    warm = False
    if start is not None:
        warm = core.try_start(start, n)
    if not warm:
        core.cold_start(n)

    if core.artificials.size:
        phase1 = np.zeros(core.nt)
        phase1[core.artificials] = 1.0
        outcome = core.run(phase1, max_iterations, stall_threshold)
        if outcome == "limit":
            raise IterationLimitError(
                f"iteration limit {max_iterations} hit in phase one")
        if outcome == "unbounded":
            raise NumericalError("phase one reported an unbounded ray")
        if core.objective(phase1) > FEAS_TOL:
            return LpSolution(status=LpStatus.INFEASIBLE, x=None,
                              objective_value=float("nan"),
                              iteration_count=core.iterations)
        core.seal_artificials()

    cost_full = np.zeros(core.nt)
    cost_full[:n + m] = cost
    outcome = core.run(cost_full, max_iterations, stall_threshold)
    if outcome == "limit":
        raise IterationLimitError(f"iteration limit {max_iterations} exceeded")
    if outcome == "unbounded":
        return LpSolution(status=LpStatus.UNBOUNDED, x=None,
                          objective_value=-np.inf if minimize else np.inf,
                          iteration_count=core.iterations)

    # Fresh factorization before auditing the claimed optimum.
    core._refactorize()
    x = core.x
    eq_residual = float(np.max(np.abs(core.a @ x - core.b))) if m else 0.0
    lower_violation = np.max(np.maximum(core.lb - x, 0.0), initial=0.0)
    upper_violation = np.max(np.maximum(x - core.ub, 0.0), initial=0.0)
    residual = max(eq_residual, float(lower_violation), float(upper_violation))

    y = cost_full[core.basis] @ core.binv
    d = cost_full - y @ core.a
    nonbasic = core.vstat != _BASIC
    dual_obj = float(y @ core.b + d[nonbasic] @ x[nonbasic])
    obj_min = core.objective(cost_full)
    gap = abs(dual_obj - obj_min)

    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=x[:n].copy(),
        objective_value=obj_min if minimize else -obj_min,
        iteration_count=core.iterations,
        duals=(y[:m].copy() if minimize else -y[:m].copy()) if m else np.zeros(0),
        feasibility_residual=residual,
        dual_gap=gap,
    )
