"""Mixed-integer formulation of best-subset selection under absolute error.

Builds the bi-objective program

    min { sum_i gamma_i , sum_j r_j }
    s.t. r_j * l_j <= beta_j <= r_j * u_j          (activity links)
         |y_i - x_i . beta| <= gamma_i             (two rows per observation)
         r binary, gamma >= 0

together with the data-driven coefficient bounds (l, u): each bound is the
extreme value of one coefficient over the relaxed region whose total
absolute bias stays within the intercept-only (median) fit, computed by one
LP per bound.  Also provides the fixed-support LAD fit used as the oracle
building block everywhere else.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .branch_bound import MilpProblem
from .data import Dataset
from .errors import DegenerateDesignError, DimensionError, InputError, ParseError
from .simplex import GE, LE, LinearProgram, LpStatus, SimplexStart, solve_lp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoundsVector:
    """Per-coefficient lower/upper bounds feeding the activity links."""

    l: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        l = np.asarray(self.l, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "u", u)
        if l.ndim != 1 or l.shape != u.shape:
            raise DimensionError("l and u must be vectors of equal length")
        if not (np.all(np.isfinite(l)) and np.all(np.isfinite(u))):
            raise InputError("coefficient bounds must be finite")
        if np.any(l > u):
            raise InputError("every lower bound must not exceed its upper bound")

    @property
    def p(self) -> int:
        return self.l.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoundsVector):
            return NotImplemented
        return np.array_equal(self.l, other.l) and np.array_equal(self.u, other.u)


def save_bounds(bounds: BoundsVector, path) -> None:
    with open(path, "w") as fh:
        json.dump({"l": [float(v) for v in bounds.l],
                   "u": [float(v) for v in bounds.u]}, fh)
        fh.write("\n")


def load_bounds(path) -> BoundsVector:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    try:
        return BoundsVector(l=np.asarray(payload["l"], dtype=float),
                            u=np.asarray(payload["u"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: expected keys 'l' and 'u': {exc}") from None


def median_bias_bound(dataset: Dataset) -> float:
    """Total absolute deviation of y from its median.

    This value upper-bounds the total bias of every efficient solution once
    the empty model is cut off, because the intercept-only fit at the median
    is feasible with a single active coefficient.
    """
    if dataset.n < 1:
        raise DimensionError("empty response")
    m = float(np.median(dataset.y))
    return float(np.sum(np.abs(dataset.y - m)))


# ---------------------------------------------------------------------------
# Residual-linearization rows shared by the LAD fit, the bound LPs and the
# MILP: for each observation two rows
#       -x_i . beta - gamma_i <= -y_i        ("under" row)
#        x_i . beta - gamma_i <=  y_i        ("over" row)
# ---------------------------------------------------------------------------

def _residual_rows(x: np.ndarray, y: np.ndarray, nv: int, beta_cols: np.ndarray,
                   gamma_offset: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = x.shape[0]
    a = np.zeros((2 * n, nv))
    a[:n, beta_cols] = -x
    a[n:, beta_cols] = x
    gamma_idx = gamma_offset + np.arange(n)
    a[np.arange(n), gamma_idx] = -1.0
    a[n + np.arange(n), gamma_idx] = -1.0
    relations = np.full(2 * n, LE, dtype=np.int8)
    rhs = np.concatenate([-y, y])
    return a, relations, rhs


def _residual_crash(y: np.ndarray, nv: int, gamma_offset: int,
                    extra_rows_basic: list[int] = ()) -> SimplexStart:
    """Feasible starting basis at beta = 0, gamma_i = |y_i|.

    For each observation the gamma variable is basic in whichever row binds
    at beta = 0 and the other row keeps its slack; extra rows (if any) take
    their slack column.
    """
    n = y.shape[0]
    basic = []
    for i in range(n):
        if y[i] > 0:
            basic.append(gamma_offset + i)   # under row binds
        else:
            basic.append(nv + i)             # under-row slack
    for i in range(n):
        if y[i] > 0:
            basic.append(nv + n + i)         # over-row slack
        else:
            basic.append(gamma_offset + i)   # over row binds
    basic.extend(extra_rows_basic)
    return SimplexStart(basic=tuple(basic))


def lad_fit(dataset: Dataset, support) -> tuple[np.ndarray, float]:
    """Least-absolute-deviations fit with coefficients outside ``support``
    fixed to zero.

    Parameters
    ----------
    support : iterable of int
        0-based column indices allowed to be nonzero; must be nonempty.

    Returns
    -------
    (beta, z1) : full-length coefficient vector and the optimal total
    absolute bias.
    """
    cols = np.array(sorted({int(j) for j in support}), dtype=np.int64)
    if cols.size == 0:
        raise InputError("support must be nonempty")
    if cols[0] < 0 or cols[-1] >= dataset.p:
        raise InputError("support index out of range")
    n = dataset.n
    s = cols.size
    nv = s + n
    a, relations, rhs = _residual_rows(dataset.x[:, cols], dataset.y, nv,
                                       np.arange(s), s)
    lp = LinearProgram(
        objective=np.concatenate([np.zeros(s), np.ones(n)]),
        a=a, relations=relations, rhs=rhs,
        lower=np.concatenate([np.full(s, -np.inf), np.zeros(n)]),
        upper=np.full(nv, np.inf),
    )
    sol = solve_lp(lp, start=_residual_crash(dataset.y, nv, s))
    if sol.status != LpStatus.OPTIMAL:
        raise InputError(f"LAD fit unexpectedly returned {sol.status.value}")
    beta = np.zeros(dataset.p)
    beta[cols] = sol.x[:s]
    return beta, float(sol.objective_value)


def compute_bounds(dataset: Dataset) -> BoundsVector:
    """Data-driven coefficient bounds via 2p linear programs.

    Each bound extremizes one coefficient subject to the residual rows and
    the budget  sum_i gamma_i <= median_bias_bound(dataset).  An unbounded
    direction means the design matrix cannot pin that coefficient down and
    raises DegenerateDesignError.
    """
    n, p = dataset.n, dataset.p
    nv = p + n
    budget = median_bias_bound(dataset)
    a_res, rel_res, rhs_res = _residual_rows(dataset.x, dataset.y, nv,
                                             np.arange(p), p)
    budget_row = np.zeros((1, nv))
    budget_row[0, p:] = 1.0
    a = np.vstack([a_res, budget_row])
    relations = np.concatenate([rel_res, [LE]]).astype(np.int8)
    rhs = np.concatenate([rhs_res, [budget]])
    lower = np.concatenate([np.full(p, -np.inf), np.zeros(n)])
    upper = np.full(nv, np.inf)
    start = _residual_crash(dataset.y, nv, p, extra_rows_basic=[nv + 2 * n])

    l = np.zeros(p)
    u = np.zeros(p)
    for j in range(p):
        objective = np.zeros(nv)
        objective[j] = 1.0
        for sense, store in (("max", u), ("min", l)):
            lp = LinearProgram(objective=objective, a=a, relations=relations,
                               rhs=rhs, lower=lower, upper=upper, sense=sense)
            sol = solve_lp(lp, start=start)
            if sol.status == LpStatus.UNBOUNDED:
                raise DegenerateDesignError(j)
            if sol.status != LpStatus.OPTIMAL:
                raise InputError(
                    f"bound LP for coefficient {j + 1} returned {sol.status.value}")
            store[j] = sol.objective_value
    u = np.maximum(u, l)  # guards against eps-level inversions on ties
    logger.debug("coefficient bounds: l=%s u=%s", l, u)
    return BoundsVector(l=l, u=u)


@dataclass(frozen=True)
class BiobjectiveMilp:
    """Constraint system of the subset-selection program plus both
    objective vectors; single-objective subproblems are stamped out of it.

    Variable layout: beta_1..beta_p, gamma_1..gamma_n, r_1..r_p.
    """

    a: np.ndarray
    relations: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    binary_vars: frozenset[int]
    z1: np.ndarray
    z2: np.ndarray
    p: int
    n: int

    @property
    def beta_slice(self) -> slice:
        return slice(0, self.p)

    @property
    def gamma_slice(self) -> slice:
        return slice(self.p, self.p + self.n)

    @property
    def r_slice(self) -> slice:
        return slice(self.p + self.n, 2 * self.p + self.n)

    def subproblem(self, objective: np.ndarray, *, cardinality_cap: int | None = None,
                   bias_cap: float | None = None, sense: str = "min") -> MilpProblem:
        """Single-objective restriction with optional caps on either objective."""
        a, relations, rhs = self.a, self.relations, self.rhs
        extra_a, extra_rel, extra_rhs = [], [], []
        if cardinality_cap is not None:
            extra_a.append(self.z2)
            extra_rel.append(LE)
            extra_rhs.append(float(cardinality_cap))
        if bias_cap is not None:
            extra_a.append(self.z1)
            extra_rel.append(LE)
            extra_rhs.append(float(bias_cap))
        if extra_a:
            a = np.vstack([a, np.asarray(extra_a)])
            relations = np.concatenate([relations, extra_rel]).astype(np.int8)
            rhs = np.concatenate([rhs, extra_rhs])
        lp = LinearProgram(objective=objective, a=a, relations=relations, rhs=rhs,
                           lower=self.lower.copy(), upper=self.upper.copy(),
                           sense=sense)
        return MilpProblem(lp=lp, binary_vars=self.binary_vars)


def build_bomilp(dataset: Dataset, bounds: BoundsVector,
                 exclude_trivial: bool = True) -> BiobjectiveMilp:
    """Assemble the bi-objective program for one dataset.

    The activity links are written as two rows per coefficient,
    beta_j - u_j r_j <= 0 and -beta_j + l_j r_j <= 0, and each beta_j gets
    the box [min(l_j, 0), max(u_j, 0)] so that r_j = 0 forces beta_j = 0
    while r_j = 1 recovers [l_j, u_j].  With ``exclude_trivial`` the cut
    sum_j r_j >= 1 removes the empty model from the feasible set.
    """
    if bounds.p != dataset.p:
        raise DimensionError(
            f"bounds have length {bounds.p} but the dataset has p={dataset.p}")
    p, n = dataset.p, dataset.n
    nv = 2 * p + n
    beta_idx = np.arange(p)
    r_idx = p + n + np.arange(p)

    link = np.zeros((2 * p, nv))
    link[:p, beta_idx] = np.eye(p)
    link[:p, r_idx] = -np.diag(bounds.u)
    link[p:, beta_idx] = -np.eye(p)
    link[p:, r_idx] = np.diag(bounds.l)
    rhs_link = np.zeros(2 * p)

    a_res, rel_res, rhs_res = _residual_rows(dataset.x, dataset.y, nv,
                                             beta_idx, p)
    a = np.vstack([link, a_res])
    relations = np.concatenate([np.full(2 * p, LE, dtype=np.int8), rel_res])
    rhs = np.concatenate([rhs_link, rhs_res])

    if exclude_trivial:
        cut = np.zeros((1, nv))
        cut[0, r_idx] = 1.0
        a = np.vstack([a, cut])
        relations = np.concatenate([relations, [GE]]).astype(np.int8)
        rhs = np.concatenate([rhs, [1.0]])

    lower = np.concatenate([np.minimum(bounds.l, 0.0), np.zeros(n), np.zeros(p)])
    upper = np.concatenate([np.maximum(bounds.u, 0.0), np.full(n, np.inf),
                            np.ones(p)])
    z1 = np.zeros(nv)
    z1[p:p + n] = 1.0
    z2 = np.zeros(nv)
    z2[r_idx] = 1.0
    return BiobjectiveMilp(a=a, relations=relations, rhs=rhs, lower=lower,
                           upper=upper, binary_vars=frozenset(int(j) for j in r_idx),
                           z1=z1, z2=z2, p=p, n=n)
