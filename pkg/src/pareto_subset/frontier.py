"""Nondominated frontier enumeration, classification and selection.

The frontier of the bi-objective subset-selection program is finite (at
most p+1 points, one per predictor count), so it is enumerated exactly with
a two-stage epsilon-constraint scheme: minimize total bias under a
cardinality cap, then minimize cardinality among bias-optimal solutions so
that no weakly dominated point is ever emitted.  A brute-force all-subsets
oracle, a convex-hull supportedness classifier, the ideal-point selection
heuristic and the two classical single-objective reductions (weighted sum,
goal programming) live here as well.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .data import Dataset
from .errors import (FrontierIncompleteError, GuardError, InputError,
                     NodeLimitError, NumericalError, ParseError)
from .formulation import BiobjectiveMilp, BoundsVector, build_bomilp, lad_fit
from .branch_bound import MilpSolution, MilpStatus, solve_milp

logger = logging.getLogger(__name__)

DEDUP_TOL = 1e-6        # z1 values closer than this count as the same bias
LEX_EPS = 1e-9          # stage-B bias slack above the stage-A optimum
ACTIVE_TOL = 1e-6       # |beta_j| above this marks predictor j active
DEFAULT_NODE_LIMIT = 500_000
ORACLE_MAX_P = 12


class PointClass(Enum):
    EXTREME_SUPPORTED = "ExtremeSupported"
    NONEXTREME_SUPPORTED = "NonExtremeSupported"
    UNSUPPORTED = "Unsupported"
    TRIVIAL = "Trivial"


@dataclass
class FrontierPoint:
    """One nondominated point: objectives, coefficients, active mask.

    ``active`` records which predictors the reported model uses; for every
    efficient point it coincides with ``|beta| > 1e-6`` (the non-lexicographic
    goal-programming reduction can break that on purpose).
    """

    z1: float
    z2: int
    beta: np.ndarray
    active: np.ndarray
    classification: PointClass | None = None


@dataclass
class FrontierStats:
    subproblems: int = 0
    nodes: int = 0
    wall_time: float = 0.0


@dataclass
class Frontier:
    """Nondominated points sorted by ascending predictor count."""

    points: list[FrontierPoint]
    stats: FrontierStats = field(default_factory=FrontierStats)
    complete: bool = True

    def validate(self) -> None:
        """Check the frontier invariants; raises InputError on violation."""
        pts = self.points
        if not pts:
            raise InputError("frontier has no points")
        p = pts[0].beta.shape[0]
        if len(pts) > p + 1:
            raise InputError(f"{len(pts)} points exceed the p+1 bound")
        for a, b in itertools.pairwise(pts):
            if not b.z2 > a.z2:
                raise InputError("z2 must be strictly increasing")
            if not b.z1 < a.z1:
                raise InputError("z1 must be strictly decreasing")
        if any(pt.z1 < 0 for pt in pts):
            raise InputError("z1 must be nonnegative")


def _trivial_point(dataset: Dataset) -> FrontierPoint:
    return FrontierPoint(
        z1=float(np.sum(np.abs(dataset.y))), z2=0,
        beta=np.zeros(dataset.p), active=np.zeros(dataset.p, dtype=bool),
        classification=PointClass.TRIVIAL)


def _point_from_milp(dataset: Dataset, model: BiobjectiveMilp,
                     sol: MilpSolution) -> FrontierPoint:
    beta = sol.x[model.beta_slice].copy()
    r = sol.x[model.r_slice]
    z1 = float(np.sum(np.abs(dataset.y - dataset.x @ beta)))
    return FrontierPoint(z1=z1, z2=int(round(float(np.sum(r)))), beta=beta,
                         active=r > 0.5)


def solve_frontier(dataset: Dataset, bounds: BoundsVector, *,
                   node_limit: int = DEFAULT_NODE_LIMIT,
                   include_trivial: bool = True) -> Frontier:
    """Enumerate the exact nondominated frontier.

    Iterates the cardinality cap k from p downward.  Stage A minimizes the
    total bias under the cap; stage B then minimizes the predictor count
    among solutions whose bias stays within ``LEX_EPS`` of the stage-A
    optimum, so the emitted point is always efficient and empty cardinality
    levels are skipped.  Consecutive points whose bias ties within
    ``DEDUP_TOL`` are merged (the smaller model wins).

    Raises FrontierIncompleteError carrying the partial frontier if a MILP
    hits ``node_limit``.
    """
    start = time.perf_counter()
    model = build_bomilp(dataset, bounds, exclude_trivial=True)
    stats = FrontierStats()
    found: list[FrontierPoint] = []  # decreasing z2 as discovered

    def _finish(points_desc: list[FrontierPoint], complete: bool) -> Frontier:
        points = list(reversed(points_desc))
        if include_trivial:
            points.insert(0, _trivial_point(dataset))
        stats.wall_time = time.perf_counter() - start
        return Frontier(points=points, stats=stats, complete=complete)

    k = dataset.p
    try:
        while k >= 1:
            stage_a = model.subproblem(model.z1, cardinality_cap=k)
            sol_a = solve_milp(stage_a, node_limit)
            stats.subproblems += 1
            stats.nodes += sol_a.nodes_explored
            if sol_a.status != MilpStatus.OPTIMAL:
                raise NumericalError(f"bias stage at k={k} returned "
                                     f"{sol_a.status.value}")
            stage_b = model.subproblem(model.z2, cardinality_cap=k,
                                       bias_cap=sol_a.objective_value + LEX_EPS)
            sol_b = solve_milp(stage_b, node_limit)
            stats.subproblems += 1
            stats.nodes += sol_b.nodes_explored
            if sol_b.status != MilpStatus.OPTIMAL:
                raise NumericalError(f"cardinality stage at k={k} returned "
                                     f"{sol_b.status.value}")
            point = _point_from_milp(dataset, model, sol_b)
            logger.debug("level k=%d: point (%.6g, %d)", k, point.z1, point.z2)
            if found and point.z1 <= found[-1].z1 + DEDUP_TOL:
                found[-1] = point  # same bias, fewer predictors: replace
            else:
                found.append(point)
            k = point.z2 - 1
    except NodeLimitError as exc:
        raise FrontierIncompleteError(
            f"frontier enumeration aborted: {exc}",
            partial=_finish(found, complete=False)) from exc
    return _finish(found, complete=True)


def brute_force_frontier(dataset: Dataset, *,
                         include_trivial: bool = True) -> Frontier:
    """All-subsets oracle: LAD-fit every nonempty support, keep the best
    bias per cardinality, then apply the dominance filter.

    Guarded to p <= 12 (the subset count doubles per predictor).
    """
    if dataset.p > ORACLE_MAX_P:
        raise GuardError(
            f"exhaustive enumeration is limited to p <= {ORACLE_MAX_P}, "
            f"got p = {dataset.p}")
    start = time.perf_counter()
    stats = FrontierStats()
    p = dataset.p
    per_level: list[tuple[float, np.ndarray, tuple[int, ...]]] = []
    for k in range(1, p + 1):
        best_z1 = np.inf
        best: tuple[np.ndarray, tuple[int, ...]] | None = None
        for combo in itertools.combinations(range(p), k):
            beta, z1 = lad_fit(dataset, combo)
            stats.subproblems += 1
            if z1 < best_z1:
                best_z1 = z1
                best = (beta, combo)
        per_level.append((best_z1, best[0], best[1]))

    points: list[FrontierPoint] = []
    if include_trivial:
        points.append(_trivial_point(dataset))
    best_so_far = float(np.sum(np.abs(dataset.y)))
    for k, (z1, beta, combo) in enumerate(per_level, start=1):
        if z1 < best_so_far - DEDUP_TOL:
            active = np.zeros(p, dtype=bool)
            active[list(combo)] = True
            points.append(FrontierPoint(z1=z1, z2=k, beta=beta, active=active))
            best_so_far = z1
    stats.wall_time = time.perf_counter() - start
    return Frontier(points=points, stats=stats, complete=True)


# ---------------------------------------------------------------------------
# Supportedness classification: a nondominated point is supported exactly
# when it lies on the lower-left convex hull of the frontier in (z1, z2)
# space, and extreme supported when it is a vertex of that hull.
# ---------------------------------------------------------------------------

def _lower_hull_vertices(coords: list[tuple[float, float]]) -> list[int]:
    """Indices of the strict lower-hull vertices, input sorted by x ascending."""
    hull: list[int] = []
    for i, (x2, y2) in enumerate(coords):
        while len(hull) >= 2:
            x0, y0 = coords[hull[-2]]
            x1, y1 = coords[hull[-1]]
            cross = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
            scale = max(1.0, abs((x1 - x0) * (y2 - y0)), abs((x2 - x0) * (y1 - y0)))
            if cross <= 1e-12 * scale:  # straight or upward turn: not a vertex
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def classify_points(frontier: Frontier) -> Frontier:
    """Return a copy of the frontier with every point classified.

    The zero-predictor point keeps its Trivial tag but still shapes the
    hull; frontier endpoints are always extreme supported.
    """
    pts = frontier.points
    if not pts:
        raise InputError("cannot classify an empty frontier")
    # Ascending z1 equals descending z2 on a valid frontier.
    order = sorted(range(len(pts)), key=lambda i: (pts[i].z1, -pts[i].z2))
    coords = [(pts[i].z1, float(pts[i].z2)) for i in order]
    hull_pos = _lower_hull_vertices(coords)
    hull_ids = {order[j] for j in hull_pos}
    # Hull vertices sorted by descending z2 for interpolation at a given z2.
    hull_pts = sorted(((coords[j][1], coords[j][0]) for j in hull_pos))

    def _hull_z1(z2: float) -> float:
        if len(hull_pts) == 1:
            return hull_pts[0][1]
        lo = 0
        while lo + 2 < len(hull_pts) and hull_pts[lo + 1][0] <= z2:
            lo += 1
        (za, va), (zb, vb) = hull_pts[lo], hull_pts[lo + 1]
        if zb == za:
            return min(va, vb)
        w = (z2 - za) / (zb - za)
        return va + w * (vb - va)

    classified = []
    for i, pt in enumerate(pts):
        if pt.z2 == 0:
            cls = PointClass.TRIVIAL
        elif i in hull_ids:
            cls = PointClass.EXTREME_SUPPORTED
        else:
            gap = pt.z1 - _hull_z1(float(pt.z2))
            on_hull = gap <= 1e-6 * (1.0 + abs(pt.z1))
            cls = (PointClass.NONEXTREME_SUPPORTED if on_hull
                   else PointClass.UNSUPPORTED)
        classified.append(replace(pt, classification=cls))
    return Frontier(points=classified, stats=frontier.stats,
                    complete=frontier.complete)


def select_ideal(frontier: Frontier, *, normalized: bool = False) -> FrontierPoint:
    """Pick the nondominated point closest to the imaginary ideal point.

    The ideal point combines the best bias over the frontier with the best
    predictor count over the frontier as given (so with the trivial point
    present its cardinality coordinate is 0).  The zero-predictor point
    itself is never selected: a model with no predictors is not a
    regression model.  Ties break toward the smaller model.
    """
    pts = frontier.points
    candidates = [pt for pt in pts if pt.z2 >= 1]
    if not candidates:
        raise InputError("frontier has no point with at least one predictor")
    t1 = min(pt.z1 for pt in pts)
    b2 = min(pt.z2 for pt in pts)
    span1 = max(pt.z1 for pt in pts) - t1
    span2 = max(pt.z2 for pt in pts) - b2
    s1 = span1 if normalized and span1 > 0 else 1.0
    s2 = float(span2) if normalized and span2 > 0 else 1.0

    best = None
    best_dist = np.inf
    for pt in sorted(candidates, key=lambda q: q.z2):
        dist = math.hypot((pt.z1 - t1) / s1, (pt.z2 - b2) / s2)
        if dist < best_dist:
            best, best_dist = pt, dist
    return best


def ideal_point(frontier: Frontier) -> tuple[float, float]:
    """The (bias, count) ideal point used by :func:`select_ideal`."""
    pts = frontier.points
    if not pts:
        raise InputError("empty frontier")
    return min(pt.z1 for pt in pts), float(min(pt.z2 for pt in pts))


# ---------------------------------------------------------------------------
# Single-objective reductions (the baselines whose defects motivate the
# bi-objective treatment).
# ---------------------------------------------------------------------------

def weighted_sum_baseline(dataset: Dataset, bounds: BoundsVector, weight: float,
                          *, node_limit: int = DEFAULT_NODE_LIMIT,
                          exclude_trivial: bool = True) -> FrontierPoint:
    """Minimize bias + weight * count in one MILP.

    Whatever the weight, the result is a supported nondominated point;
    unsupported points are unreachable this way.
    """
    if not weight > 0:
        raise InputError("the weight must be positive")
    model = build_bomilp(dataset, bounds, exclude_trivial=exclude_trivial)
    sol = solve_milp(model.subproblem(model.z1 + weight * model.z2), node_limit)
    if sol.status != MilpStatus.OPTIMAL:
        raise NumericalError(f"weighted-sum solve returned {sol.status.value}")
    return _point_from_milp(dataset, model, sol)


def goal_programming_baseline(dataset: Dataset, bounds: BoundsVector, k: int, *,
                              lexicographic: bool = False,
                              node_limit: int = DEFAULT_NODE_LIMIT) -> FrontierPoint:
    """Minimize bias subject to at most k predictors.

    Without the lexicographic refinement the returned point is whatever the
    single MILP produces and may be weakly dominated (it can report unused
    predictors); with it, a second stage shrinks the model and the result
    is guaranteed nondominated.
    """
    if not 1 <= k <= dataset.p:
        raise InputError(f"k must be within 1..{dataset.p}")
    model = build_bomilp(dataset, bounds, exclude_trivial=True)
    sol = solve_milp(model.subproblem(model.z1, cardinality_cap=k), node_limit)
    if sol.status != MilpStatus.OPTIMAL:
        raise NumericalError(f"goal-programming solve returned {sol.status.value}")
    if lexicographic:
        refined = model.subproblem(model.z2, cardinality_cap=k,
                                   bias_cap=sol.objective_value + LEX_EPS)
        sol = solve_milp(refined, node_limit)
        if sol.status != MilpStatus.OPTIMAL:
            raise NumericalError(
                f"lexicographic refinement returned {sol.status.value}")
    return _point_from_milp(dataset, model, sol)


# ---------------------------------------------------------------------------
# Frontier file formats: JSON for full fidelity, CSV (z1, z2, class) for
# plotting.  Wall time is a measurement, not data, so it never enters the
# files and loads back as zero.
# ---------------------------------------------------------------------------

def point_to_dict(point: FrontierPoint) -> dict:
    return {
        "z1": float(point.z1),
        "z2": int(point.z2),
        "beta": [float(v) for v in point.beta],
        "active": [bool(v) for v in point.active],
        "class": point.classification.value if point.classification else None,
    }


def _point_from_dict(payload: dict) -> FrontierPoint:
    cls = payload.get("class")
    return FrontierPoint(
        z1=float(payload["z1"]), z2=int(payload["z2"]),
        beta=np.asarray(payload["beta"], dtype=float),
        active=np.asarray(payload["active"], dtype=bool),
        classification=PointClass(cls) if cls else None)


def save_frontier(frontier: Frontier, path) -> None:
    payload = {
        "points": [point_to_dict(pt) for pt in frontier.points],
        "stats": {"subproblems": frontier.stats.subproblems,
                  "nodes": frontier.stats.nodes,
                  "complete": frontier.complete},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_frontier(path) -> Frontier:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    try:
        points = [_point_from_dict(item) for item in payload["points"]]
        stats_payload = payload.get("stats", {})
        stats = FrontierStats(subproblems=int(stats_payload.get("subproblems", 0)),
                              nodes=int(stats_payload.get("nodes", 0)))
        complete = bool(stats_payload.get("complete", True))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed frontier file: {exc}") from None
    return Frontier(points=points, stats=stats, complete=complete)


def save_frontier_csv(frontier: Frontier, path) -> None:
    with open(path, "w") as fh:
        fh.write("z1,z2,class\n")
        for pt in frontier.points:
            cls = pt.classification.value if pt.classification else ""
            fh.write(f"{pt.z1!r},{pt.z2},{cls}\n")
