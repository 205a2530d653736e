"""Exact bi-objective best-subset selection for LAD regression.

Chooses which predictors enter a linear regression by enumerating the full
trade-off curve between total absolute bias and model size as a bi-objective
mixed-integer program, instead of collapsing the two goals into one
objective up front.
"""

__version__ = "0.1.0"

from .branch_bound import MilpProblem, MilpSolution, MilpStatus, solve_milp
from .data import (Dataset, InstanceClass, TrueModel, generate_instance,
                   load_dataset, load_true_model, save_dataset,
                   save_true_model)
from .errors import (DegenerateDesignError, DimensionError,
                     FrontierIncompleteError, GuardError, InputError,
                     IterationLimitError, NodeLimitError, NumericalError,
                     ParetoSubsetError, ParseError, ResourceLimitError)
from .formulation import (BiobjectiveMilp, BoundsVector, build_bomilp,
                          compute_bounds, lad_fit, load_bounds,
                          median_bias_bound, save_bounds)
from .frontier import (Frontier, FrontierPoint, FrontierStats, PointClass,
                       brute_force_frontier, classify_points,
                       goal_programming_baseline, ideal_point, load_frontier,
                       save_frontier, save_frontier_csv, select_ideal,
                       solve_frontier, weighted_sum_baseline)
from .lp_format import lp_text, milp_text, save_lp
from .simplex import (EQ, GE, LE, LinearProgram, LpSolution, LpStatus,
                      SimplexStart, solve_lp, solve_stats)

__all__ = [
    "BiobjectiveMilp", "BoundsVector", "Dataset", "DegenerateDesignError",
    "DimensionError", "EQ", "Frontier", "FrontierIncompleteError",
    "FrontierPoint", "FrontierStats", "GE", "GuardError", "InputError",
    "InstanceClass", "IterationLimitError", "LE", "LinearProgram",
    "LpSolution", "LpStatus", "MilpProblem", "MilpSolution", "MilpStatus",
    "NodeLimitError", "NumericalError", "ParetoSubsetError", "ParseError",
    "PointClass", "ResourceLimitError", "SimplexStart", "TrueModel",
    "brute_force_frontier", "build_bomilp", "classify_points",
    "compute_bounds", "generate_instance", "goal_programming_baseline",
    "ideal_point", "lad_fit", "load_bounds", "load_dataset", "load_frontier",
    "load_true_model", "lp_text", "median_bias_bound", "milp_text",
    "save_bounds", "save_dataset", "save_frontier", "save_frontier_csv",
    "save_lp", "save_true_model", "select_ideal", "solve_frontier",
    "solve_lp", "solve_milp", "solve_stats", "weighted_sum_baseline",
]
