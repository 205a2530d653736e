"""Writer for the standard text LP file format.

Produces ASCII files with objective, subject-to, bounds and binary sections,
one constraint per line, variables named x1..xN and rows c1..cM, so the
models built here can be cross-checked with external solvers.
"""

from __future__ import annotations

import numpy as np

from .branch_bound import MilpProblem
from .simplex import RELATION_SYMBOLS, LinearProgram


def _coef(value: float) -> str:
    return f"{value:+.17g}"


def _terms(coeffs: np.ndarray) -> str:
    parts = [f"{_coef(c)} x{j + 1}" for j, c in enumerate(coeffs) if c != 0.0]
    if not parts:
        parts = [f"+0 x1"]
    return " ".join(parts)


def lp_text(lp: LinearProgram, binary_vars=frozenset()) -> str:
    """Render a linear (or mixed binary) program as LP-format text."""
    lines = ["Minimize" if lp.sense == "min" else "Maximize",
             f" obj: {_terms(lp.objective)}",
             "Subject To"]
    for i in range(lp.num_constraints):
        symbol = RELATION_SYMBOLS[int(lp.relations[i])]
        lines.append(f" c{i + 1}: {_terms(lp.a[i])} {symbol} {lp.rhs[i]:.17g}")
    lines.append("Bounds")
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        name = f"x{j + 1}"
        if not np.isfinite(lo) and not np.isfinite(hi):
            lines.append(f" {name} free")
        elif np.isfinite(lo) and np.isfinite(hi):
            if lo == hi:
                lines.append(f" {name} = {lo:.17g}")
            else:
                lines.append(f" {lo:.17g} <= {name} <= {hi:.17g}")
        elif np.isfinite(lo):
            lines.append(f" {name} >= {lo:.17g}")
        else:
            lines.append(f" -infinity <= {name} <= {hi:.17g}")
    if binary_vars:
        lines.append("Binary")
        for j in sorted(binary_vars):
            lines.append(f" x{j + 1}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def milp_text(problem: MilpProblem) -> str:
    return lp_text(problem.lp, problem.binary_vars)


def save_lp(target, path) -> None:
    """Write a LinearProgram or MilpProblem to an LP-format file."""
    if isinstance(target, MilpProblem):
        text = milp_text(target)
    else:
        text = lp_text(target)
    with open(path, "w") as fh:
        fh.write(text)
