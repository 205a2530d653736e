"""Regression data model, synthetic instance generation, and dataset file I/O.

Indices are 0-based throughout the Python API; the on-disk formats use the
conventional 1-based predictor labels (``x2`` is the first non-intercept
column, so column index 1 in the matrix).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError, ParseError

# Predictor values are drawn from the integers in [-PREDICTOR_SPAN, PREDICTOR_SPAN].
PREDICTOR_SPAN = 50


@dataclass(frozen=True, eq=False)
class Dataset:
    """A fixed design matrix plus response vector.

    ``x`` has one row per observation; its first column is identically one
    (the intercept column) and the remaining columns hold predictor values.
    Instances are treated as immutable.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 2 or y.ndim != 1:
            raise DimensionError("x must be a matrix and y a vector")
        if x.shape[0] != y.shape[0]:
            raise DimensionError(
                f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(x)):
            raise InputError("x contains non-finite entries")
        if not np.all(np.isfinite(y)):
            raise InputError("y contains non-finite entries")
        if not np.all(x[:, 0] == 1.0):
            raise InputError("the first column of x must be identically one")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)


@dataclass(frozen=True, eq=False)
class TrueModel:
    """Ground-truth coefficients behind a generated instance.

    ``support`` is exactly the set of 0-based indices with a nonzero
    coefficient.
    """

    beta: np.ndarray
    support: frozenset[int]

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "support", frozenset(self.support))
        actual = frozenset(int(j) for j in np.nonzero(beta)[0])
        if actual != self.support:
            raise InputError("support does not match the nonzero pattern of beta")

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrueModel):
            return NotImplemented
        return np.array_equal(self.beta, other.beta) and self.support == other.support


@dataclass(frozen=True)
class InstanceClass:
    """Label C(p, n) for a family of synthetic instances, plus a seed."""

    p: int
    n: int
    seed: int

    def __post_init__(self):
        if self.p < 2:
            raise DimensionError("instance class needs p >= 2")
        if self.n < 2:
            raise DimensionError("instance class needs n >= 2")

    @property
    def label(self) -> str:
        return f"C({self.p},{self.n})"


def zero_coefficient_count(p: int) -> int:
    """Number of zero entries in a generated coefficient vector.

    Two thirds of the p components are zeroed, rounded up, but at least one
    component (the intercept) is always kept nonzero.
    """
    return min(math.ceil(2 * p / 3), p - 1)


def generate_instance(cls: InstanceClass) -> tuple[Dataset, TrueModel]:
    """Draw one synthetic regression instance of class C(p, n).

    Construction:
      * the intercept column is all ones; every other entry of ``x`` is an
        integer drawn uniformly from [-50, 50];
      * ``zero_coefficient_count(p)`` coefficients are zero, the intercept is
        always nonzero, the remaining nonzero positions are chosen uniformly
        among the predictors, and nonzero values are uniform on (0, 1);
      * y = x @ beta + eps with standard normal noise, then rounded to one
        decimal place.

    The draw order (matrix, support, values, noise) is fixed, so a given
    seed reproduces the same instance run to run.
    """
    rng = np.random.default_rng(cls.seed)
    p, n = cls.p, cls.n

    x = np.ones((n, p))
    x[:, 1:] = rng.integers(-PREDICTOR_SPAN, PREDICTOR_SPAN + 1, size=(n, p - 1))

    zeros = zero_coefficient_count(p)
    nonzeros = p - zeros
    support = [0]
    if nonzeros > 1:
        extra = rng.choice(p - 1, size=nonzeros - 1, replace=False) + 1
        support.extend(int(j) for j in sorted(extra))

    beta = np.zeros(p)
    for j in support:
        value = rng.uniform(0.0, 1.0)
        while value == 0.0:  # measure-zero draw, but the support must be exact
            value = rng.uniform(0.0, 1.0)
        beta[j] = value

    eps = rng.standard_normal(n)
    y = np.round(x @ beta + eps, 1)

    return Dataset(x=x, y=y), TrueModel(beta=beta, support=frozenset(support))


# ---------------------------------------------------------------------------
# Dataset CSV: header "y,x2,...,xp"; the intercept column is never stored.
# ---------------------------------------------------------------------------

def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset as CSV. Floats use shortest round-trip formatting."""
    header = ["y"] + [f"x{j + 1}" for j in range(1, dataset.p)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n):
            row = [repr(float(dataset.y[i]))]
            row.extend(repr(float(v)) for v in dataset.x[i, 1:])
            writer.writerow(row)


def load_dataset(path) -> Dataset:
    """Read a dataset CSV written by :func:`save_dataset`.

    Raises ParseError naming the offending row and column on any malformed
    cell, wrong row length, or unexpected header.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected a header row") from None
        expected = ["y"] + [f"x{j}" for j in range(2, len(header) + 1)]
        if header != expected:
            raise ParseError(
                f"{path}: bad header {header!r}, expected 'y,x2,...,x{len(header)}'")
        width = len(header)
        ys: list[float] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue  # tolerate a trailing blank line
            if len(row) != width:
                raise ParseError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {width}")
            values = []
            for colno, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {lineno}, column {header[colno]!r}: "
                        f"not a number: {cell!r}") from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}: row {lineno}, column {header[colno]!r}: "
                        f"non-finite value {cell!r}")
                values.append(value)
            ys.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise ParseError(f"{path}: no observation rows")
    n = len(rows)
    x = np.ones((n, width))
    x[:, 1:] = np.asarray(rows)
    return Dataset(x=x, y=np.asarray(ys))


# ---------------------------------------------------------------------------
# TrueModel JSON: {"beta": [...], "support": [...]} with 1-based indices.
# ---------------------------------------------------------------------------

def save_true_model(model: TrueModel, path) -> None:
    payload = {
        "beta": [float(v) for v in model.beta],
        "support": sorted(j + 1 for j in model.support),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_true_model(path) -> TrueModel:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    try:
        beta = np.asarray(payload["beta"], dtype=float)
        support = frozenset(int(j) - 1 for j in payload["support"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: expected keys 'beta' and 'support': {exc}") from None
    return TrueModel(beta=beta, support=support)
