"""Finite-sum objectives with per-component gradient access.

The central object is :class:`FiniteSumProblem`: an average of N component
functions whose values and gradients can be evaluated one component at a
time. Built-in least-squares and logistic test problems come with analytic
gradients, and small delimited-text datasets can be loaded from disk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sampling import Batch


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed; the message names the line."""


@dataclass(frozen=True)
class FiniteSumProblem:
    """Objective F(x) = (1/N) * sum_i f_i(x) with per-component evaluators.

    Evaluators must be pure functions of ``(i, x)``: the same arguments yield
    bit-identical results. Instances are immutable and safe to share across
    threads.
    """

    dim: int
    n_components: int
    component_value: Callable[[int, np.ndarray], float]
    component_gradient: Callable[[int, np.ndarray], np.ndarray]
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("problem dimension must be at least 1")
        if self.n_components < 1:
            raise ValueError("problem needs at least one component")


@dataclass(frozen=True)
class Iterate:
    """Current point and iteration counter of an optimization run."""

    x: np.ndarray
    k: int


@dataclass(frozen=True)
class GradientStats:
    """Full gradient plus the population spread of the component gradients."""

    full_gradient: np.ndarray
    component_variance: float


def _as_point(problem: FiniteSumProblem, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (problem.dim,):
        raise ValueError(
            f"point has shape {arr.shape}, problem dimension is {problem.dim}"
        )
    return arr


def full_gradient(problem: FiniteSumProblem, x) -> np.ndarray:
    """Average of all component gradients, summed in ascending index order."""
    x = _as_point(problem, x)
    acc = np.zeros(problem.dim)
    for i in range(problem.n_components):
        acc += problem.component_gradient(i, x)
    return acc / problem.n_components


def batch_gradient(problem: FiniteSumProblem, x, batch: Batch) -> np.ndarray:
    """Average gradient over a batch; repeated indices count with multiplicity."""
    x = _as_point(problem, x)
    if batch.indices[-1] >= problem.n_components:
        raise ValueError(
            f"batch index {batch.indices[-1]} out of range for "
            f"{problem.n_components} components"
        )
    acc = np.zeros(problem.dim)
    for i in batch.indices:
        acc += problem.component_gradient(i, x)
    return acc / batch.size


def gradient_stats(problem: FiniteSumProblem, x) -> GradientStats:
    """Full gradient and component-gradient variance from one evaluation pass.

    The variance is the population mean of the squared deviations (divisor N,
    not N-1).
    """
    x = _as_point(problem, x)
    grads = [problem.component_gradient(i, x) for i in range(problem.n_components)]
    acc = np.zeros(problem.dim)
    for g in grads:
        acc += g
    mean = acc / problem.n_components
    spread = 0.0
    for g in grads:
        dev = g - mean
        spread += float(dev @ dev)
    return GradientStats(mean, spread / problem.n_components)


def component_gradient_variance(problem: FiniteSumProblem, x) -> float:
    """Population variance of the component gradients at ``x`` (divisor N)."""
    return gradient_stats(problem, x).component_variance


def gradient_matrix(problem: FiniteSumProblem, x) -> np.ndarray:
    """All component gradients stacked row-wise; used by enumeration oracles."""
    x = _as_point(problem, x)
    return np.stack(
        [
            np.asarray(problem.component_gradient(i, x), dtype=float)
            for i in range(problem.n_components)
        ]
    )


def objective_value(problem: FiniteSumProblem, x) -> float:
    """F(x): the mean of the component values, ascending index order."""
    x = _as_point(problem, x)
    total = 0.0
    for i in range(problem.n_components):
        total += float(problem.component_value(i, x))
    return total / problem.n_components


def make_least_squares(matrix, targets) -> FiniteSumProblem:
    """Problem with components f_i(x) = 0.5 * (a_i @ x - b_i)**2.

    ``matrix`` is N x d (one row per component), ``targets`` length N. The
    analytic component gradient is a_i * (a_i @ x - b_i).
    """
    A = np.array(matrix, dtype=float)
    b = np.array(targets, dtype=float)
    if A.ndim != 2:
        raise ValueError("matrix must be two-dimensional (N rows, d columns)")
    n, d = A.shape
    if n < 1 or d < 1:
        raise ValueError("matrix needs at least one row and one column")
    if b.shape != (n,):
        raise ValueError(
            f"targets have shape {b.shape}, expected ({n},) to match the matrix"
        )

    def value(i: int, x: np.ndarray) -> float:
        residual = float(A[i] @ x) - b[i]
        return 0.5 * residual * residual

    def gradient(i: int, x: np.ndarray) -> np.ndarray:
        return A[i] * (float(A[i] @ x) - b[i])

    return FiniteSumProblem(d, n, value, gradient, label=f"least-squares(N={n}, d={d})")


def make_logistic(matrix, labels) -> FiniteSumProblem:
    """Problem with components f_i(x) = log(1 + exp(-y_i * a_i @ x)).

    Labels must be -1 or +1. Value and gradient use the numerically stable
    branches for large positive/negative margins.
    """
    A = np.array(matrix, dtype=float)
    y = np.array(labels, dtype=float)
    if A.ndim != 2:
        raise ValueError("matrix must be two-dimensional (N rows, d columns)")
    n, d = A.shape
    if y.shape != (n,):
        raise ValueError(
            f"labels have shape {y.shape}, expected ({n},) to match the matrix"
        )
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("logistic labels must all be -1 or +1")

    def value(i: int, x: np.ndarray) -> float:
        margin = float(y[i] * (A[i] @ x))
        if margin > 0:
            return math.log1p(math.exp(-margin))
        return -margin + math.log1p(math.exp(margin))

    def gradient(i: int, x: np.ndarray) -> np.ndarray:
        margin = float(y[i] * (A[i] @ x))
        if margin > 0:
            e = math.exp(-margin)
            slope = e / (1.0 + e)
        else:
            slope = 1.0 / (1.0 + math.exp(margin))
        return (-y[i] * slope) * A[i]

    return FiniteSumProblem(d, n, value, gradient, label=f"logistic(N={n}, d={d})")


def load_dataset(path, delimiter: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Read a delimited numeric text file into (matrix, labels).

    One row per component; the label/target sits in the last column. Fields
    are separated by commas or whitespace (``delimiter`` is ``"comma"``,
    ``"whitespace"``, or ``"auto"`` to decide from the first data line).
    Blank lines and lines starting with ``#`` are skipped. Parse problems
    raise :class:`DatasetFormatError` naming the offending line.
    """
    if delimiter not in ("auto", "comma", "whitespace"):
        raise ValueError(f"unknown delimiter mode {delimiter!r}")
    rows: list[list[float]] = []
    width = None
    mode = delimiter
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if mode == "auto":
                mode = "comma" if "," in line else "whitespace"
            parts = line.split(",") if mode == "comma" else line.split()
            try:
                values = [float(part) for part in parts]
            except ValueError:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: could not parse {line!r} as numbers"
                ) from None
            if width is None:
                width = len(values)
                if width < 2:
                    raise DatasetFormatError(
                        f"{path}: line {lineno}: need at least one feature column "
                        "plus a label column"
                    )
            elif len(values) != width:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise DatasetFormatError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return data[:, :-1], data[:, -1]
