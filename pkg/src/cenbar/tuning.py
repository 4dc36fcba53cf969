"""Penalty grids and K-fold cross-validation for the broken-ridge fits.

Both tuning parameters (the initializer ridge xi and the selection
penalty lambda) share one log-equispaced grid running from 1e-4 up to
b = max_j (x_j' y)^2 / 4, the smallest value that zeroes every
coordinate of the one-step update from the least-squares start. The
full Cartesian product is scored by K-fold cross-validation.

The synthetic response is computed once on the full sample by default;
recomputing it inside each training fold is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bar import BarConfig, SolveError, _bar_iterate
from .km import SurvivalDataset, fit_censoring_survivor
from .synthetic import (
    StandardizedDesign,
    SyntheticResponse,
    _synthetic_values,
    standardize,
)

__all__ = [
    "DegenerateGridError",
    "TuningGrid",
    "CvResult",
    "make_grid",
    "kfold_split",
    "cross_validate",
]

GRID_POINTS = 10
GRID_LOWER = 1e-4


class DegenerateGridError(ValueError):
    """The data-driven grid upper end does not exceed the lower end."""


@dataclass
class TuningGrid:
    xi_values: np.ndarray
    lambda_values: np.ndarray
    lower: float
    upper: float

    def __post_init__(self):
        self.xi_values = np.asarray(self.xi_values, dtype=float)
        self.lambda_values = np.asarray(self.lambda_values, dtype=float)
        for vals in (self.xi_values, self.lambda_values):
            if vals.ndim != 1 or vals.size == 0:
                raise ValueError("grid values must form a nonempty vector")
            if np.any(vals <= 0):
                raise ValueError("grid values must be positive")
            if vals.size > 1 and np.any(np.diff(vals) <= 0):
                raise ValueError("grid values must be strictly increasing")
        if not 0 < self.lower < self.upper:
            raise ValueError("grid needs 0 < lower < upper")


@dataclass
class CvResult:
    """Cross-validation surface and the selected cell.

    errors[i, j] is the mean held-out squared error at
    (xi_values[i], lambda_values[j]); failed cells hold +inf.
    """

    errors: np.ndarray
    best_xi: float
    best_lambda: float
    folds: list
    seed: int

    @property
    def best_error(self) -> float:
        return float(np.min(self.errors))


def make_grid(design: StandardizedDesign, ystar: SyntheticResponse) -> TuningGrid:
    """Shared log-spaced grid for xi and lambda from the scored data."""
    if ystar.n != design.n:
        raise ValueError("design and response have different lengths")
    scores = design.matrix.T @ ystar.centered()
    upper = float(np.max(scores**2) / 4.0) if scores.size else 0.0
    if upper <= GRID_LOWER:
        raise DegenerateGridError(
            f"grid upper end {upper:.3g} does not exceed the lower end {GRID_LOWER:.3g}"
        )
    values = np.geomspace(GRID_LOWER, upper, GRID_POINTS)
    return TuningGrid(
        xi_values=values, lambda_values=values.copy(), lower=GRID_LOWER, upper=upper
    )


def kfold_split(n: int, k: int, seed: int) -> list:
    """Seeded partition of range(n) into k folds with sizes differing by
    at most one (earlier folds take the extras)."""
    if k < 2:
        raise ValueError("need at least two folds")
    if k > n:
        raise ValueError("more folds than observations")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return [np.sort(part) for part in np.array_split(perm, k)]


@dataclass
class _FoldProblem:
    """Everything one fold contributes: a re-standardized training system
    and raw held-out rows on the outer scale."""

    gram: np.ndarray
    xty: np.ndarray
    col_means: np.ndarray
    col_norms: np.ndarray
    y_center: float
    test_x: np.ndarray
    test_y: np.ndarray


def _fold_problems(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    folds: list,
    per_fold_transform: bool = False,
    data: SurvivalDataset | None = None,
) -> list:
    if per_fold_transform and data is None:
        raise ValueError("per-fold transform needs the survival data")
    n = design.n
    everything = np.arange(n)
    problems = []
    for test_idx in folds:
        train_idx = np.setdiff1d(everything, test_idx, assume_unique=True)
        train = standardize(design.matrix[train_idx])
        if per_fold_transform:
            sub = SurvivalDataset(
                times=data.times[train_idx],
                events=data.events[train_idx],
                covariates=np.empty((train_idx.size, 0)),
            )
            survivor = fit_censoring_survivor(sub)
            upper = float(np.max(sub.times))
            y_train = _synthetic_values(sub.times, survivor, upper)
            y_test = _synthetic_values(data.times[test_idx], survivor, upper)
        else:
            y_train = ystar.values[train_idx]
            y_test = ystar.values[test_idx]
        center = float(np.mean(y_train))
        yc = y_train - center
        problems.append(
            _FoldProblem(
                gram=train.matrix.T @ train.matrix,
                xty=train.matrix.T @ yc,
                col_means=train.col_means,
                col_norms=train.col_norms,
                y_center=center,
                test_x=design.matrix[test_idx],
                test_y=y_test,
            )
        )
    return problems


def _holdout_error(problem: _FoldProblem, beta_std: np.ndarray) -> float:
    beta = beta_std / problem.col_norms
    intercept = problem.y_center - beta @ problem.col_means
    pred = problem.test_x @ beta + intercept
    return float(np.mean((problem.test_y - pred) ** 2))


def _select_best(errors: np.ndarray, xi_values: np.ndarray, lambda_values: np.ndarray):
    """Smallest error; ties prefer larger lambda, then larger xi."""
    finite = np.isfinite(errors)
    if not finite.any():
        raise SolveError("every grid cell failed during cross-validation")
    best = np.min(errors[finite])
    rows, cols = np.nonzero(errors == best)
    order = np.lexsort((xi_values[rows], lambda_values[cols]))
    pick = order[-1]
    return float(xi_values[rows[pick]]), float(lambda_values[cols[pick]])


def cross_validate(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    grid: TuningGrid,
    k: int = 5,
    seed: int = 0,
    per_fold_transform: bool = False,
    data: SurvivalDataset | None = None,
) -> CvResult:
    """Score the full (xi, lambda) grid by K-fold cross-validation.

    Each training fold is re-standardized and its response re-centered;
    coefficients are mapped back before evaluating held-out squared
    error against the raw synthetic response. A failed fit marks its
    cell +inf instead of aborting the grid.
    """
    if ystar.n != design.n:
        raise ValueError("design and response have different lengths")
    folds = kfold_split(design.n, k, seed)
    problems = _fold_problems(design, ystar, folds, per_fold_transform, data)

    n_xi = grid.xi_values.size
    n_lam = grid.lambda_values.size
    errors = np.full((n_xi, n_lam), np.inf)
    for i, xi in enumerate(grid.xi_values):
        for j, lam in enumerate(grid.lambda_values):
            config = BarConfig(xi=float(xi), lam=float(lam))
            total = 0.0
            failed = False
            for problem in problems:
                try:
                    beta_std, _, _, _ = _bar_iterate(problem.gram, problem.xty, config)
                except SolveError:
                    failed = True
                    break
                total += _holdout_error(problem, beta_std)
            if not failed:
                errors[i, j] = total / len(problems)

    best_xi, best_lambda = _select_best(errors, grid.xi_values, grid.lambda_values)
    return CvResult(
        errors=errors, best_xi=best_xi, best_lambda=best_lambda, folds=folds, seed=seed
    )
