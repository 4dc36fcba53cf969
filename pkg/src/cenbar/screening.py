"""Marginal screening for high-dimensional designs, and the two-step fit.

When p is large the design is first reduced to the k columns whose
standardized scores |x_j' y| are largest, then the usual
cross-validated fit runs on the reduced design and the coefficients are
embedded back with exact zeros elsewhere. The screener is pluggable in
principle; the default is plain marginal correlation ranking.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bar import BarConfig, BarFit, bar_fit
from .km import SurvivalDataset, fit_censoring_survivor
from .synthetic import (
    StandardizedDesign,
    SyntheticResponse,
    leurgans_transform,
    standardize,
)
from .tuning import CvResult, DegenerateGridError, TuningGrid, cross_validate, make_grid

__all__ = [
    "ScreenResult",
    "TwoStepResult",
    "default_k",
    "marginal_screen",
    "two_step_pipeline",
    "two_step_fit",
]


@dataclass
class ScreenResult:
    """Screening outcome: kept column indices (ranked by decreasing
    score; original order when nothing is dropped) and all p scores."""

    kept: np.ndarray
    scores: np.ndarray
    k: int


@dataclass
class TwoStepResult:
    fit: BarFit
    screen: ScreenResult
    grid: TuningGrid | None
    cv: CvResult | None


def default_k(n: int) -> int:
    """Screening size ceil(2 log(n) n^(1/4)) with natural log."""
    if n < 2:
        raise ValueError("need n >= 2")
    return math.ceil(2.0 * math.log(n) * n**0.25)


def marginal_screen(design: StandardizedDesign, ystar: SyntheticResponse, k: int) -> ScreenResult:
    """Keep the k columns with the largest |x_j' y| on the standardized
    scale. Ties break toward the lower column index. k >= p keeps every
    column in original order."""
    if ystar.n != design.n:
        raise ValueError("design and response have different lengths")
    if k < 1:
        raise ValueError("k must be at least 1")
    scores = np.abs(design.matrix.T @ ystar.centered())
    if k >= design.p:
        kept = np.arange(design.p)
    else:
        order = np.argsort(-scores, kind="stable")
        kept = order[:k]
    return ScreenResult(kept=kept, scores=scores, k=min(k, design.p))


def _null_fit(design: StandardizedDesign, ystar: SyntheticResponse) -> BarFit:
    return BarFit(
        beta_std=np.zeros(design.p),
        beta_orig=np.zeros(design.p),
        intercept=float(ystar.center),
        support=(),
        iterations=0,
        converged=True,
        fixed_point_residual=0.0,
    )


def _embed(fit: BarFit, kept: np.ndarray, p: int) -> BarFit:
    if kept.size == p and np.array_equal(kept, np.arange(p)):
        return fit
    beta_std = np.zeros(p)
    beta_orig = np.zeros(p)
    beta_std[kept] = fit.beta_std
    beta_orig[kept] = fit.beta_orig
    support = tuple(sorted(int(kept[j]) for j in fit.support))
    return BarFit(
        beta_std=beta_std,
        beta_orig=beta_orig,
        intercept=fit.intercept,
        support=support,
        iterations=fit.iterations,
        converged=fit.converged,
        fixed_point_residual=fit.fixed_point_residual,
    )


def two_step_pipeline(
    data: SurvivalDataset,
    k: int | None = None,
    cv_seed: int = 0,
    cv_folds: int = 5,
) -> TwoStepResult:
    """Screen, tune by cross-validation, fit, and embed.

    k defaults to default_k(n); k >= p makes screening the identity. A
    response orthogonal to every kept column (degenerate tuning grid)
    yields the all-zero fit rather than an error.
    """
    survivor = fit_censoring_survivor(data)
    ystar = leurgans_transform(data, survivor)
    design = standardize(data.covariates)

    k_eff = default_k(data.n) if k is None else int(k)
    if k_eff > data.n:
        warnings.warn(
            f"screening size {k_eff} exceeds the sample size {data.n}",
            UserWarning,
            stacklevel=2,
        )
    screen = marginal_screen(design, ystar, k_eff)
    # skip the column copy when nothing was dropped, so the k >= p case
    # runs the exact same arrays as an unscreened fit
    reduced = design if screen.k == design.p else design.select_columns(screen.kept)

    try:
        grid = make_grid(reduced, ystar)
    except DegenerateGridError:
        return TwoStepResult(fit=_null_fit(design, ystar), screen=screen, grid=None, cv=None)
    cv = cross_validate(reduced, ystar, grid, k=cv_folds, seed=cv_seed)
    fit = bar_fit(reduced, ystar, BarConfig(xi=cv.best_xi, lam=cv.best_lambda))
    return TwoStepResult(fit=_embed(fit, screen.kept, design.p), screen=screen, grid=grid, cv=cv)


def two_step_fit(data: SurvivalDataset, k: int | None = None, cv_seed: int = 0) -> BarFit:
    """Screened, cross-validated fit returning full-length coefficients."""
    return two_step_pipeline(data, k=k, cv_seed=cv_seed).fit
