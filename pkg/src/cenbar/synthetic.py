"""Synthetic responses for censored regression, and design standardization.

Each observed pair (T_i, delta_i) is mapped to a synthetic response

    Y*_i = integral over s up to max(T) of
           ( 1{T_i >= s} / Shat_C(s-) - 1{s < 0} ) ds,

where Shat_C is the product-limit estimate of the censoring survivor
function. Y*_i has the same conditional mean as the uncensored response,
so least-squares machinery applies unchanged. With no censoring the
transform returns the observed times exactly.

The integrand is piecewise constant, so the integral is computed exactly
over the breakpoint grid formed by the distinct observed times, zero, and
the survivor's own jump points. Intervals are accumulated left to right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .km import StepSurvivor, SurvivalDataset

__all__ = [
    "SyntheticResponse",
    "StandardizedDesign",
    "ZeroSurvivorError",
    "ConstantColumnError",
    "leurgans_transform",
    "standardize",
    "destandardize_coefficients",
]


class ZeroSurvivorError(ValueError):
    """The censoring survivor's left limit is 0 on a nonempty interval."""


class ConstantColumnError(ValueError):
    """A design column is constant after centering."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} is constant; cannot standardize")


@dataclass
class SyntheticResponse:
    """Synthetic responses Y* plus their mean.

    values holds the raw transform output; ``centered()`` subtracts the
    stored mean, which is how the fitting routines consume it.
    """

    values: np.ndarray
    center: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("synthetic responses must be finite")
        self.center = float(self.center)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def centered(self) -> np.ndarray:
        return self.values - self.center


@dataclass
class StandardizedDesign:
    """Column-standardized design: each column mean 0 and unit L2 norm."""

    matrix: np.ndarray
    col_means: np.ndarray
    col_norms: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.col_means = np.asarray(self.col_means, dtype=float)
        self.col_norms = np.asarray(self.col_norms, dtype=float)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        p = self.matrix.shape[1]
        if self.col_means.shape != (p,) or self.col_norms.shape != (p,):
            raise ValueError("col_means and col_norms must have length p")
        if np.any(self.col_norms <= 0):
            raise ValueError("col_norms must be positive")
        if self.matrix.size:
            norms = np.linalg.norm(self.matrix, axis=0)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise ValueError("matrix columns must have unit norm")
            if np.any(np.abs(self.matrix.mean(axis=0)) > 1e-6):
                raise ValueError("matrix columns must be centered")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    def select_columns(self, idx) -> "StandardizedDesign":
        """Design restricted to the given columns (order preserved)."""
        idx = np.asarray(idx, dtype=int)
        return StandardizedDesign(
            matrix=self.matrix[:, idx],
            col_means=self.col_means[idx],
            col_norms=self.col_norms[idx],
        )


def _synthetic_values(times: np.ndarray, survivor: StepSurvivor, upper: float) -> np.ndarray:
    """Exact piecewise-constant integration of the transform integrand."""
    pts = np.concatenate((times, [0.0, upper], survivor.breakpoints))
    full = np.unique(pts)
    # The indicator correction integrates over every s < 0 whether or not
    # the survivor term is cut off before 0; otherwise a sample whose
    # largest observation is negative would lose the (upper, 0] stretch
    # and the no-censoring identity would fail.
    negative_mass = -float(full[0]) if full[0] < 0.0 else 0.0
    grid = full[full <= upper]
    if grid.size < 2:
        return np.full(times.shape, -negative_mass)

    lefts = grid[:-1]
    rights = grid[1:]
    widths = rights - lefts
    surv = survivor.value_at(lefts)
    if np.any(surv == 0.0):
        raise ZeroSurvivorError(
            "censoring survivor vanishes on a nonempty integration interval; "
            "synthetic response is undefined"
        )
    # 1{T_i >= s} on (a, b] equals 1{T_i >= b}; it selects a prefix of the
    # interval list, so one cumulative sum serves every observation.
    cumulative = np.cumsum(widths / surv)
    pos = np.searchsorted(rights, times, side="right")
    out = np.where(pos > 0, cumulative[pos - 1], 0.0)
    return out - negative_mass


def leurgans_transform(
    data: SurvivalDataset,
    survivor: StepSurvivor,
    upper: float | None = None,
) -> SyntheticResponse:
    """Map right-censored observations to synthetic responses.

    Parameters
    ----------
    data : SurvivalDataset
        Observations to transform.
    survivor : StepSurvivor
        Censoring survivor estimate, normally fitted on the same data.
    upper : float, optional
        Integration upper limit. Defaults to ``max(data.times)``. Pass the
        fitting sample's maximum when transforming held-out rows.

    Raises
    ------
    ZeroSurvivorError
        If the survivor's left limit is 0 somewhere inside the
        integration range, which can happen only when ``survivor`` was
        fitted on a different sample.
    """
    if upper is None:
        upper = float(np.max(data.times))
    values = _synthetic_values(data.times, survivor, float(upper))
    return SyntheticResponse(values=values, center=float(np.mean(values)))


def standardize(x: np.ndarray) -> StandardizedDesign:
    """Center each column to mean 0 and scale it to unit L2 norm."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("design must be an (n, p) matrix")
    if not np.all(np.isfinite(x)):
        raise ValueError("design must be finite")
    means = x.mean(axis=0)
    centered = x - means
    norms = np.linalg.norm(centered, axis=0)
    bad = np.flatnonzero(norms <= 1e-12)
    if bad.size:
        raise ConstantColumnError(int(bad[0]))
    return StandardizedDesign(matrix=centered / norms, col_means=means, col_norms=norms)


def destandardize_coefficients(
    beta_std: np.ndarray,
    design: StandardizedDesign,
    response_center: float,
) -> tuple[np.ndarray, float]:
    """Map coefficients on the standardized scale back to the input scale.

    Returns (beta_orig, intercept) such that for a raw row x,
    x @ beta_orig + intercept reproduces the standardized-scale fit on
    the centered response.
    """
    beta_std = np.asarray(beta_std, dtype=float)
    if beta_std.shape != (design.p,):
        raise ValueError("coefficient length does not match design")
    beta_orig = beta_std / design.col_norms
    intercept = float(response_center - beta_orig @ design.col_means)
    return beta_orig, intercept
