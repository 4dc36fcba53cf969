"""Kaplan-Meier estimation of the censoring distribution.

The synthetic-response transform needs the survivor function of the
censoring time C, estimated from (T_i, delta_i) with the roles of
failure and censoring swapped: jumps occur at censored times only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SurvivalDataset",
    "StepSurvivor",
    "fit_censoring_survivor",
    "survivor_left",
]


@dataclass
class SurvivalDataset:
    """Right-censored sample: times T, event indicators delta, covariates x.

    times : (n,) float array, finite, any sign (log-scale responses).
    events : (n,) int array, 1 = failure observed, 0 = censored.
    covariates : (n, p) float array, finite. p = 0 is allowed for
        transform-only workflows.
    """

    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.events = np.asarray(self.events)
        self.covariates = np.asarray(self.covariates, dtype=float)
        if self.times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        n = self.times.shape[0]
        if n < 2:
            raise ValueError("need at least two observations")
        if self.events.shape != (n,):
            raise ValueError("events length does not match times")
        if self.covariates.ndim != 2 or self.covariates.shape[0] != n:
            raise ValueError("covariates must be an (n, p) matrix")
        if not np.all(np.isfinite(self.times)):
            raise ValueError("times must be finite")
        if not np.all(np.isfinite(self.covariates)):
            raise ValueError("covariates must be finite")
        ev = np.unique(self.events)
        if not np.all(np.isin(ev, (0, 1))):
            raise ValueError("events must contain only 0 and 1")
        self.events = self.events.astype(np.int64)

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]


@dataclass
class StepSurvivor:
    """Right-continuous piecewise-constant survivor function.

    Equal to ``left_value`` (always 1) strictly left of the first
    breakpoint; ``values[k]`` on ``[breakpoints[k], breakpoints[k+1])``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    left_value: float = field(default=1.0)

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.breakpoints.ndim != 1 or self.values.shape != self.breakpoints.shape:
            raise ValueError("breakpoints and values must be equal-length vectors")
        if self.breakpoints.size and np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("survivor values must lie in [0, 1]")
        if self.breakpoints.size and np.any(np.diff(self.values) > 0):
            raise ValueError("survivor values must be non-increasing")
        if self.left_value != 1.0:
            raise ValueError("left_value must be 1")

    def value_at(self, s):
        """Right-continuous evaluation S(s), scalar or array."""
        idx = np.searchsorted(self.breakpoints, s, side="right")
        padded = np.concatenate(([self.left_value], self.values))
        out = padded[idx]
        if np.isscalar(s):
            return float(out)
        return out


def fit_censoring_survivor(data: SurvivalDataset) -> StepSurvivor:
    """Product-limit estimate of P(C > t) from right-censored data.

    Censored observations (delta = 0) are the events of the estimated
    distribution. At tied times, failures leave the risk set before
    censorings, so the factor for a censored time t uses risk set
    #{T_i >= t} minus the failures at t.
    """
    order = np.argsort(data.times, kind="stable")
    ts = data.times[order]
    ev = data.events[order]
    n = ts.shape[0]

    uniq, first = np.unique(ts, return_index=True)
    cens_counts = np.add.reduceat(1 - ev, first)
    fail_counts = np.add.reduceat(ev, first)
    risk = n - first  # #{T_i >= t_k} since ts is sorted

    has_jump = cens_counts > 0
    denom = risk[has_jump] - fail_counts[has_jump]
    factors = 1.0 - cens_counts[has_jump] / denom
    values = np.cumprod(factors)
    return StepSurvivor(breakpoints=uniq[has_jump], values=values)


def survivor_left(step: StepSurvivor, s):
    """Left limit S(s-): the survivor value immediately left of s.

    Accepts a scalar or an array of evaluation points.
    """
    idx = np.searchsorted(step.breakpoints, s, side="left")
    padded = np.concatenate(([step.left_value], step.values))
    out = padded[idx]
    if np.isscalar(s):
        return float(out)
    return out
