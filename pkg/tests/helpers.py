"""Shared constructors and brute-force oracles used across the tests."""

import numpy as np

from cenbar import (
    StandardizedDesign,
    SurvivalDataset,
    SyntheticResponse,
    survivor_left,
)


def dataset(times, events, covariates=None):
    times = np.asarray(times, dtype=float)
    events = np.asarray(events, dtype=np.int64)
    if covariates is None:
        covariates = np.zeros((times.size, 0))
    return SurvivalDataset(times=times, events=events, covariates=np.asarray(covariates, dtype=float))


def scalar_problem(c: float):
    """One standardized column x with x @ y == c and a centered response."""
    x = np.array([[1.0], [-1.0]]) / np.sqrt(2.0)
    design = StandardizedDesign(matrix=x, col_means=np.zeros(1), col_norms=np.ones(1))
    ystar = SyntheticResponse(values=c * x[:, 0], center=0.0)
    return design, ystar


def design_from(matrix):
    """Center and norm-scale columns, keeping the raw helper independent
    of the package's standardize()."""
    m = np.asarray(matrix, dtype=float)
    centered = m - m.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    return StandardizedDesign(matrix=centered / norms, col_means=m.mean(axis=0), col_norms=norms)


def centered_response(values):
    values = np.asarray(values, dtype=float)
    return SyntheticResponse(values=values - values.mean(), center=0.0)


def km_product_oracle(times, events, s):
    """Brute-force product-limit survivor of the censoring time at s,
    with uncensored observations leaving the risk set first on ties."""
    times = np.asarray(times, dtype=float)
    events = np.asarray(events)
    value = 1.0
    for t in np.unique(times):
        if t > s:
            break
        d_cens = int(np.sum((times == t) & (events == 0)))
        if d_cens == 0:
            continue
        at_risk = int(np.sum(times >= t)) - int(np.sum((times == t) & (events == 1)))
        value *= 1.0 - d_cens / at_risk
    return value


def leurgans_midpoint_oracle(data, survivor):
    """Integrate the synthetic-response integrand segment by segment,
    evaluating the survivor at segment midpoints. The integrand is
    constant between consecutive breakpoints, so this is exact up to
    summation rounding and shares no code with the production path."""
    pts = np.unique(np.concatenate([data.times, [0.0], survivor.breakpoints]))
    out = np.zeros(data.n)
    for i, t in enumerate(data.times):
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (a + b)
            value = 0.0
            if t >= mid:
                value += 1.0 / survivor_left(survivor, mid)
            if mid < 0.0:
                value -= 1.0
            total += (b - a) * value
        out[i] = total
    return out
