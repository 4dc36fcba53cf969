"""Penalized comparators fitted by cyclic coordinate descent.

All four penalties (lasso, adaptive lasso, SCAD, MCP) minimize

    (1/2) ||y - X b||^2 + sum_j pen(|b_j|)

on the standardized design, where every coordinate update is a
closed-form thresholding with unit curvature. Coordinates are visited
in fixed order 1..p, cold-started from zero, so results are
deterministic for fixed inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bar import _ridge_solve
from .synthetic import StandardizedDesign, SyntheticResponse
from .tuning import (
    DegenerateGridError,
    _fold_problems,
    _holdout_error,
    _select_best,
    kfold_split,
    make_grid,
)

__all__ = [
    "PENALTY_KINDS",
    "PenaltySpec",
    "ComparatorCvResult",
    "coordinate_descent",
    "kkt_check",
    "adaptive_weights",
    "cross_validate_penalty",
    "penalty_fit",
]

PENALTY_KINDS = ("lasso", "alasso", "scad", "mcp")

COMPARATOR_GRID_POINTS = 10
COMPARATOR_GRID_RATIO = 1e-3

_DEFAULT_GAMMA = {"scad": 3.7, "mcp": 3.0}


@dataclass
class PenaltySpec:
    """Penalty description: kind, level lam, concavity gamma where the
    penalty has one, and per-coordinate weights (adaptive lasso only)."""

    kind: str
    lam: float
    gamma: float | None = None
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.lam < 0 or not np.isfinite(self.lam):
            raise ValueError("lam must be finite and nonnegative")
        if self.kind in _DEFAULT_GAMMA and self.gamma is None:
            self.gamma = _DEFAULT_GAMMA[self.kind]
        if self.kind == "scad" and self.gamma <= 2:
            raise ValueError("scad needs gamma > 2")
        if self.kind == "mcp" and self.gamma <= 1:
            raise ValueError("mcp needs gamma > 1")
        if self.kind in ("lasso", "alasso") and self.gamma is not None:
            raise ValueError(f"{self.kind} takes no gamma")
        if self.weights is not None:
            if self.kind != "alasso":
                raise ValueError("weights apply to the adaptive lasso only")
            self.weights = np.asarray(self.weights, dtype=float)
            if np.any(self.weights <= 0) or not np.all(np.isfinite(self.weights)):
                raise ValueError("weights must be positive and finite")
        if self.kind == "alasso" and self.weights is None:
            raise ValueError("adaptive lasso needs weights")


def _soft(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def _scad_update(z: float, lam: float, gamma: float) -> float:
    az = abs(z)
    if az <= 2.0 * lam:
        return _soft(z, lam)
    if az <= gamma * lam:
        sign = 1.0 if z > 0 else -1.0
        return ((gamma - 1.0) * z - sign * gamma * lam) / (gamma - 2.0)
    return z


def _mcp_update(z: float, lam: float, gamma: float) -> float:
    az = abs(z)
    if az <= gamma * lam:
        return _soft(z, lam) / (1.0 - 1.0 / gamma)
    return z


def _scad_deriv(t: float, lam: float, gamma: float) -> float:
    if t <= lam:
        return lam
    return max(gamma * lam - t, 0.0) / (gamma - 1.0)


def _mcp_deriv(t: float, lam: float, gamma: float) -> float:
    return max(lam - t / gamma, 0.0)


def _thresholds(spec: PenaltySpec, p: int) -> np.ndarray:
    if spec.kind == "alasso":
        if spec.weights.shape != (p,):
            raise ValueError("weights length does not match design")
        return spec.lam * spec.weights
    return np.full(p, spec.lam)


def _cd_gram(
    gram: np.ndarray,
    xty: np.ndarray,
    spec: PenaltySpec,
    tol: float,
    max_sweeps: int,
):
    """Cyclic coordinate descent on a precomputed unit-diagonal Gram
    system. Returns (beta, sweeps, converged)."""
    p = xty.shape[0]
    thresholds = _thresholds(spec, p)
    beta = np.zeros(p)
    q = np.zeros(p)  # gram @ beta, updated incrementally
    kind = spec.kind
    gamma = spec.gamma
    for sweep in range(1, max_sweeps + 1):
        biggest = 0.0
        for j in range(p):
            z = xty[j] - q[j] + beta[j]
            if kind == "scad":
                nb = _scad_update(z, thresholds[j], gamma)
            elif kind == "mcp":
                nb = _mcp_update(z, thresholds[j], gamma)
            else:
                nb = _soft(z, thresholds[j])
            d = nb - beta[j]
            if d != 0.0:
                beta[j] = nb
                q += gram[:, j] * d
                ad = abs(d)
                if ad > biggest:
                    biggest = ad
        if biggest < tol:
            return beta, sweep, True
    return beta, max_sweeps, False


def _kkt_from_gram(gram, xty, spec: PenaltySpec, beta: np.ndarray) -> float:
    """Largest violation of the coordinatewise stationarity conditions."""
    grad = xty - gram @ beta
    thresholds = _thresholds(spec, beta.shape[0])
    worst = 0.0
    for j in range(beta.shape[0]):
        g = float(grad[j])
        b = float(beta[j])
        t = float(thresholds[j])
        if spec.kind == "scad":
            edge = t
            deriv = _scad_deriv(abs(b), t, spec.gamma)
        elif spec.kind == "mcp":
            edge = t
            deriv = _mcp_deriv(abs(b), t, spec.gamma)
        else:
            edge = t
            deriv = t
        if b == 0.0:
            v = max(0.0, abs(g) - edge)
        else:
            v = abs(g - deriv * np.sign(b))
        if v > worst:
            worst = v
    return worst


def coordinate_descent(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    spec: PenaltySpec,
    tol: float = 1e-7,
    max_sweeps: int = 10000,
) -> np.ndarray:
    """Fit one penalized model; returns coefficients on the standardized
    scale with exact zeros. Warns if the sweep cap is hit."""
    if ystar.n != design.n:
        raise ValueError("design and response have different lengths")
    y = ystar.centered()
    gram = design.matrix.T @ design.matrix
    xty = design.matrix.T @ y
    beta, _, converged = _cd_gram(gram, xty, spec, tol, max_sweeps)
    if not converged:
        warnings.warn(
            f"coordinate descent did not converge in {max_sweeps} sweeps",
            RuntimeWarning,
            stacklevel=2,
        )
    return beta


def kkt_check(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    spec: PenaltySpec,
    beta: np.ndarray,
) -> float:
    """Largest stationarity violation of beta for the given penalty."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (design.p,):
        raise ValueError("beta length does not match design")
    y = ystar.centered()
    gram = design.matrix.T @ design.matrix
    xty = design.matrix.T @ y
    return _kkt_from_gram(gram, xty, spec, beta)


def _weights_from_ridge(gram, xty, xi: float) -> np.ndarray:
    init = _ridge_solve(gram, xty, xi)
    return 1.0 / np.maximum(np.abs(init), 1e-12)


def adaptive_weights(design: StandardizedDesign, ystar: SyntheticResponse, xi: float) -> np.ndarray:
    """Default adaptive-lasso weights: reciprocal absolute ridge
    coefficients at penalty xi, floored at 1e-12."""
    if xi < 0 or not np.isfinite(xi):
        raise ValueError("xi must be finite and nonnegative")
    y = ystar.centered()
    gram = design.matrix.T @ design.matrix
    return _weights_from_ridge(gram, design.matrix.T @ y, xi)


@dataclass
class ComparatorCvResult:
    """Cross-validation surface for one comparator.

    errors has shape (len(xi_values) or 1, len(lambda_values)); the xi
    axis is used by the adaptive lasso, whose weights come from a ridge
    initializer tuned on the same grid as the main method.
    """

    kind: str
    lambda_values: np.ndarray
    xi_values: np.ndarray | None
    errors: np.ndarray
    best_lambda: float
    best_xi: float | None
    folds: list
    seed: int
    kkt_max: float | None = None

    @property
    def best_error(self) -> float:
        return float(np.min(self.errors))


def cross_validate_penalty(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    kind: str,
    k: int = 5,
    seed: int = 0,
    gamma: float | None = None,
    tol: float = 1e-9,
    max_sweeps: int = 10000,
    check_kkt: bool = False,
) -> ComparatorCvResult:
    """K-fold cross-validation over a 10-point log-spaced lambda grid
    running from max_j |x_j' y| down to 1e-3 of it. The adaptive lasso
    additionally searches the ridge-weight xi over the shared grid.
    Ties prefer larger lambda, then larger xi."""
    if kind not in PENALTY_KINDS:
        raise ValueError(f"unknown penalty kind {kind!r}")
    if ystar.n != design.n:
        raise ValueError("design and response have different lengths")
    lam_max = float(np.max(np.abs(design.matrix.T @ ystar.centered())))
    if lam_max <= 0:
        raise DegenerateGridError("response is orthogonal to every column")
    lam_values = np.geomspace(COMPARATOR_GRID_RATIO * lam_max, lam_max, COMPARATOR_GRID_POINTS)

    folds = kfold_split(design.n, k, seed)
    problems = _fold_problems(design, ystar, folds)

    if kind == "alasso":
        xi_values = make_grid(design, ystar).xi_values
        fold_weights = [
            [_weights_from_ridge(problem.gram, problem.xty, float(xi)) for xi in xi_values]
            for problem in problems
        ]
    else:
        xi_values = None
        fold_weights = None

    n_xi = xi_values.size if xi_values is not None else 1
    errors = np.full((n_xi, lam_values.size), np.inf)
    kkt_worst = 0.0
    for i in range(n_xi):
        for j, lam in enumerate(lam_values):
            total = 0.0
            for f, problem in enumerate(problems):
                if kind == "alasso":
                    spec = PenaltySpec(kind, float(lam), weights=fold_weights[f][i])
                else:
                    spec = PenaltySpec(kind, float(lam), gamma=gamma)
                beta, _, _ = _cd_gram(problem.gram, problem.xty, spec, tol, max_sweeps)
                if check_kkt:
                    v = _kkt_from_gram(problem.gram, problem.xty, spec, beta)
                    if v > kkt_worst:
                        kkt_worst = v
                total += _holdout_error(problem, beta)
            errors[i, j] = total / len(problems)

    sel_xi = xi_values if xi_values is not None else np.array([1.0])
    best_xi, best_lambda = _select_best(errors, sel_xi, lam_values)
    return ComparatorCvResult(
        kind=kind,
        lambda_values=lam_values,
        xi_values=xi_values,
        errors=errors,
        best_lambda=best_lambda,
        best_xi=best_xi if kind == "alasso" else None,
        folds=folds,
        seed=seed,
        kkt_max=kkt_worst if check_kkt else None,
    )


def penalty_fit(
    design: StandardizedDesign,
    ystar: SyntheticResponse,
    kind: str,
    lam: float,
    gamma: float | None = None,
    xi: float | None = None,
    tol: float = 1e-9,
    max_sweeps: int = 10000,
):
    """Single full-data comparator fit. For the adaptive lasso, weights
    come from the full-data ridge initializer at xi. Returns
    (beta_std, spec)."""
    if kind == "alasso":
        if xi is None:
            raise ValueError("adaptive lasso needs xi for its weights")
        weights = adaptive_weights(design, ystar, xi)
        spec = PenaltySpec(kind, lam, weights=weights)
    else:
        spec = PenaltySpec(kind, lam, gamma=gamma)
    beta = coordinate_descent(design, ystar, spec, tol=tol, max_sweeps=max_sweeps)
    return beta, spec
