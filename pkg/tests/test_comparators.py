import numpy as np
import pytest

from cenbar import (
    PenaltySpec,
    SyntheticResponse,
    adaptive_weights,
    coordinate_descent,
    cross_validate_penalty,
    kkt_check,
    penalty_fit,
    standardize,
)
from helpers import centered_response, design_from, scalar_problem


def penalty_value(kind, t, lam, gamma=None, weight=1.0):
    """Textbook penalty functions, written independently of the solver."""
    t = abs(t)
    if kind == "lasso":
        return lam * t
    if kind == "alasso":
        return lam * weight * t
    if kind == "scad":
        if t <= lam:
            return lam * t
        if t <= gamma * lam:
            return (2 * gamma * lam * t - t * t - lam * lam) / (2 * (gamma - 1))
        return lam * lam * (gamma + 1) / 2
    if kind == "mcp":
        if t <= gamma * lam:
            return lam * t - t * t / (2 * gamma)
        return gamma * lam * lam / 2
    raise AssertionError(kind)


def univariate_argmin(kind, z, lam, gamma=None, weight=1.0):
    grid = np.linspace(-1.5 * abs(z) - 1, 1.5 * abs(z) + 1, 800_001)
    obj = 0.5 * grid**2 - z * grid
    obj += np.array([penalty_value(kind, b, lam, gamma, weight) for b in grid])
    return grid[np.argmin(obj)]


def test_soft_threshold_example():
    design, ys = scalar_problem(2.0)
    beta = coordinate_descent(design, ys, PenaltySpec(kind="lasso", lam=0.5))
    assert beta[0] == pytest.approx(1.5)


def test_mcp_firm_rule_returns_unpenalized_value():
    design, ys = scalar_problem(2.0)
    beta = coordinate_descent(design, ys, PenaltySpec(kind="mcp", lam=0.5, gamma=3.0))
    assert beta[0] == pytest.approx(2.0)  # |z| exceeds gamma*lam, no shrinkage


def test_scad_middle_piece():
    design, ys = scalar_problem(2.5)
    beta = coordinate_descent(design, ys, PenaltySpec(kind="scad", lam=1.0))
    expected = (2.7 * 2.5 - 3.7) / 1.7  # ((gamma-1) z - gamma lam) / (gamma - 2)
    assert beta[0] == pytest.approx(expected)


def test_univariate_solutions_match_grid_search():
    cases = [
        ("lasso", 2.0, 0.5, None, 1.0),
        ("lasso", -0.3, 0.5, None, 1.0),
        ("alasso", 1.4, 0.5, None, 2.0),
        ("scad", 2.5, 1.0, 3.7, 1.0),
        ("scad", -4.2, 1.0, 3.7, 1.0),
        ("scad", 1.7, 1.0, 3.7, 1.0),
        ("mcp", 2.0, 0.5, 3.0, 1.0),
        ("mcp", -1.2, 0.5, 3.0, 1.0),
        ("mcp", 0.4, 0.5, 3.0, 1.0),
    ]
    for kind, z, lam, gamma, weight in cases:
        design, ys = scalar_problem(z)
        weights = np.array([weight]) if kind == "alasso" else None
        spec = PenaltySpec(kind=kind, lam=lam, gamma=gamma, weights=weights)
        beta = coordinate_descent(design, ys, spec)
        oracle = univariate_argmin(kind, z, lam, gamma, weight)
        assert beta[0] == pytest.approx(oracle, abs=2e-5), (kind, z)


def test_large_lambda_gives_null_model():
    rng = np.random.default_rng(2)
    design = design_from(rng.normal(size=(40, 6)))
    ys = centered_response(rng.normal(size=40))
    top = np.max(np.abs(design.matrix.T @ ys.centered()))
    for kind in ("lasso", "scad", "mcp"):
        beta = coordinate_descent(design, ys, PenaltySpec(kind=kind, lam=2.0 * top))
        assert np.all(beta == 0.0)


def test_tiny_lambda_approaches_least_squares():
    rng = np.random.default_rng(8)
    design = design_from(rng.normal(size=(60, 5)))
    ys = centered_response(rng.normal(size=60))
    ls = np.linalg.lstsq(design.matrix, ys.centered(), rcond=None)[0]
    for kind in ("lasso", "scad", "mcp"):
        spec = PenaltySpec(kind=kind, lam=1e-10)
        beta = coordinate_descent(design, ys, spec, tol=1e-12)
        np.testing.assert_allclose(beta, ls, atol=1e-6)


def test_kkt_check_flags_perturbations():
    rng = np.random.default_rng(13)
    design = design_from(rng.normal(size=(50, 4)))
    ys = centered_response(design.matrix @ np.array([2.0, 0, -1.0, 0]) + 0.2 * rng.normal(size=50))
    spec = PenaltySpec(kind="lasso", lam=0.3)
    beta = coordinate_descent(design, ys, spec, tol=1e-10)
    assert kkt_check(design, ys, spec, beta) < 1e-8
    worse = beta + np.array([0.05, 0, 0, 0])
    assert kkt_check(design, ys, spec, worse) > 1e-3


def test_adaptive_weights_inverse_ridge():
    rng = np.random.default_rng(4)
    design = design_from(rng.normal(size=(30, 3)))
    ys = centered_response(rng.normal(size=30))
    from cenbar import ridge_init

    w = adaptive_weights(design, ys, xi=0.7)
    ridge = ridge_init(design, ys, 0.7)
    np.testing.assert_allclose(w, 1.0 / np.abs(ridge))


def test_cross_validate_penalty_shapes():
    rng = np.random.default_rng(30)
    x = rng.normal(size=(70, 6))
    y = x @ np.array([3.0, 0, 0, -2.0, 0, 0]) + rng.normal(size=70)
    design = standardize(x)
    ys = SyntheticResponse(values=y, center=float(y.mean()))

    cv = cross_validate_penalty(design, ys, "lasso", seed=3)
    assert cv.errors.shape == (1, 10)
    assert cv.best_xi is None
    assert cv.lambda_values.size == 10
    assert cv.best_error == cv.errors.min()
    assert cv.kkt_max is None

    cv2 = cross_validate_penalty(design, ys, "alasso", seed=3)
    assert cv2.errors.shape == (10, 10)
    assert cv2.best_xi is not None

    cv3 = cross_validate_penalty(design, ys, "mcp", seed=3, check_kkt=True)
    assert cv3.kkt_max is not None and cv3.kkt_max < 1e-6

    again = cross_validate_penalty(design, ys, "lasso", seed=3)
    np.testing.assert_array_equal(cv.errors, again.errors)


def test_penalty_fit_returns_spec():
    rng = np.random.default_rng(40)
    x = rng.normal(size=(50, 4))
    y = x @ np.array([2.0, 0, 0, -3.0]) + rng.normal(size=50)
    design = standardize(x)
    ys = SyntheticResponse(values=y, center=float(y.mean()))
    beta, spec = penalty_fit(design, ys, "alasso", lam=0.8, xi=0.5)
    assert spec.kind == "alasso"
    assert spec.weights is not None
    assert kkt_check(design, ys, spec, beta) < 1e-6
    with pytest.raises(ValueError):
        penalty_fit(design, ys, "alasso", lam=0.8)  # xi required


def test_penalty_spec_validation():
    with pytest.raises(ValueError):
        PenaltySpec(kind="ridge", lam=1.0)
    with pytest.raises(ValueError):
        PenaltySpec(kind="lasso", lam=-0.1)
    with pytest.raises(ValueError):
        PenaltySpec(kind="scad", lam=1.0, gamma=2.0)  # needs gamma > 2
    with pytest.raises(ValueError):
        PenaltySpec(kind="mcp", lam=1.0, gamma=1.0)  # needs gamma > 1
    with pytest.raises(ValueError):
        PenaltySpec(kind="lasso", lam=1.0, gamma=3.0)  # gamma is concave-only
    with pytest.raises(ValueError):
        PenaltySpec(kind="alasso", lam=1.0)  # weights required
    with pytest.raises(ValueError):
        PenaltySpec(kind="alasso", lam=1.0, weights=np.array([1.0, -1.0]))
    assert PenaltySpec(kind="scad", lam=1.0).gamma == 3.7
    assert PenaltySpec(kind="mcp", lam=1.0).gamma == 3.0
