import numpy as np
import pytest

from cenbar import (
    ConstantColumnError,
    StepSurvivor,
    SyntheticResponse,
    ZeroSurvivorError,
    destandardize_coefficients,
    fit_censoring_survivor,
    leurgans_transform,
    standardize,
)
from helpers import dataset, leurgans_midpoint_oracle


def test_no_censoring_is_identity():
    data = dataset([1.0, 2.0, 3.0], [1, 1, 1])
    ys = leurgans_transform(data, fit_censoring_survivor(data))
    np.testing.assert_array_equal(ys.values, data.times)


def test_worked_example_with_one_censoring():
    data = dataset([1.0, 2.0, 3.0], [1, 0, 1])
    ys = leurgans_transform(data, fit_censoring_survivor(data))
    # survivor is 1 on (-inf,2) and 0.5 on [2,inf); the largest response
    # integrates 1 over [0,2) and 2 over (2,3]
    np.testing.assert_allclose(ys.values, [1.0, 2.0, 4.0], rtol=0, atol=1e-15)
    assert ys.center == pytest.approx(np.mean(ys.values))


def test_negative_times_identity():
    data = dataset([-1.0, 2.0], [1, 1])
    ys = leurgans_transform(data, fit_censoring_survivor(data))
    np.testing.assert_array_equal(ys.values, [-1.0, 2.0])


def test_mixed_sign_identity_property():
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(2, 50))
        times = rng.normal(scale=3.0, size=n)
        data = dataset(times, np.ones(n, dtype=np.int64))
        ys = leurgans_transform(data, fit_censoring_survivor(data))
        assert np.max(np.abs(ys.values - times)) <= 1e-12


def test_matches_midpoint_integration_oracle():
    rng = np.random.default_rng(205)
    for _ in range(150):
        n = int(rng.integers(2, 25))
        times = np.round(rng.normal(scale=2.0, size=n), 1)  # rounding makes ties
        events = rng.integers(0, 2, size=n)
        events[np.argmax(times)] = 1  # keep the top interval integrable
        data = dataset(times, events)
        survivor = fit_censoring_survivor(data)
        ys = leurgans_transform(data, survivor)
        oracle = leurgans_midpoint_oracle(data, survivor)
        np.testing.assert_allclose(ys.values, oracle, rtol=1e-12, atol=1e-12)


def test_redundant_breakpoints_change_nothing():
    data = dataset([0.5, 1.0, 2.0, 3.5], [1, 0, 1, 1])
    survivor = fit_censoring_survivor(data)
    base = leurgans_transform(data, survivor)
    # insert no-op jumps: same step function, finer breakpoint set
    bp = np.sort(np.concatenate([survivor.breakpoints, [0.7, 2.2, 3.0]]))
    vals = np.array([survivor.value_at(b) for b in bp])
    refined = StepSurvivor(breakpoints=bp, values=vals)
    again = leurgans_transform(data, refined)
    np.testing.assert_allclose(again.values, base.values, rtol=0, atol=1e-14)


def test_zero_survivor_interval_is_an_error():
    # a survivor that has already hit zero before the largest time
    step = StepSurvivor(breakpoints=np.array([1.0]), values=np.array([0.0]))
    data = dataset([0.5, 2.0], [1, 1])
    with pytest.raises(ZeroSurvivorError):
        leurgans_transform(data, step)


def test_upper_limit_clips_integration():
    data = dataset([1.0, 2.0, 3.0], [1, 0, 1])
    survivor = fit_censoring_survivor(data)
    ys = leurgans_transform(data, survivor, upper=2.0)
    # the third observation only integrates up to 2
    np.testing.assert_allclose(ys.values, [1.0, 2.0, 2.0], rtol=0, atol=1e-15)


def test_transform_mean_tracks_uncensored_mean():
    # E[Y*] = E[Y] is the transform's reason to exist; check the bias of
    # the synthetic mean against the latent mean across seeded draws
    rng = np.random.default_rng(11)
    diffs = []
    for _ in range(300):
        n = 150
        y = rng.normal(size=n)
        c = rng.normal(loc=0.9, scale=1.3, size=n)
        times = np.minimum(y, c)
        events = (y <= c).astype(np.int64)
        if events.min() == 1 or events.max() == 0:
            continue
        data = dataset(times, events)
        ys = leurgans_transform(data, fit_censoring_survivor(data))
        diffs.append(np.mean(ys.values) - np.mean(y))
    diffs = np.asarray(diffs)
    se = diffs.std() / np.sqrt(diffs.size)
    assert abs(diffs.mean()) < 5 * se


def test_standardize_units():
    x = np.array([[1.0, 4.0], [2.0, 5.0], [3.0, 9.0]])
    design = standardize(x)
    np.testing.assert_allclose(design.matrix.sum(axis=0), 0, atol=1e-15)
    np.testing.assert_allclose((design.matrix**2).sum(axis=0), 1, atol=1e-14)
    np.testing.assert_allclose(design.col_means, [2.0, 6.0])
    np.testing.assert_allclose(design.col_norms[0], np.sqrt(2.0))
    # first column (1,2,3): centered (-1,0,1), norm sqrt(2)
    np.testing.assert_allclose(design.matrix[:, 0], [-1, 0, 1] / np.sqrt(2.0))


def test_standardize_rejects_constant_column():
    x = np.array([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]])
    with pytest.raises(ConstantColumnError) as err:
        standardize(x)
    assert err.value.column == 1


def test_destandardize_round_trip():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 5))
    y = rng.normal(size=40)
    design = standardize(x)
    ys = SyntheticResponse(values=y, center=float(np.mean(y)))
    beta_std = rng.normal(size=5)
    beta, intercept = destandardize_coefficients(beta_std, design, ys.center)
    pred_std = design.matrix @ beta_std + ys.center
    pred_orig = x @ beta + intercept
    np.testing.assert_allclose(pred_orig, pred_std, rtol=1e-12)


def test_destandardize_single_column_example():
    x = np.array([[1.0], [2.0], [3.0]])
    design = standardize(x)
    beta, intercept = destandardize_coefficients(np.array([np.sqrt(2.0)]), design, 5.0)
    assert beta[0] == pytest.approx(1.0)
    assert intercept == pytest.approx(3.0)


def test_select_columns_keeps_scaling_metadata():
    rng = np.random.default_rng(9)
    design = standardize(rng.normal(size=(20, 4)))
    sub = design.select_columns(np.array([2, 0]))
    np.testing.assert_array_equal(sub.matrix, design.matrix[:, [2, 0]])
    np.testing.assert_array_equal(sub.col_norms, design.col_norms[[2, 0]])


def test_centered_response_helper():
    ys = SyntheticResponse(values=np.array([1.0, 2.0, 6.0]), center=3.0)
    np.testing.assert_array_equal(ys.centered(), [-2.0, -1.0, 3.0])
