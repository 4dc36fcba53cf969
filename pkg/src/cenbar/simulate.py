"""Monte Carlo benchmark harness.

Covariates follow a first-order autoregression with unit variance, the
log-scale response adds standard normal noise, and censoring times are
normal with mean calibrated so the requested fraction of observations
is censored. Two stock coefficient patterns are provided:

    model 1: (3, -2, 0, 0, 6, 0, ..., 0)
    model 2: (3, -2, 6, 0.3, -0.2, 0.6, 0, ..., 0)

Each replication draws its data from an independent stream derived from
(master_seed, replication index), so reports are reproducible bit for
bit at any parallelism degree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bar import BarConfig, SolveError, bar_fit
from .comparators import (
    PENALTY_KINDS,
    cross_validate_penalty,
    kkt_check,
    penalty_fit,
)
from .km import SurvivalDataset, fit_censoring_survivor
from .screening import default_k, marginal_screen
from .synthetic import (
    ConstantColumnError,
    ZeroSurvivorError,
    destandardize_coefficients,
    leurgans_transform,
    standardize,
)
from .tuning import DegenerateGridError, cross_validate, make_grid

__all__ = [
    "REPORT_SCHEMA",
    "METHOD_NAMES",
    "Scenario",
    "RepScore",
    "SelectionMetrics",
    "calibrate_censoring_mean",
    "generate",
    "score_selection",
    "run_monte_carlo",
    "report_to_csv",
]

REPORT_SCHEMA = "cenbar-report/1"
METHOD_NAMES = ("cbar",) + PENALTY_KINDS

PILOT_SIZE = 100_000
CALIBRATION_TOL = 0.005

_MODEL_HEADS = {1: (3.0, -2.0, 0.0, 0.0, 6.0), 2: (3.0, -2.0, 6.0, 0.3, -0.2, 0.6)}


@dataclass
class Scenario:
    """One benchmark setting.

    censoring_scale says how to read the censoring spread parameter 2:
    "variance" (the default) draws C ~ N(c, 2) with variance 2,
    "sd" uses standard deviation 2.
    """

    model: int
    n: int
    p: int
    rho: float = 0.5
    censoring_rate: float = 0.2
    reps: int = 100
    master_seed: int = 42
    censoring_scale: str = "variance"
    beta0: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.model not in _MODEL_HEADS:
            raise ValueError("model must be 1 or 2")
        if self.n < 2:
            raise ValueError("need n >= 2")
        head = _MODEL_HEADS[self.model]
        if self.p < len(head):
            raise ValueError(f"model {self.model} needs p >= {len(head)}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if not 0.0 <= self.censoring_rate < 1.0:
            raise ValueError("censoring_rate must lie in [0, 1)")
        if self.reps < 1:
            raise ValueError("need at least one replication")
        if self.censoring_scale not in ("variance", "sd"):
            raise ValueError('censoring_scale must be "variance" or "sd"')
        if self.beta0 is None:
            beta0 = np.zeros(self.p)
            beta0[: len(head)] = head
            self.beta0 = beta0
        else:
            self.beta0 = np.asarray(self.beta0, dtype=float)
            if self.beta0.shape != (self.p,):
                raise ValueError("beta0 length does not match p")

    @property
    def censoring_sd(self) -> float:
        return math.sqrt(2.0) if self.censoring_scale == "variance" else 2.0


@dataclass
class RepScore:
    """Metrics of a single replication."""

    fp: float
    fn: float
    misc: float
    tm: float
    sm: float
    mab: float
    mspe: float


@dataclass
class SelectionMetrics:
    """Averages over the successful replications of one method."""

    misc: float
    fp: float
    fn: float
    tm: float
    sm: float
    mspe: float
    mab: float
    reps: int
    failures: int


def _ar1_design(z: np.ndarray, rho: float) -> np.ndarray:
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    if rho == 0.0:
        return z.copy()
    scale = math.sqrt(1.0 - rho * rho)
    for j in range(1, z.shape[1]):
        x[:, j] = rho * x[:, j - 1] + scale * z[:, j]
    return x


def calibrate_censoring_mean(scenario: Scenario) -> float:
    """Censoring-time mean c such that the fraction of censored pilot
    draws matches scenario.censoring_rate within 0.005, found by
    bisection (the fraction is monotone decreasing in c)."""
    rate = scenario.censoring_rate
    if not 0.0 < rate < 1.0:
        raise ValueError("calibration needs a censoring rate in (0, 1)")
    rng = np.random.default_rng([scenario.master_seed, 1])
    m = int(np.max(np.flatnonzero(scenario.beta0)) + 1) if np.any(scenario.beta0) else 1
    z = rng.standard_normal((PILOT_SIZE, m))
    x = _ar1_design(z, scenario.rho)
    eps = rng.standard_normal(PILOT_SIZE)
    znoise = rng.standard_normal(PILOT_SIZE)
    y = x @ scenario.beta0[:m] + eps
    w = y - scenario.censoring_sd * znoise  # censored iff w > c

    lo = float(np.min(w)) - 1.0
    hi = float(np.max(w)) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        frac = float(np.mean(w > mid))
        if abs(frac - rate) <= CALIBRATION_TOL:
            return mid
        if frac > rate:
            lo = mid
        else:
            hi = mid
    raise SolveError("censoring calibration failed to converge")


def generate(scenario: Scenario, rep_index: int, c: float | None = None):
    """Draw one replication from the stream (master_seed, rep_index),
    returning (dataset, true coefficient vector).

    c is the calibrated censoring mean; pass it in when generating many
    replications so the pilot runs once. Ignored when censoring_rate is 0.
    """
    if rep_index < 0:
        raise ValueError("rep_index must be nonnegative")
    if scenario.censoring_rate > 0.0 and c is None:
        c = calibrate_censoring_mean(scenario)
    rng = np.random.default_rng([scenario.master_seed, 0, rep_index])
    z = rng.standard_normal((scenario.n, scenario.p))
    x = _ar1_design(z, scenario.rho)
    eps = rng.standard_normal(scenario.n)
    znoise = rng.standard_normal(scenario.n)
    y = x @ scenario.beta0 + eps
    if scenario.censoring_rate > 0.0:
        cens = c + scenario.censoring_sd * znoise
        times = np.minimum(y, cens)
        events = (y <= cens).astype(np.int64)
    else:
        times = y
        events = np.ones(scenario.n, dtype=np.int64)
    data = SurvivalDataset(times=times, events=events, covariates=x)
    return data, scenario.beta0.copy()


def score_selection(support_hat, support_true, beta_hat, beta_true, mspe: float) -> RepScore:
    """Per-replication selection and estimation metrics.

    sm is the support overlap |A & B| / sqrt(|A| |B|), defined as 1 when
    both supports are empty and 0 when exactly one is. mab averages
    |beta_hat - beta_true| over all p coordinates.
    """
    hat = frozenset(int(j) for j in support_hat)
    true = frozenset(int(j) for j in support_true)
    fp = len(hat - true)
    fn = len(true - hat)
    if not hat and not true:
        sm = 1.0
    elif not hat or not true:
        sm = 0.0
    else:
        sm = len(hat & true) / math.sqrt(len(hat) * len(true))
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_true = np.asarray(beta_true, dtype=float)
    if beta_hat.shape != beta_true.shape:
        raise ValueError("coefficient vectors differ in length")
    mab = float(np.mean(np.abs(beta_hat - beta_true)))
    return RepScore(
        fp=float(fp),
        fn=float(fn),
        misc=float(fp + fn),
        tm=1.0 if hat == true else 0.0,
        sm=float(sm),
        mab=mab,
        mspe=float(mspe),
    )


_REP_ERRORS = (
    SolveError,
    DegenerateGridError,
    ZeroSurvivorError,
    ConstantColumnError,
    np.linalg.LinAlgError,
)


def _cv_seed(scenario: Scenario, rep_index: int) -> int:
    seq = np.random.SeedSequence([scenario.master_seed, 2, rep_index])
    return int(seq.generate_state(1)[0])


def _run_replication(scenario, rep_index, c, methods, use_screening, k, check_kkt):
    """Returns {method: RepScore | None, ...} plus kkt maxima; None marks
    a failed fit."""
    out = {}
    kkt = {}
    try:
        data, _ = generate(scenario, rep_index, c)
        survivor = fit_censoring_survivor(data)
        ystar = leurgans_transform(data, survivor)
        design = standardize(data.covariates)
        if use_screening:
            k_eff = default_k(scenario.n) if k is None else int(k)
            screen = marginal_screen(design, ystar, k_eff)
            kept = screen.kept
            design = design.select_columns(kept)
        else:
            kept = np.arange(scenario.p)
    except _REP_ERRORS:
        return {m: None for m in methods}, {}

    true_support = np.flatnonzero(scenario.beta0)
    seed = _cv_seed(scenario, rep_index)
    for method in methods:
        try:
            if method == "cbar":
                grid = make_grid(design, ystar)
                cv = cross_validate(design, ystar, grid, seed=seed)
                fit = bar_fit(design, ystar, BarConfig(xi=cv.best_xi, lam=cv.best_lambda))
                beta_reduced = fit.beta_orig
                mspe = cv.best_error
            else:
                ccv = cross_validate_penalty(
                    design, ystar, method, seed=seed, check_kkt=check_kkt
                )
                beta_std, spec = penalty_fit(
                    design, ystar, method, ccv.best_lambda, xi=ccv.best_xi
                )
                beta_reduced, _ = destandardize_coefficients(beta_std, design, ystar.center)
                mspe = ccv.best_error
                if check_kkt:
                    final_v = kkt_check(design, ystar, spec, beta_std)
                    kkt[method] = max(ccv.kkt_max, final_v)
        except _REP_ERRORS:
            out[method] = None
            continue
        beta_full = np.zeros(scenario.p)
        beta_full[kept] = beta_reduced
        support = kept[np.flatnonzero(beta_reduced)]
        out[method] = score_selection(support, true_support, beta_full, scenario.beta0, mspe)
    return out, kkt


def run_monte_carlo(
    scenario: Scenario,
    methods=METHOD_NAMES,
    use_screening: bool = False,
    k: int | None = None,
    threads: int = 1,
    check_kkt: bool = False,
) -> dict:
    """Run the full benchmark and aggregate per-method metrics.

    Replications that fail numerically are counted in "failures" and
    excluded from the averages. The report is a JSON-ready dict with a
    versioned schema; identical scenario and master_seed give identical
    reports at any thread count.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHOD_NAMES:
            raise ValueError(f"unknown method {m!r}; valid: {', '.join(METHOD_NAMES)}")
    if len(set(methods)) != len(methods):
        raise ValueError("duplicate method names")
    if threads < 1:
        raise ValueError("threads must be at least 1")

    c = calibrate_censoring_mean(scenario) if scenario.censoring_rate > 0 else None

    def work(rep):
        return _run_replication(scenario, rep, c, methods, use_screening, k, check_kkt)

    reps = range(scenario.reps)
    if threads == 1:
        results = [work(r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, reps))

    rows = []
    for method in methods:
        scores = [res[0][method] for res in results if res[0][method] is not None]
        failures = scenario.reps - len(scores)
        if scores:
            metrics = SelectionMetrics(
                misc=float(np.mean([s.misc for s in scores])),
                fp=float(np.mean([s.fp for s in scores])),
                fn=float(np.mean([s.fn for s in scores])),
                tm=float(np.mean([s.tm for s in scores])),
                sm=float(np.mean([s.sm for s in scores])),
                mspe=float(np.mean([s.mspe for s in scores])),
                mab=float(np.mean([s.mab for s in scores])),
                reps=len(scores),
                failures=failures,
            )
        else:
            metrics = SelectionMetrics(
                misc=None, fp=None, fn=None, tm=None, sm=None, mspe=None, mab=None,
                reps=0, failures=failures,
            )
        row = {
            "name": method,
            "misc": metrics.misc,
            "fp": metrics.fp,
            "fn": metrics.fn,
            "tm": metrics.tm,
            "sm": metrics.sm,
            "mspe": metrics.mspe,
            "mab": metrics.mab,
            "failures": metrics.failures,
            "reps": metrics.reps,
        }
        if check_kkt and method != "cbar":
            maxima = [res[1].get(method) for res in results if res[1].get(method) is not None]
            row["kkt_max"] = float(max(maxima)) if maxima else None
        rows.append(row)

    return {
        "schema": REPORT_SCHEMA,
        "scenario": {
            "model": scenario.model,
            "n": scenario.n,
            "p": scenario.p,
            "rho": scenario.rho,
            "censoring_rate": scenario.censoring_rate,
            "censoring_scale": scenario.censoring_scale,
            "reps": scenario.reps,
            "master_seed": scenario.master_seed,
            "beta0": [float(b) for b in scenario.beta0],
            "screening": {"enabled": bool(use_screening), "k": k},
        },
        "methods": rows,
    }


def report_to_csv(report: dict) -> str:
    """Flatten the methods table to CSV text."""
    columns = ["name", "misc", "fp", "fn", "tm", "sm", "mspe", "mab", "failures", "reps"]
    lines = [",".join(columns)]
    for row in report["methods"]:
        cells = []
        for col in columns:
            value = row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
