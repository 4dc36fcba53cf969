"""Command-line interface.

Four commands: fit, transform, simulate, benchmark. Input is CSV with a
header row naming "time", "event" (0 or 1), and one column per
covariate, or a scenario JSON for the benchmark commands. Failures
print one "error: ..." line to stderr and exit with 2 (malformed
input), 3 (degenerate design), or 4 (numerical failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .bar import BarConfig, SolveError, bar_fit
from .km import SurvivalDataset, fit_censoring_survivor
from .screening import marginal_screen, two_step_pipeline, _embed
from .simulate import METHOD_NAMES, Scenario, report_to_csv, run_monte_carlo
from .synthetic import (
    ConstantColumnError,
    ZeroSurvivorError,
    leurgans_transform,
    standardize,
)
from .tuning import DegenerateGridError

__all__ = ["main"]


class InputError(ValueError):
    """Malformed CSV or scenario input (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _read_table(stream) -> tuple[list, list]:
    reader = csv.reader(stream)
    try:
        header = [cell.strip() for cell in next(reader)]
    except StopIteration:
        raise InputError("empty input: expected a CSV header row") from None
    rows = [row for row in reader if row]
    return header, rows


def _parse_cell(raw: str, line: int, name: str) -> float:
    text = raw.strip()
    if not text:
        raise InputError(f"row {line}, column '{name}': missing value")
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"row {line}, column '{name}': not a number: '{text}'") from None
    if not math.isfinite(value):
        raise InputError(f"row {line}, column '{name}': value must be finite")
    return value


def _table_to_dataset(header: list, rows: list) -> tuple[list, SurvivalDataset]:
    for required in ("time", "event"):
        if required not in header:
            raise InputError(f"missing required column '{required}'")
    if len(set(header)) != len(header):
        raise InputError("duplicate column names in header")
    names = [h for h in header if h not in ("time", "event")]
    if len(rows) < 2:
        raise InputError("need at least two data rows")

    time_col = header.index("time")
    event_col = header.index("event")
    cov_cols = [i for i, h in enumerate(header) if h not in ("time", "event")]

    times = np.empty(len(rows))
    events = np.empty(len(rows), dtype=np.int64)
    covs = np.empty((len(rows), len(cov_cols)))
    for r, row in enumerate(rows):
        line = r + 2  # header is line 1
        if len(row) != len(header):
            raise InputError(
                f"row {line}: expected {len(header)} cells, found {len(row)}"
            )
        times[r] = _parse_cell(row[time_col], line, "time")
        ev = _parse_cell(row[event_col], line, "event")
        if ev not in (0.0, 1.0):
            raise InputError(f"row {line}, column 'event': must be 0 or 1, found '{row[event_col].strip()}'")
        events[r] = int(ev)
        for c, col in enumerate(cov_cols):
            covs[r, c] = _parse_cell(row[col], line, header[col])
    return names, SurvivalDataset(times=times, events=events, covariates=covs)


def _open_input(args):
    if args.input is None:
        return io.StringIO(sys.stdin.read())
    if not os.path.isfile(args.input) or not os.access(args.input, os.R_OK):
        raise InputError(f"cannot read input path '{args.input}'")
    with open(args.input, "r", encoding="utf-8", newline="") as handle:
        return io.StringIO(handle.read())


def _check_output(path):
    if path is None:
        return
    directory = os.path.dirname(path) or "."
    if not os.access(directory, os.W_OK) or (os.path.exists(path) and not os.access(path, os.W_OK)):
        raise InputError(f"cannot write output path '{path}'")


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _scenario_from_json(obj, seed: int, reps_override) -> Scenario:
    if not isinstance(obj, dict):
        raise InputError("/: expected a JSON object")

    def want_int(key, value):
        if not isinstance(value, int) or isinstance(value, bool):
            raise InputError(f"/{key}: expected an integer")
        return value

    def want_number(key, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InputError(f"/{key}: expected a number")
        return float(value)

    allowed = {"model", "n", "p", "rho", "censoring_rate", "reps", "censoring_scale", "beta0"}
    for key in obj:
        if key not in allowed:
            raise InputError(f"/{key}: unknown field")
    for key in ("model", "n", "p"):
        if key not in obj:
            raise InputError(f"/{key}: required field is missing")

    model = want_int("model", obj["model"])
    if model not in (1, 2):
        raise InputError("/model: expected 1 or 2")
    n = want_int("n", obj["n"])
    if n < 2:
        raise InputError("/n: expected an integer >= 2")
    p = want_int("p", obj["p"])
    if p < 1:
        raise InputError("/p: expected an integer >= 1")

    kwargs = {}
    if "rho" in obj:
        rho = want_number("rho", obj["rho"])
        if not 0.0 <= rho < 1.0:
            raise InputError("/rho: expected a number in [0, 1)")
        kwargs["rho"] = rho
    if "censoring_rate" in obj:
        rate = want_number("censoring_rate", obj["censoring_rate"])
        if not 0.0 <= rate < 1.0:
            raise InputError("/censoring_rate: expected a number in [0, 1)")
        kwargs["censoring_rate"] = rate
    if "reps" in obj:
        reps = want_int("reps", obj["reps"])
        if reps < 1:
            raise InputError("/reps: expected an integer >= 1")
        kwargs["reps"] = reps
    if "censoring_scale" in obj:
        scale = obj["censoring_scale"]
        if scale not in ("variance", "sd"):
            raise InputError('/censoring_scale: expected "variance" or "sd"')
        kwargs["censoring_scale"] = scale
    if "beta0" in obj:
        raw = obj["beta0"]
        if not isinstance(raw, list):
            raise InputError("/beta0: expected an array of numbers")
        beta0 = np.empty(len(raw))
        for i, value in enumerate(raw):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InputError(f"/beta0/{i}: expected a number")
            beta0[i] = float(value)
        if len(raw) != p:
            raise InputError(f"/beta0: expected length {p}, found {len(raw)}")
        kwargs["beta0"] = beta0
    if reps_override is not None:
        kwargs["reps"] = reps_override

    try:
        return Scenario(model=model, n=n, p=p, master_seed=seed, **kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _fit_report(data, names, args) -> dict:
    forced = (args.xi is not None, args.lam is not None)
    if any(forced) and not all(forced):
        raise InputError("--xi and --lambda must be given together")
    if data.p < 1:
        raise InputError("fit needs at least one covariate column")

    screened_to = None
    if all(forced):
        survivor = fit_censoring_survivor(data)
        ystar = leurgans_transform(data, survivor)
        design = standardize(data.covariates)
        if args.k is not None:
            screen = marginal_screen(design, ystar, args.k)
            reduced = design.select_columns(screen.kept)
            fit = bar_fit(reduced, ystar, BarConfig(xi=args.xi, lam=args.lam))
            fit = _embed(fit, screen.kept, design.p)
            screened_to = int(screen.k)
        else:
            fit = bar_fit(design, ystar, BarConfig(xi=args.xi, lam=args.lam))
        xi, lam, cv_error = args.xi, args.lam, None
    else:
        k = args.k if args.k is not None else data.p
        result = two_step_pipeline(data, k=k, cv_seed=args.seed, cv_folds=args.folds)
        fit = result.fit
        if result.cv is None:
            xi, lam, cv_error = None, None, None
        else:
            xi, lam, cv_error = result.cv.best_xi, result.cv.best_lambda, result.cv.best_error
        screened_to = int(result.screen.k) if args.k is not None else None

    return {
        "n": data.n,
        "p": data.p,
        "screened_to": screened_to,
        "support": [names[j] for j in fit.support],
        "beta_orig": {names[j]: float(fit.beta_orig[j]) for j in fit.support},
        "intercept": float(fit.intercept),
        "xi": xi,
        "lambda": lam,
        "cv_error": cv_error,
        "iterations": int(fit.iterations),
        "converged": bool(fit.converged),
        "fixed_point_residual": float(fit.fixed_point_residual),
    }


def _cmd_fit(args) -> int:
    _check_output(args.output)
    header, rows = _read_table(_open_input(args))
    names, data = _table_to_dataset(header, rows)
    report = _fit_report(data, names, args)
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0


def _cmd_transform(args) -> int:
    _check_output(args.output)
    header, rows = _read_table(_open_input(args))
    _, data = _table_to_dataset(header, rows)
    survivor = fit_censoring_survivor(data)
    ystar = leurgans_transform(data, survivor)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header + ["ystar"])
    for row, value in zip(rows, ystar.values):
        writer.writerow([cell.strip() for cell in row] + [repr(float(value))])
    _emit(buffer.getvalue(), args.output)
    return 0


def _run_benchmark(args, default_methods) -> int:
    _check_output(args.output)
    stream = _open_input(args)
    try:
        obj = json.load(stream)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid scenario JSON: {exc}") from None
    scenario = _scenario_from_json(obj, seed=args.seed, reps_override=args.reps)

    methods = default_methods if args.methods is None else [
        m.strip() for m in args.methods.split(",") if m.strip()
    ]
    report = run_monte_carlo(
        scenario,
        methods=methods,
        use_screening=bool(args.screen),
        k=args.k,
        threads=args.threads,
    )
    if args.format == "csv":
        _emit(report_to_csv(report), args.output)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0


def _cmd_simulate(args) -> int:
    return _run_benchmark(args, ["cbar"])


def _cmd_benchmark(args) -> int:
    return _run_benchmark(args, list(METHOD_NAMES))


def _add_io_arguments(parser):
    parser.add_argument("--input", help="input path (default: standard input)")
    parser.add_argument("--output", help="output path (default: standard output)")
    parser.add_argument("--seed", type=int, default=42, help="random seed (default 42)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cenbar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="select and estimate on a CSV dataset")
    _add_io_arguments(fit)
    fit.add_argument("--k", type=int, help="screen to k columns before fitting")
    fit.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    fit.add_argument("--xi", type=float, help="skip tuning and force this ridge penalty")
    fit.add_argument("--lambda", dest="lam", type=float, help="skip tuning and force this selection penalty")
    fit.set_defaults(func=_cmd_fit)

    transform = sub.add_parser("transform", help="append the synthetic response column")
    _add_io_arguments(transform)
    transform.set_defaults(func=_cmd_transform)

    for name, handler, blurb in (
        ("simulate", _cmd_simulate, "run a scenario with one method (default cbar)"),
        ("benchmark", _cmd_benchmark, "compare methods on a scenario (default all)"),
    ):
        cmd = sub.add_parser(name, help=blurb)
        _add_io_arguments(cmd)
        cmd.add_argument("--reps", type=int, help="override the scenario replication count")
        cmd.add_argument("--methods", help="comma-separated method names")
        cmd.add_argument("--screen", action="store_true", help="apply marginal screening first")
        cmd.add_argument("--k", type=int, help="screening size (default: ceil(2 log(n) n^(1/4)))")
        cmd.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                         help="parallel replications (default: available cores)")
        cmd.add_argument("--format", choices=("json", "csv"), default="json",
                         help="report format (default json)")
        cmd.set_defaults(func=handler)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConstantColumnError as exc:
        print(f"error: degenerate design: {exc}", file=sys.stderr)
        return 3
    except (SolveError, ZeroSurvivorError, DegenerateGridError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
