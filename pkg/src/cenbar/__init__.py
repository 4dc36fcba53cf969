"""Variable selection for accelerated failure time models with right
censoring, via iteratively reweighted ridge regression on a synthetic
response."""

from .bar import (
    BarConfig,
    BarFit,
    GroupingRecord,
    SolveError,
    bar_fit,
    bar_step,
    grouping_bound_report,
    ridge_init,
)
from .comparators import (
    PENALTY_KINDS,
    ComparatorCvResult,
    PenaltySpec,
    adaptive_weights,
    coordinate_descent,
    cross_validate_penalty,
    kkt_check,
    penalty_fit,
)
from .km import StepSurvivor, SurvivalDataset, fit_censoring_survivor, survivor_left
from .screening import (
    ScreenResult,
    TwoStepResult,
    default_k,
    marginal_screen,
    two_step_fit,
    two_step_pipeline,
)
from .simulate import (
    METHOD_NAMES,
    REPORT_SCHEMA,
    Scenario,
    SelectionMetrics,
    calibrate_censoring_mean,
    generate,
    report_to_csv,
    run_monte_carlo,
    score_selection,
)
from .synthetic import (
    ConstantColumnError,
    StandardizedDesign,
    SyntheticResponse,
    ZeroSurvivorError,
    destandardize_coefficients,
    leurgans_transform,
    standardize,
)
from .tuning import (
    CvResult,
    DegenerateGridError,
    TuningGrid,
    cross_validate,
    kfold_split,
    make_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BarConfig",
    "BarFit",
    "ComparatorCvResult",
    "ConstantColumnError",
    "CvResult",
    "DegenerateGridError",
    "GroupingRecord",
    "METHOD_NAMES",
    "PENALTY_KINDS",
    "PenaltySpec",
    "REPORT_SCHEMA",
    "Scenario",
    "ScreenResult",
    "SelectionMetrics",
    "SolveError",
    "StandardizedDesign",
    "StepSurvivor",
    "SurvivalDataset",
    "SyntheticResponse",
    "TuningGrid",
    "TwoStepResult",
    "ZeroSurvivorError",
    "adaptive_weights",
    "bar_fit",
    "bar_step",
    "calibrate_censoring_mean",
    "coordinate_descent",
    "cross_validate",
    "cross_validate_penalty",
    "default_k",
    "destandardize_coefficients",
    "fit_censoring_survivor",
    "generate",
    "grouping_bound_report",
    "kfold_split",
    "kkt_check",
    "leurgans_transform",
    "make_grid",
    "marginal_screen",
    "penalty_fit",
    "report_to_csv",
    "ridge_init",
    "run_monte_carlo",
    "score_selection",
    "standardize",
    "survivor_left",
    "two_step_fit",
    "two_step_pipeline",
    "__version__",
]
