"""Perturbation-bootstrap inference for logistic regression.

The package fits the logistic MLE, builds smoothed studentized pivots on
the data and bootstrap sides, and inverts their bootstrap quantiles into
second-order-accurate confidence intervals and regions, alongside the
usual normal-approximation baseline and a Monte Carlo coverage harness.
"""

from .errors import (
    DataIOError,
    DegenerateResponseError,
    EmptySampleError,
    InvalidDataError,
    MissingColumnError,
    NonBinaryResponseError,
    NonPositiveVarianceError,
    ParseError,
    PebbleError,
    SeparationError,
    SingularMatrixError,
    TooManyFailuresError,
    UsageError,
)
from .inference import (
    BootstrapEnsemble,
    IntervalSet,
    make_intervals,
    normal_intervals,
    quantile,
    region_contains,
    run_pebble,
)
from .linalg import (
    cholesky_lower,
    mvn_diag_sample,
    sym_inv_sqrt,
    sym_inverse,
    sym_sqrt,
    symmetrize,
)
from .model import (
    Dataset,
    info_matrix,
    log_likelihood,
    predict_prob,
    predict_probs,
    sandwich_mid,
    score,
)
from .perturb import (
    BootstrapReplicate,
    DEFAULT_WEIGHTS,
    WeightSpec,
    bootstrap_score,
    sample_weights,
    solve_bootstrap,
)
from .pivots import (
    PivotBundle,
    SmoothingConfig,
    default_bn,
    default_d_var,
    pivot_normal,
    pivot_smoothed,
    pivot_smoothed_star,
)
from .rng import RandomStream, parse_seed
from .simulation import (
    BETA_POOL,
    CoverageReport,
    MethodCoverage,
    Scenario,
    generate_dataset,
    run_coverage_study,
)
from .solver import (
    DEFAULT_OPTIONS,
    FittedModel,
    SolverOptions,
    fit_mle,
    fit_weighted_equation,
)

__version__ = "0.1.0"

__all__ = [
    "BETA_POOL",
    "BootstrapEnsemble",
    "BootstrapReplicate",
    "CoverageReport",
    "DataIOError",
    "Dataset",
    "DEFAULT_OPTIONS",
    "DEFAULT_WEIGHTS",
    "DegenerateResponseError",
    "EmptySampleError",
    "FittedModel",
    "IntervalSet",
    "InvalidDataError",
    "MethodCoverage",
    "MissingColumnError",
    "NonBinaryResponseError",
    "NonPositiveVarianceError",
    "ParseError",
    "PebbleError",
    "PivotBundle",
    "RandomStream",
    "Scenario",
    "SeparationError",
    "SingularMatrixError",
    "SmoothingConfig",
    "SolverOptions",
    "TooManyFailuresError",
    "UsageError",
    "WeightSpec",
    "bootstrap_score",
    "cholesky_lower",
    "default_bn",
    "default_d_var",
    "fit_mle",
    "fit_weighted_equation",
    "generate_dataset",
    "info_matrix",
    "log_likelihood",
    "make_intervals",
    "mvn_diag_sample",
    "normal_intervals",
    "parse_seed",
    "pivot_normal",
    "pivot_smoothed",
    "pivot_smoothed_star",
    "predict_prob",
    "predict_probs",
    "quantile",
    "region_contains",
    "run_coverage_study",
    "run_pebble",
    "sample_weights",
    "sandwich_mid",
    "score",
    "solve_bootstrap",
    "sym_inv_sqrt",
    "sym_inverse",
    "sym_sqrt",
    "symmetrize",
]
