"""Downside-risk portfolio selection with tail Gini dependence.

The package estimates tail-focused risk measures (tail Gini, tail variance,
tail conditional expectation) and the asymmetric tail-Gini correlation
matrices they induce, builds analytic and local-search efficient frontiers
on top of them, and fits generalized Pareto tails to flag infinite-variance
assets. Returns are handled in percent units end to end.
"""

from . import synth
from .dependence import (
    DependenceMatrices,
    ExchangeabilityReport,
    check_exchangeability,
    dependence_matrices,
    ecdf_values,
    gini_corr,
    gmd_quadratic_residual,
    portfolio_tail_gini,
    tail_gini_corr,
    tail_gini_cov,
    tail_gini_quadratic_residual,
)
from .errors import (
    DegenerateFrontierError,
    DegenerateMarginalError,
    DegenerateTailError,
    FitConvergenceError,
    IllConditionedError,
    InfeasibleTargetError,
    InsufficientExceedancesError,
    NotPositiveDefiniteError,
    PanelError,
    SupportViolationError,
    TailGiniError,
)
from .estimators import (
    TailStats,
    empirical_var,
    gmd,
    semi_variance,
    tail_gini,
    tail_sd,
    tail_stats,
    tail_subset,
    tail_variance,
    tce,
)
from .frontier import (
    AnalyticFrontierPoint,
    RiskModel,
    analytic_frontier,
    build_risk_model,
    solve_analytic,
)
from .gpd import GpdFit, fit_left_tail, gpd_fit_mle, gpd_loglik, left_exceedances
from .localsearch import (
    FrontierPoint,
    SearchOptions,
    direction_set,
    distortion_rate,
    feasible_start,
    minimize_risk,
    numeric_frontier,
)
from .panel import ReturnPanel, align, as_values, load_returns, save_returns

__version__ = "0.1.0"

__all__ = [
    "AnalyticFrontierPoint",
    "DependenceMatrices",
    "DegenerateFrontierError",
    "DegenerateMarginalError",
    "DegenerateTailError",
    "ExchangeabilityReport",
    "FitConvergenceError",
    "FrontierPoint",
    "GpdFit",
    "IllConditionedError",
    "InfeasibleTargetError",
    "InsufficientExceedancesError",
    "NotPositiveDefiniteError",
    "PanelError",
    "ReturnPanel",
    "RiskModel",
    "SearchOptions",
    "SupportViolationError",
    "TailGiniError",
    "TailStats",
    "align",
    "analytic_frontier",
    "as_values",
    "build_risk_model",
    "check_exchangeability",
    "dependence_matrices",
    "direction_set",
    "distortion_rate",
    "ecdf_values",
    "empirical_var",
    "feasible_start",
    "fit_left_tail",
    "gini_corr",
    "gmd",
    "gmd_quadratic_residual",
    "gpd_fit_mle",
    "gpd_loglik",
    "left_exceedances",
    "load_returns",
    "minimize_risk",
    "numeric_frontier",
    "portfolio_tail_gini",
    "save_returns",
    "semi_variance",
    "solve_analytic",
    "tail_gini",
    "tail_gini_corr",
    "tail_gini_cov",
    "tail_gini_quadratic_residual",
    "tail_sd",
    "tail_stats",
    "tail_subset",
    "tail_variance",
    "tce",
]
