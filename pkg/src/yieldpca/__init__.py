"""Yield-curve PCA, principal-component durations, PC-VaR and multi-factor immunization."""

from .curve_store import (
    RateChangeSeries,
    SummaryStats,
    YieldCurve,
    YieldCurveSeries,
    diff_series,
    load_curve_series,
    snapshot,
    spot_rate,
    summary_stats,
)
from .immunize import (
    ImmunizationProblem,
    ImmunizationSolution,
    InfeasibleError,
    Instrument,
    build_constraints,
    solve_immunization,
    verify_immunization,
)
from .pca import PcaModel, covariance, eigh_symmetric, factor_scores, fit_pca, residual_diagnostics
from .pricing import (
    CashFlow,
    CashFlowStream,
    discount_factor,
    present_value,
    shift_curve,
    zero_price,
)
from .risk import (
    VarConfig,
    factor_direction_duration,
    fisher_weil_duration,
    key_rate_duration,
    krd_vector,
    macaulay_duration,
    pc_duration,
    pc_var,
)

__version__ = "0.1.0"
