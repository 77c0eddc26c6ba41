"""Small-rank asymptotics: peeling bounds and convergence studies."""

from app.asymptotics.bounds import compress_spectrum, interlaces, sandwich_bounds
from app.asymptotics.study import (
    ConvergenceReport,
    Method,
    PrefactorMode,
    RankRule,
    ReportRow,
    convergence_study,
    dilute_rank_limit,
    lhs_scaled_log,
    resolve_rank,
    rhs_f_average,
)

__all__ = [
    "ConvergenceReport",
    "ReportRow",
    "Method",
    "PrefactorMode",
    "RankRule",
    "resolve_rank",
    "lhs_scaled_log",
    "rhs_f_average",
    "sandwich_bounds",
    "compress_spectrum",
    "interlaces",
    "convergence_study",
    "dilute_rank_limit",
]
