"""Spherical integrals: exact β=2 evaluators and Haar Monte Carlo."""

from app.hciz.exact import (
    hciz_confluent,
    hciz_det,
    hciz_log,
    hciz_rank_one,
    log_normalization,
    vandermonde_log,
)
from app.hciz.haar import embed_subgroup, haar_columns, haar_sample, symplectic_form
from app.hciz.logscalar import LogScalar
from app.hciz.montecarlo import (
    McEstimate,
    McParams,
    hciz_mc_estimate,
    hciz_mc_exponents,
    trace_form,
)

__all__ = [
    "LogScalar",
    "McEstimate",
    "McParams",
    "vandermonde_log",
    "log_normalization",
    "hciz_det",
    "hciz_rank_one",
    "hciz_confluent",
    "hciz_log",
    "haar_sample",
    "haar_columns",
    "embed_subgroup",
    "symplectic_form",
    "trace_form",
    "hciz_mc_estimate",
    "hciz_mc_exponents",
]
