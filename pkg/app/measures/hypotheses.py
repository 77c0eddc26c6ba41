"""Finite-N diagnostics for the hypotheses on A_N and B_N."""

import math
from dataclasses import asdict, dataclass

from app.errors import DomainError
from app.measures.metric import bl_distance
from app.measures.sampling import empirical_measure
from app.measures.spectral import SpectralMeasure, Spectrum

SPACING_SLACK = 1e-12


def check_spacing(s: Spectrum, c: float) -> bool:
    """True iff b_{i+1} + c/N ≥ b_i for every consecutive pair."""
    if c <= 0:
        raise DomainError(f"spacing constant must be positive, got {c}")
    if s.n < 2:
        raise DomainError("spacing needs at least two eigenvalues")
    slack = SPACING_SLACK * max(1.0, max(abs(v) for v in s.values))
    step = c / s.n
    return all(s.values[i + 1] + step + slack >= s.values[i] for i in range(s.n - 1))


def spacing_constant(s: Spectrum) -> float:
    """Smallest c for which :func:`check_spacing` holds, N·max gap."""
    if s.n < 2:
        return 0.0
    return s.n * max(s.values[i] - s.values[i + 1] for i in range(s.n - 1))


def spectrum_moment(s: Spectrum, k: int) -> float:
    """N^{-1} Tr B^k."""
    if s.n == 0:
        raise DomainError("moment of an empty spectrum")
    return math.fsum(v**k for v in s.values) / s.n


@dataclass(frozen=True)
class HypothesisReport:
    """How far a finite pair (A_N, B_N) is from the asymptotic hypotheses."""

    n: int
    rank: int
    rank_fraction: float
    edge_gap_max: float
    edge_gap_min: float
    bl_to_limit: float
    spacing_constant: float

    def as_dict(self) -> dict:
        return asdict(self)


def validate_hypotheses(a: Spectrum, b: Spectrum, m: SpectralMeasure, grid_size: int | None = None) -> HypothesisReport:
    """Rank fraction of A, edge convergence and weak distance of B, and B's spacing constant."""
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: A has {a.n} eigenvalues, B has {b.n}")
    return HypothesisReport(
        n=b.n,
        rank=a.rank,
        rank_fraction=a.rank / a.n,
        edge_gap_max=abs(b.values[0] - m.support_max),
        edge_gap_min=abs(b.values[-1] - m.support_min),
        bl_to_limit=bl_distance(empirical_measure(b), m, grid_size),
        spacing_constant=spacing_constant(b),
    )
