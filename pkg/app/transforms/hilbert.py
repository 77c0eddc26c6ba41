"""Hilbert (Cauchy-Stieltjes) transform of a spectral measure and its edge limits."""

import math
from dataclasses import dataclass
from functools import lru_cache

from app.config import get_settings
from app.errors import DomainError
from app.measures.spectral import MeasureKind, SpectralMeasure


@dataclass(frozen=True)
class HilbertEdges:
    """Monotone limits of H at the two ends of the support (possibly infinite)."""

    h_min: float
    h_max: float

    def __post_init__(self) -> None:
        if not self.h_min <= self.h_max:
            raise DomainError(f"inconsistent Hilbert edges ({self.h_min}, {self.h_max})")

    def contains(self, s: float) -> bool:
        return self.h_min <= s <= self.h_max

    def as_dict(self) -> dict:
        # JSON has no infinity; None marks a divergent edge
        return {
            "h_min": self.h_min if math.isfinite(self.h_min) else None,
            "h_max": self.h_max if math.isfinite(self.h_max) else None,
        }


def _semicircle_hilbert(w: float, r: float) -> float:
    """2 / (w + sign(w)·√(w² − r²)), the branch vanishing at infinity, for |w| ≥ r."""
    root = math.sqrt(max(0.0, (w - r) * (w + r)))
    return 2.0 / (w + math.copysign(root, w))


def _hilbert_unchecked(m: SpectralMeasure, z: float) -> float:
    if m.kind is MeasureKind.ATOMIC:
        return math.fsum(w / (z - p) for p, w in zip(m.points, m.weights))
    if m.kind is MeasureKind.UNIFORM:
        width = m.b - m.a
        # log((z - a)/(z - b)) written to keep accuracy far from the support
        return math.log1p(width / (z - m.b)) / width
    return _semicircle_hilbert(z - m.center, m.radius)


@lru_cache(maxsize=256)
def hilbert_edges(m: SpectralMeasure) -> HilbertEdges:
    """H_min = lim_{z↑λ_min} H(z) and H_max = lim_{z↓λ_max} H(z).

    An atom at the edge or a density bounded below near it makes the limit
    infinite. The semicircle edge integral converges and is evaluated by
    quadrature; values beyond ``edge_infinity`` are reported as infinite.
    """
    if m.kind is not MeasureKind.SEMICIRCLE:
        return HilbertEdges(-math.inf, math.inf)

    threshold = get_settings().edge_infinity
    hi_edge, lo_edge = m.support_max, m.support_min

    def upper(x: float) -> float:
        return 1.0 / (hi_edge - x) if x < hi_edge else 0.0

    def lower(x: float) -> float:
        return 1.0 / (lo_edge - x) if x > lo_edge else 0.0

    h_max = m.integrate(upper)
    h_min = m.integrate(lower)
    return HilbertEdges(
        h_min=-math.inf if h_min < -threshold else h_min,
        h_max=math.inf if h_max > threshold else h_max,
    )


def hilbert_transform(m: SpectralMeasure, z: float) -> float:
    """H(z) = ∫ (z − λ)^{-1} dμ(λ) for real z off the support.

    A support endpoint is accepted when the edge limit is finite, in which case
    that limit is returned.
    """
    if not math.isfinite(z):
        raise DomainError(f"Hilbert transform needs a finite argument, got {z}")
    if m.support_min < z < m.support_max:
        raise DomainError(f"z={z} lies inside the support [{m.support_min}, {m.support_max}]")
    if z == m.support_max or z == m.support_min:
        edges = hilbert_edges(m)
        value = edges.h_max if z == m.support_max else edges.h_min
        if not math.isfinite(value):
            raise DomainError(f"Hilbert transform diverges at the support edge z={z}")
        if m.kind is MeasureKind.SEMICIRCLE:
            # Closed form is exact at the edge; the quadrature value only decides finiteness
            return _hilbert_unchecked(m, z)
        return value
    return _hilbert_unchecked(m, z)
