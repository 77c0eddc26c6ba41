"""Realizing finite spectra from measures and peeling them for the recursive bounds."""

import math
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from app.config import get_settings
from app.errors import DomainError
from app.measures.spectral import MeasureKind, SpectralMeasure, Spectrum


class Side(str, Enum):
    """Which end of a spectrum survives a trim."""

    UPPER = "upper"
    LOWER = "lower"


class Placement(str, Enum):
    """How eigenvalues are drawn from a measure."""

    QUANTILE = "quantile"
    IID = "iid"


def empirical_measure(s: Spectrum) -> SpectralMeasure:
    """N^{-1} Σ δ_{b_i}, duplicate eigenvalues merged."""
    if s.n == 0:
        raise DomainError("empirical measure of an empty spectrum")
    return SpectralMeasure.atomic(s.values, [1.0 / s.n] * s.n)


def _semicircle_unit_quantile(p: float) -> float:
    """Quantile of the semicircle on [-1, 1], solved by bracketed root finding."""
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # Exact symmetry of the placement
        return -_semicircle_unit_quantile(1.0 - p)

    def excess(u: float) -> float:
        return 0.5 + (u * math.sqrt(max(0.0, 1.0 - u * u)) + math.asin(u)) / math.pi - p

    return brentq(excess, -1.0, 0.0, xtol=get_settings().root_xtol, rtol=4 * np.finfo(float).eps)


def quantile(m: SpectralMeasure, p: float) -> float:
    """F^{-1}(p) for p in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {p}")
    if m.kind is MeasureKind.UNIFORM:
        return m.a + p * (m.b - m.a)
    if m.kind is MeasureKind.SEMICIRCLE:
        return m.center + m.radius * _semicircle_unit_quantile(p)
    cumulative = np.cumsum(m.weights)
    idx = int(np.searchsorted(cumulative, p - 1e-15, side="left"))
    return m.points[min(idx, len(m.points) - 1)]


def _proportional_counts(weights: tuple[float, ...], n: int) -> list[int]:
    """Largest-remainder rounding of n·w_i to integers summing to n."""
    exact = [n * w for w in weights]
    counts = [math.floor(x) for x in exact]
    leftover = n - sum(counts)
    # Ties go to the earlier (smaller) atom
    order = sorted(range(len(weights)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def sample_spectrum(
    m: SpectralMeasure,
    n: int,
    seed: int = 0,
    placement: Placement = Placement.QUANTILE,
) -> Spectrum:
    """Realize an n-point spectrum from ``m``.

    Quantile placement puts b_i = F^{-1}((i - 1/2)/n) for the continuous kinds and
    rounds n·w proportionally for atoms; it ignores ``seed``. i.i.d. placement draws
    from a Philox stream keyed by ``seed``.
    """
    if n < 1:
        raise DomainError(f"spectrum size must be positive, got {n}")
    placement = Placement(placement)

    if placement is Placement.IID:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        if m.kind is MeasureKind.ATOMIC:
            values = rng.choice(np.asarray(m.points), size=n, p=np.asarray(m.weights) / math.fsum(m.weights))
            return Spectrum(tuple(values))
        eps = np.finfo(float).eps
        levels = np.clip(rng.random(n), eps, 1.0 - eps)
        return Spectrum(tuple(quantile(m, float(p)) for p in levels))

    if m.kind is MeasureKind.ATOMIC:
        counts = _proportional_counts(m.weights, n)
        values = [p for p, c in zip(m.points, counts) for _ in range(c)]
        return Spectrum(tuple(values))
    return Spectrum(tuple(quantile(m, (i + 0.5) / n) for i in range(n)))


def trim_spectrum(s: Spectrum, i: int, side: Side, block: int = 1) -> Spectrum:
    """Spectrum fed to the step-i rank-one factor of the peeled bounds.

    ``lower`` keeps the smallest N + 1 - i values (b_i, ..., b_N), ``upper`` the
    largest (b_1, ..., b_{N+1-i}). With ``block=2`` each step removes two values,
    as for the quaternionic peel.
    """
    side = Side(side)
    if block not in (1, 2):
        raise DomainError(f"trim block must be 1 or 2, got {block}")
    removed = block * (i - 1)
    if i < 1 or removed >= s.n:
        raise DomainError(f"trim step {i} out of range for a spectrum of size {s.n}")
    if side is Side.LOWER:
        return Spectrum(s.values[removed:])
    return Spectrum(s.values[: s.n - removed])


def shift_nonnegative(s: Spectrum) -> tuple[Spectrum, float]:
    """Translate so that the smallest eigenvalue is 0; returns (spectrum, shift)."""
    lowest = s.values[-1]
    if lowest >= 0:
        return s, 0.0
    return s.shifted(-lowest), -lowest
