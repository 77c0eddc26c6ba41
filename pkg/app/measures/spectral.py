"""Spectral measures and finite spectra."""

import math
import warnings
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from app.config import get_settings
from app.errors import DomainError
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Atoms closer than this are merged
ATOM_MERGE_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12


class MeasureKind(str, Enum):
    """Families of compactly supported measures the lab understands."""

    ATOMIC = "atomic"
    UNIFORM = "uniform"
    SEMICIRCLE = "semicircle"


def _canonical_atoms(
    points: Sequence[float], weights: Sequence[float]
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Sort atoms, drop zero weights and merge points closer than ATOM_MERGE_TOL."""
    pairs = sorted((float(p), float(w)) for p, w in zip(points, weights, strict=True) if w != 0)
    merged_points: list[float] = []
    merged_weights: list[float] = []
    for point, weight in pairs:
        if merged_points and point - merged_points[-1] < ATOM_MERGE_TOL:
            merged_weights[-1] += weight
        else:
            merged_points.append(point)
            merged_weights.append(weight)
    return tuple(merged_points), tuple(merged_weights)


@dataclass(frozen=True)
class SpectralMeasure:
    """Compactly supported probability measure on the real line.

    Build instances with :meth:`atomic`, :meth:`uniform` or :meth:`semicircle`;
    the constructor validates and canonicalizes whatever it is given.
    """

    kind: MeasureKind
    points: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    a: float = 0.0
    b: float = 0.0
    center: float = 0.0
    radius: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        if self.kind is MeasureKind.ATOMIC:
            if len(self.points) != len(self.weights):
                raise DomainError("atomic measure needs as many weights as points")
            if not self.points:
                raise DomainError("atomic measure needs at least one atom")
            if any(not math.isfinite(p) for p in self.points):
                raise DomainError("atom positions must be finite")
            if any(w < 0 or not math.isfinite(w) for w in self.weights):
                raise DomainError("atom weights must be finite and nonnegative")
            points, weights = _canonical_atoms(self.points, self.weights)
            if not points:
                raise DomainError("atomic measure has no atom of positive weight")
            if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
                raise DomainError(f"atom weights sum to {math.fsum(weights)!r}, not 1")
            object.__setattr__(self, "points", points)
            object.__setattr__(self, "weights", weights)
        elif self.kind is MeasureKind.UNIFORM:
            if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
                raise DomainError(f"uniform measure needs finite a < b, got [{self.a}, {self.b}]")
        elif self.kind is MeasureKind.SEMICIRCLE:
            if not math.isfinite(self.center) or not (math.isfinite(self.radius) and self.radius > 0):
                raise DomainError("semicircle needs a finite center and a positive radius")

    # ------------------------------------------------------------------ builders

    @classmethod
    def atomic(cls, points: Iterable[float], weights: Iterable[float] | None = None) -> "SpectralMeasure":
        """Atomic measure; equal weights when ``weights`` is omitted."""
        points = [float(p) for p in points]
        if weights is None:
            weights = [1.0 / len(points)] * len(points) if points else []
        return cls(kind=MeasureKind.ATOMIC, points=tuple(points), weights=tuple(float(w) for w in weights))

    @classmethod
    def dirac(cls, point: float) -> "SpectralMeasure":
        return cls.atomic([point], [1.0])

    @classmethod
    def uniform(cls, a: float, b: float) -> "SpectralMeasure":
        return cls(kind=MeasureKind.UNIFORM, a=float(a), b=float(b))

    @classmethod
    def semicircle(cls, center: float = 0.0, radius: float = 2.0) -> "SpectralMeasure":
        return cls(kind=MeasureKind.SEMICIRCLE, center=float(center), radius=float(radius))

    # ------------------------------------------------------------------ support

    @property
    def support_min(self) -> float:
        """λ_min, the lower end of the support."""
        if self.kind is MeasureKind.ATOMIC:
            return self.points[0]
        if self.kind is MeasureKind.UNIFORM:
            return self.a
        return self.center - self.radius

    @property
    def support_max(self) -> float:
        """λ_max, the upper end of the support."""
        if self.kind is MeasureKind.ATOMIC:
            return self.points[-1]
        if self.kind is MeasureKind.UNIFORM:
            return self.b
        return self.center + self.radius

    @property
    def width(self) -> float:
        return self.support_max - self.support_min

    def contains(self, x: float) -> bool:
        """True when x lies in the closed convex hull of the support."""
        return self.support_min <= x <= self.support_max

    def reflect(self) -> "SpectralMeasure":
        """Image measure under λ ↦ −λ."""
        if self.kind is MeasureKind.ATOMIC:
            return SpectralMeasure.atomic([-p for p in self.points], self.weights)
        if self.kind is MeasureKind.UNIFORM:
            return SpectralMeasure.uniform(-self.b, -self.a)
        return SpectralMeasure.semicircle(-self.center, self.radius)

    # ------------------------------------------------------------------ integration

    def integrate(self, fn: Callable[[float], float], *, epsabs: float | None = None) -> float:
        """∫ fn dμ. Exact sum for atoms, adaptive Gauss-Kronrod quadrature otherwise.

        The semicircle is integrated in the angle variable λ = c + r·cos θ, where its
        density becomes (2/π)·sin²θ and the square-root edges disappear.
        """
        if self.kind is MeasureKind.ATOMIC:
            return math.fsum(w * fn(p) for p, w in zip(self.points, self.weights))

        epsabs = get_settings().quad_epsabs if epsabs is None else epsabs
        if self.kind is MeasureKind.UNIFORM:
            scale = 1.0 / (self.b - self.a)
            integrand, lo, hi = (lambda x: fn(x) * scale), self.a, self.b
        else:
            c, r = self.center, self.radius
            integrand = lambda theta: fn(c + r * math.cos(theta)) * (2.0 / math.pi) * math.sin(theta) ** 2  # noqa: E731
            lo, hi = 0.0, math.pi

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            value, abserr = integrate.quad(integrand, lo, hi, epsabs=epsabs, epsrel=epsabs, limit=400)
        if caught:
            logger.debug("Quadrature warning", kind=self.kind.value, abserr=abserr, warning=str(caught[0].message))
        return value

    def mean(self) -> float:
        if self.kind is MeasureKind.ATOMIC:
            return math.fsum(p * w for p, w in zip(self.points, self.weights))
        if self.kind is MeasureKind.UNIFORM:
            return 0.5 * (self.a + self.b)
        return self.center

    def moment(self, k: int) -> float:
        """∫ λ^k dμ(λ)."""
        if k < 0:
            raise DomainError("moment order must be nonnegative")
        if k == 0:
            return 1.0
        if self.kind is MeasureKind.UNIFORM:
            return (self.b ** (k + 1) - self.a ** (k + 1)) / ((k + 1) * (self.b - self.a))
        return self.integrate(lambda x: x**k)

    # ------------------------------------------------------------------ distribution function

    def cdf(self, x: np.ndarray | float) -> np.ndarray:
        """F(x) = μ((−∞, x]), vectorized."""
        x = np.asarray(x, dtype=float)
        if self.kind is MeasureKind.ATOMIC:
            cumulative = np.concatenate([[0.0], np.cumsum(self.weights)])
            idx = np.searchsorted(np.asarray(self.points), x, side="right")
            return np.minimum(cumulative[idx], 1.0)
        if self.kind is MeasureKind.UNIFORM:
            return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)
        u = np.clip((x - self.center) / self.radius, -1.0, 1.0)
        return 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / math.pi

    def partial_mean(self, x: np.ndarray | float) -> np.ndarray:
        """G(x) = ∫_{λ ≤ x} λ dμ(λ), vectorized."""
        x = np.asarray(x, dtype=float)
        if self.kind is MeasureKind.ATOMIC:
            cumulative = np.concatenate([[0.0], np.cumsum(np.asarray(self.points) * np.asarray(self.weights))])
            idx = np.searchsorted(np.asarray(self.points), x, side="right")
            return cumulative[idx]
        if self.kind is MeasureKind.UNIFORM:
            xc = np.clip(x, self.a, self.b)
            return (xc * xc - self.a * self.a) / (2.0 * (self.b - self.a))
        u = np.clip((x - self.center) / self.radius, -1.0, 1.0)
        tail = (2.0 * self.radius / (3.0 * math.pi)) * (1.0 - u * u) ** 1.5
        return self.center * self.cdf(x) - tail

    def quantile(self, p: float) -> float:
        """Generalized inverse F^{-1}(p) = inf{x : F(x) ≥ p} for p in (0, 1)."""
        # Local import keeps the module import graph acyclic
        from app.measures.sampling import quantile

        return quantile(self, p)

    def describe(self) -> dict:
        """JSON-ready descriptor matching the measure wire format."""
        if self.kind is MeasureKind.ATOMIC:
            return {"kind": "atomic", "points": list(self.points), "weights": list(self.weights)}
        if self.kind is MeasureKind.UNIFORM:
            return {"kind": "uniform", "a": self.a, "b": self.b}
        return {"kind": "semicircle", "center": self.center, "radius": self.radius}


@dataclass(frozen=True)
class Spectrum:
    """Finite list of real eigenvalues, stored in descending order."""

    values: tuple[float, ...]
    rank: int = field(init=False)

    def __post_init__(self) -> None:
        values = tuple(sorted((float(v) for v in self.values), reverse=True))
        if any(not math.isfinite(v) for v in values):
            raise DomainError("eigenvalues must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rank", sum(1 for v in values if v != 0.0))

    @classmethod
    def of(cls, values: Iterable[float]) -> "Spectrum":
        return cls(tuple(values))

    @classmethod
    def rank_one(cls, t: float, n: int) -> "Spectrum":
        """Spectrum of diag(t, 0, ..., 0) in dimension n."""
        if n < 1:
            raise DomainError("dimension must be at least 1")
        return cls((float(t),) + (0.0,) * (n - 1))

    @classmethod
    def padded(cls, nonzero: Iterable[float], n: int) -> "Spectrum":
        """Spectrum with the given entries completed by zeros up to dimension n."""
        nonzero = [float(v) for v in nonzero]
        if len(nonzero) > n:
            raise DomainError(f"{len(nonzero)} eigenvalues do not fit in dimension {n}")
        return cls(tuple(nonzero) + (0.0,) * (n - len(nonzero)))

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def total(self) -> float:
        """Tr of the diagonal matrix."""
        return math.fsum(self.values)

    def shifted(self, x: float) -> "Spectrum":
        """Spectrum of B + x·Id."""
        return Spectrum(tuple(v + x for v in self.values))

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(tuple(v * factor for v in self.values))

    def nonzero(self) -> tuple[float, ...]:
        return tuple(v for v in self.values if v != 0.0)

    def distinct_groups(self) -> list[tuple[float, int]]:
        """(value, multiplicity) for each distinct eigenvalue, descending."""
        groups: list[tuple[float, int]] = []
        for v in self.values:
            if groups and groups[-1][0] == v:
                groups[-1] = (v, groups[-1][1] + 1)
            else:
                groups.append((v, 1))
        return groups

    def min_relative_gap(self) -> float:
        """Smallest consecutive gap divided by the largest |value| (inf for n=1)."""
        if self.n < 2:
            return math.inf
        scale = max(abs(v) for v in self.values)
        if scale == 0.0:
            return 0.0
        return min(self.values[i] - self.values[i + 1] for i in range(self.n - 1)) / scale

    def is_constant(self) -> bool:
        return self.values[0] == self.values[-1]
