"""Bounded-Lipschitz distance between spectral measures."""

import json

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app.config import get_settings
from app.errors import SolverError
from app.measures.spectral import MeasureKind, SpectralMeasure


def _canonical_key(m: SpectralMeasure) -> str:
    return json.dumps(m.describe(), sort_keys=True)


def _union_grid(m1: SpectralMeasure, m2: SpectralMeasure, grid_size: int) -> np.ndarray:
    """Uniform grid over the union support, plus every atom and support endpoint."""
    lo = min(m1.support_min, m2.support_min)
    hi = max(m1.support_max, m2.support_max)
    pieces = [np.linspace(lo, hi, max(grid_size, 2))]
    for m in (m1, m2):
        if m.kind is MeasureKind.ATOMIC:
            pieces.append(np.asarray(m.points))
        else:
            pieces.append(np.asarray([m.support_min, m.support_max]))
    return np.unique(np.concatenate(pieces))


def node_masses(m: SpectralMeasure, grid: np.ndarray) -> np.ndarray:
    """Weights w_k with ∫ f dμ = Σ w_k f(x_k) for every f linear between grid nodes.

    Atoms must sit on grid nodes. For densities each cell [x_k, x_{k+1}] splits its
    mass between both nodes according to its first moment, which is exact for
    piecewise-linear f.
    """
    masses = np.zeros(len(grid))
    if m.kind is MeasureKind.ATOMIC:
        idx = np.searchsorted(grid, np.asarray(m.points))
        np.add.at(masses, idx, np.asarray(m.weights))
        return masses

    cell_mass = np.diff(m.cdf(grid))
    cell_moment = np.diff(m.partial_mean(grid))
    dx = np.diff(grid)
    masses[:-1] += (cell_mass * grid[1:] - cell_moment) / dx
    masses[1:] += (cell_moment - cell_mass * grid[:-1]) / dx
    return masses


def bl_supremum(m1: SpectralMeasure, m2: SpectralMeasure, grid_size: int | None = None) -> float:
    """sup{∫ f d(μ1 − μ2) : ‖f‖_∞ ≤ 1, Lip(f) ≤ 1} over piecewise-linear f on the grid."""
    settings = get_settings()
    grid_size = settings.bl_grid_size if grid_size is None else grid_size
    if _canonical_key(m2) < _canonical_key(m1):
        # f -> -f maps one problem onto the other; solving a single ordering keeps symmetry exact
        m1, m2 = m2, m1

    grid = _union_grid(m1, m2, grid_size)
    if len(grid) < 2:
        return 0.0
    signed = node_masses(m1, grid) - node_masses(m2, grid)
    dx = np.diff(grid)
    k = len(grid)
    difference = sparse.diags([-np.ones(k - 1), np.ones(k - 1)], [0, 1], shape=(k - 1, k), format="csr")
    a_ub = sparse.vstack([difference, -difference], format="csr")
    b_ub = np.concatenate([dx, dx])

    result = linprog(
        -signed,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=(-1.0, 1.0),
        method="highs",
        options={
            "primal_feasibility_tolerance": settings.lp_tolerance,
            "dual_feasibility_tolerance": settings.lp_tolerance,
        },
    )
    if not result.success:
        raise SolverError(f"bounded-Lipschitz linear program failed: {result.message}")
    return max(0.0, -float(result.fun))


def bl_distance(m1: SpectralMeasure, m2: SpectralMeasure, grid_size: int | None = None) -> float:
    """d(μ, μ') = |λ_max − λ'_max| + |λ_min − λ'_min| + bounded-Lipschitz supremum."""
    if m1 == m2:
        return 0.0
    edges = abs(m1.support_max - m2.support_max) + abs(m1.support_min - m2.support_min)
    return edges + bl_supremum(m1, m2, grid_size)
