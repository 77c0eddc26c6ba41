"""R-transform by functional inversion and the branch function v(t)."""

import math
from enum import Enum

from scipy.optimize import brentq

from app.config import get_settings
from app.errors import OutOfBandError, SolverError
from app.measures.spectral import SpectralMeasure
from app.transforms.beta import BetaClass
from app.transforms.hilbert import _hilbert_unchecked, hilbert_edges
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Halvings tried while walking toward the pole at z = λ_max
MAX_BRACKET_STEPS = 200


class Branch(str, Enum):
    """Which of the three cases of v(t) applies."""

    R = "R"
    UPPER = "upper"
    LOWER = "lower"


def _r_positive(m: SpectralMeasure, t: float) -> float:
    """R(t) for 0 < t ≤ H_max, solved for w = R(t) in [λ_min, λ_max]."""
    edges = hilbert_edges(m)
    hi_edge, lo_edge = m.support_max, m.support_min
    inv = 1.0 / t
    if t == edges.h_max:
        return hi_edge - inv

    def residual(w: float) -> float:
        return _hilbert_unchecked(m, inv + w) - t

    upper = hi_edge
    if residual(upper) == 0.0:
        return upper

    pole = hi_edge - inv
    if inv + lo_edge > hi_edge:
        # z = 1/t + λ_min stays right of the support
        lower = lo_edge
    elif math.isfinite(edges.h_max):
        # H(λ_max) = H_max > t, the edge itself closes the bracket
        lower = max(pole, lo_edge)
    else:
        # H diverges at z = λ_max: walk off the pole until the residual turns positive
        pole = max(pole, lo_edge)
        step = min(inv, hi_edge - pole)
        for _ in range(MAX_BRACKET_STEPS):
            step *= 0.5
            if inv + (pole + step) <= hi_edge:
                value = max(hi_edge - inv, lo_edge)
                logger.debug("R(t) rounds onto the pole", t=t, value=value)
                return value
            if residual(pole + step) > 0.0:
                lower = pole + step
                break
        else:
            raise SolverError(f"could not bracket R({t}) near the support edge")

    if lower >= upper:
        return upper
    # t within rounding of H_max leaves no sign change
    if residual(lower) <= 0.0:
        return lower
    return brentq(residual, lower, upper, xtol=get_settings().root_xtol)


def r_transform(m: SpectralMeasure, t: float) -> float:
    """Voiculescu's R-transform: the R(t) with H(1/t + R(t)) = t.

    Defined for H_min ≤ t ≤ H_max; R(0) is the mean of ``m``. Negative t is
    reduced to positive t on the reflected measure.
    """
    if t == 0.0:
        return m.mean()
    edges = hilbert_edges(m)
    if not edges.contains(t):
        raise OutOfBandError(f"t={t} outside the Hilbert band [{edges.h_min}, {edges.h_max}]")
    if t > 0.0:
        return _r_positive(m, t)
    return -_r_positive(m.reflect(), -t)


def classify_branch(m: SpectralMeasure, t: float, beta: BetaClass) -> Branch:
    """Branch of v used at t, decided on s = 2t/β."""
    if t == 0.0:
        return Branch.R
    s = 2.0 * t / BetaClass.parse(beta).value
    edges = hilbert_edges(m)
    if s > edges.h_max:
        return Branch.UPPER
    if s < edges.h_min:
        return Branch.LOWER
    return Branch.R


def v_branch(m: SpectralMeasure, t: float, beta: BetaClass) -> float:
    """Three-case branch function.

    v(t) = R(2t/β) inside the band, λ_max − β/(2t) above it and λ_min − β/(2t)
    below it. v(0) is the mean of ``m``.
    """
    beta = BetaClass.parse(beta)
    branch = classify_branch(m, t, beta)
    if branch is Branch.UPPER:
        return m.support_max - beta.value / (2.0 * t)
    if branch is Branch.LOWER:
        return m.support_min - beta.value / (2.0 * t)
    return r_transform(m, 2.0 * t / beta.value)
