"""The limit function f^(β) of the rank-one spherical integral."""

import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass

from scipy import integrate

from app.config import get_settings
from app.errors import HCIZError, OutOfBandError
from app.measures.spectral import SpectralMeasure
from app.transforms.beta import BetaClass
from app.transforms.hilbert import hilbert_edges
from app.transforms.rtransform import Branch, classify_branch, r_transform, v_branch
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Rounding slack on the log argument, which vanishes at a saturated edge
LOG_ARGUMENT_TOL = 1e-12
# Floor keeping log finite on quadrature nodes that round onto the edge
LOG_ARGUMENT_FLOOR = 1e-300


def _f_real(m: SpectralMeasure, t: float, beta: BetaClass) -> float:
    """t·v − (β/2)∫ log(1 + (2/β)t·v − (2/β)t·λ) dμ(λ) for β ∈ {1, 2}."""
    if t == 0.0:
        return 0.0
    s = 2.0 * t / beta.value
    v = v_branch(m, t, beta)

    # The argument is affine in λ, so its minimum over the support sits at an end
    edge = m.support_max if s > 0 else m.support_min
    lowest = 1.0 + s * (v - edge)
    scale = max(1.0, abs(s) * max(abs(m.support_max), abs(m.support_min), abs(v)))
    # Zero is reached only on a saturated branch, at the edge itself
    if lowest < -LOG_ARGUMENT_TOL * scale:
        raise HCIZError(f"log argument {lowest!r} is not positive at t={t}, beta={beta.value}")

    def log_term(lam: float) -> float:
        return math.log(max(1.0 + s * (v - lam), LOG_ARGUMENT_FLOOR))

    return t * v - beta.half * m.integrate(log_term)


def f_beta(m: SpectralMeasure, t: float, beta: BetaClass) -> float:
    """f^(β)_μ(t), with f^(4)(t) = −f^(2)(−t)."""
    beta = BetaClass.parse(beta)
    if beta is BetaClass.SYMPLECTIC:
        return -_f_real(m, -t, BetaClass.UNITARY)
    return _f_real(m, t, beta)


def f_beta_integral_form(m: SpectralMeasure, t: float, beta: BetaClass) -> float:
    """(β/2)·∫_0^{2t/β} R(s) ds, valid while 2t/β stays in the Hilbert band.

    Independent of :func:`f_beta`: it only uses the R-transform, so the two
    agree exactly when f' = v holds in the band.
    """
    beta = BetaClass.parse(beta)
    if beta is BetaClass.SYMPLECTIC:
        return -f_beta_integral_form(m, -t, BetaClass.UNITARY)
    upper = 2.0 * t / beta.value
    edges = hilbert_edges(m)
    if not edges.contains(upper):
        raise OutOfBandError(f"2t/beta={upper} outside the Hilbert band [{edges.h_min}, {edges.h_max}]")
    if upper == 0.0:
        return 0.0
    epsabs = get_settings().quad_epsabs
    value, abserr = integrate.quad(lambda s: r_transform(m, s), 0.0, upper, epsabs=epsabs, epsrel=epsabs, limit=200)
    logger.debug("Integral form evaluated", t=t, beta=beta.value, abserr=abserr)
    return beta.half * value


@dataclass(frozen=True)
class TransformPoint:
    """One row of a transform table."""

    t: float
    v: float
    f_beta: float
    branch: Branch

    def as_dict(self) -> dict:
        row = asdict(self)
        row["branch"] = self.branch.value
        return row


def transform_table(m: SpectralMeasure, ts: Iterable[float], beta: BetaClass) -> list[TransformPoint]:
    """v, f^(β) and the active branch at every t of a grid."""
    beta = BetaClass.parse(beta)
    rows = []
    for t in ts:
        t = float(t)
        if beta is BetaClass.SYMPLECTIC:
            # f^(4)(t) = −f^(2)(−t) has derivative v^(2)(−t)
            v, branch = v_branch(m, -t, BetaClass.UNITARY), classify_branch(m, -t, BetaClass.UNITARY)
        else:
            v, branch = v_branch(m, t, beta), classify_branch(m, t, beta)
        rows.append(TransformPoint(t=t, v=v, f_beta=f_beta(m, t, beta), branch=branch))
    return rows
