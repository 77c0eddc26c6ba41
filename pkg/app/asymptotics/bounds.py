"""Recursive peeling bounds and the interlacing lemma they rest on."""

import numpy as np

from app.errors import DomainError
from app.hciz.exact import hciz_log
from app.hciz.logscalar import LogScalar
from app.hciz.montecarlo import McParams, hciz_mc_estimate
from app.measures.sampling import Side, shift_nonnegative, trim_spectrum
from app.measures.spectral import Spectrum
from app.transforms.beta import BetaClass
from app.utils.logging import get_logger

logger = get_logger(__name__)


def _rank_one_factor(
    weight: float,
    trimmed: Spectrum,
    beta: BetaClass,
    mc_params: McParams,
    step: int,
    precision_bits: int | None,
) -> LogScalar:
    """I_d(diag(weight, 0, ..., 0), trimmed) in the trimmed dimension d."""
    a = Spectrum.rank_one(weight, trimmed.n)
    if beta is BetaClass.UNITARY:
        return hciz_log(a, trimmed, precision_bits)
    estimate = hciz_mc_estimate(
        a,
        trimmed,
        beta,
        n_samples=mc_params.n_samples,
        seed=mc_params.seed + step,
        chunks=mc_params.chunks,
    )
    return estimate.log_mean


def sandwich_bounds(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass = BetaClass.UNITARY,
    mc_params: McParams | None = None,
    precision_bits: int | None = None,
) -> tuple[LogScalar, LogScalar]:
    """Lower and upper products of peeled rank-one integrals around I_N^(β)(A, B).

    Step i integrates the i-th column of U against the eigenvalue a_i in
    dimension d = N + 1 − i (N + 2 − 2i for β=4, which peels a quaternionic
    coordinate), at the inflated weight N·a_i/d. The lower factor sees the
    d smallest eigenvalues of B, the upper one the d largest.

    B is first translated to be nonnegative; the exact correction
    log I(A, B) = log I(A, B + x) − N·x·Tr A is applied to both bounds.

    Raises:
        DomainError: when A has a negative eigenvalue.
    """
    beta = BetaClass.parse(beta)
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: A has {a.n} eigenvalues, B has {b.n}")
    if any(v < 0 for v in a.values):
        raise DomainError("sandwich bounds need A >= 0; translate A (and B) first")
    mc_params = mc_params or McParams()
    n = a.n
    block = 2 if beta is BetaClass.SYMPLECTIC else 1
    if block == 2 and n % 2:
        raise DomainError(f"symplectic bounds need an even dimension, got {n}")

    weights = a.nonzero()
    if block * (len(weights) - 1) >= n:
        raise DomainError(f"rank {len(weights)} cannot be peeled {block} dimensions at a time from N={n}")

    shifted, x = shift_nonnegative(b)
    if x:
        logger.info("Translated B to be nonnegative", shift=x, n=n)

    lower, upper = LogScalar.one(), LogScalar.one()
    for i, a_i in enumerate(weights, start=1):
        low_b = trim_spectrum(shifted, i, Side.LOWER, block)
        high_b = trim_spectrum(shifted, i, Side.UPPER, block)
        weight = n * a_i / low_b.n
        lower = lower * _rank_one_factor(weight, low_b, beta, mc_params, i, precision_bits)
        upper = upper * _rank_one_factor(weight, high_b, beta, mc_params, i, precision_bits)

    correction = LogScalar.exp(-n * x * a.total())
    return lower * correction, upper * correction


def compress_spectrum(h: np.ndarray) -> Spectrum:
    """Eigenvalues of ΠHΠ on the range of Π, for Π the projector dropping the first coordinate."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
        raise DomainError(f"expected a square matrix of size at least 2, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise DomainError("matrix is not Hermitian")
    return Spectrum(tuple(np.linalg.eigvalsh(h[1:, 1:])))


def interlaces(outer: Spectrum, inner: Spectrum, tol: float = 1e-10) -> bool:
    """outer_1 ≥ inner_1 ≥ outer_2 ≥ ... ≥ inner_{N−1} ≥ outer_N, up to ``tol``."""
    if inner.n != outer.n - 1:
        raise DomainError(f"inner spectrum must have {outer.n - 1} values, got {inner.n}")
    return all(
        outer.values[i] + tol >= inner.values[i] >= outer.values[i + 1] - tol for i in range(inner.n)
    )
