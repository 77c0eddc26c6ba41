"""Exact evaluation of the unitary (β=2) spherical integral.

All paths return a :class:`LogScalar`. The double-precision determinant is
used for small spectra with well separated eigenvalues; the multiprecision
paths cover repeated eigenvalues and large dimensions, where divided
differences of λ ↦ e^{Naλ} cancel catastrophically.
"""

import math
from collections.abc import Callable

import numpy as np
from mpmath import MPContext
from scipy.special import gammaln, logsumexp
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from app.config import get_settings
from app.errors import DegeneracyError, DomainError, PrecisionError
from app.hciz.logscalar import LogScalar
from app.measures.spectral import Spectrum
from app.utils.logging import get_logger

logger = get_logger(__name__)

MIN_PRECISION_BITS = 53
# Bits kept on top of the estimated cancellation
GUARD_BITS = 64
# Largest accepted |log I| mismatch between the working and the verification pass
VERIFY_TOL = 1e-9


def log_normalization(n: int) -> float:
    """log c_N with c_N = ∏_{p=1}^{N-1} p! / N^{N(N-1)/2}, fixed by I(0, B) = 1."""
    if n < 1:
        raise DomainError("dimension must be at least 1")
    return math.fsum(gammaln(p + 1) for p in range(1, n)) - 0.5 * n * (n - 1) * math.log(n)


def vandermonde_log(s: Spectrum) -> LogScalar:
    """Δ(s) = ∏_{i<j} (s_i − s_j); zero as soon as two values coincide."""
    values = s.values
    gaps = [values[i] - values[j] for i in range(len(values)) for j in range(i + 1, len(values))]
    if any(g == 0.0 for g in gaps):
        return LogScalar.zero()
    # Descending storage makes every factor positive
    return LogScalar(1, math.fsum(math.log(g) for g in gaps))


def _check_pair(a: Spectrum, b: Spectrum) -> int:
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: A has {a.n} eigenvalues, B has {b.n}")
    if a.n == 0:
        raise DomainError("spectra must be nonempty")
    return a.n


def _constant_case(a: Spectrum, b: Spectrum) -> LogScalar | None:
    """Closed form when A or B is a multiple of the identity."""
    n = a.n
    if a.is_constant():
        return LogScalar.exp(n * a.values[0] * b.total())
    if b.is_constant():
        return LogScalar.exp(n * b.values[0] * a.total())
    return None


def _logdet_full_pivot(matrix: np.ndarray) -> tuple[int, float]:
    """Signed log-determinant by Gaussian elimination with complete pivoting."""
    work = np.array(matrix, dtype=float)
    n = work.shape[0]
    sign, log_abs = 1, 0.0
    for k in range(n):
        block = np.abs(work[k:, k:])
        i, j = np.unravel_index(np.argmax(block), block.shape)
        i, j = int(i) + k, int(j) + k
        if work[i, j] == 0.0:
            return 0, -math.inf
        if i != k:
            work[[k, i]] = work[[i, k]]
            sign = -sign
        if j != k:
            work[:, [k, j]] = work[:, [j, k]]
            sign = -sign
        pivot = work[k, k]
        if pivot < 0:
            sign = -sign
        log_abs += math.log(abs(pivot))
        work[k + 1 :, k:] -= np.outer(work[k + 1 :, k] / pivot, work[k, k:])
    return sign, log_abs


def hciz_det(a: Spectrum, b: Spectrum) -> LogScalar:
    """Harish-Chandra formula c_N·det(e^{N a_i b_j}) / (Δ(a)Δ(b)) in double precision.

    Rows and columns are rescaled by their largest exponent before the
    elimination so that no entry overflows.

    Raises:
        DegeneracyError: when a relative eigenvalue gap is below ``degeneracy_rel_gap``.
        PrecisionError: when the determinant comes out non-positive.
    """
    n = _check_pair(a, b)
    threshold = get_settings().degeneracy_rel_gap
    for name, s in (("A", a), ("B", b)):
        if s.min_relative_gap() < threshold:
            raise DegeneracyError(
                f"{name} has a relative eigenvalue gap {s.min_relative_gap():.3g} below {threshold}; "
                "use hciz_confluent"
            )

    exponents = n * np.outer(a.as_array(), b.as_array())
    row_shift = exponents.max(axis=1)
    shifted = exponents - row_shift[:, None]
    col_shift = shifted.max(axis=0)
    sign, log_det = _logdet_full_pivot(np.exp(shifted - col_shift[None, :]))
    if sign <= 0:
        raise PrecisionError("kernel determinant lost its sign in double precision", precision_bits=53)

    log_abs = (
        log_det
        + math.fsum(row_shift)
        + math.fsum(col_shift)
        + log_normalization(n)
        - vandermonde_log(a).log_abs
        - vandermonde_log(b).log_abs
    )
    return LogScalar(1, log_abs)


def _work_bits(requested: int, log_upper: float, log_lower: float) -> int:
    """Working precision covering the cancellation between a magnitude bound and a value bound."""
    settings = get_settings()
    cancellation = max(0.0, (log_upper - log_lower) / math.log(2.0))
    bits = max(requested, math.ceil(cancellation) + GUARD_BITS)
    if bits > settings.max_precision_bits:
        raise PrecisionError(
            f"evaluation needs about {bits} bits, above max_precision_bits={settings.max_precision_bits}",
            precision_bits=bits,
        )
    return bits


def _to_logscalar(ctx: MPContext, value) -> LogScalar:
    if value == 0:
        return LogScalar.zero()
    return LogScalar(1 if value > 0 else -1, float(ctx.log(abs(value))))


def _verified(evaluate: Callable[[int], LogScalar], bits: int, label: str) -> LogScalar:
    """Run ``evaluate`` at ``bits`` and again at verify_factor·bits; both must agree."""
    factor = get_settings().verify_factor
    value = evaluate(bits)
    check = evaluate(bits * factor)
    if value.sign != 1 or check.sign != 1 or abs(value.log_abs - check.log_abs) > VERIFY_TOL:
        raise PrecisionError(
            f"{label} evaluation at {bits} bits disagrees with {bits * factor} bits "
            f"({value.as_dict()} vs {check.as_dict()})",
            precision_bits=bits,
        )
    return check


def hciz_rank_one(t: float, b: Spectrum, precision_bits: int | None = None) -> LogScalar:
    """I_N(diag(t, 0, ..., 0), B) = (N−1)!·(Nt)^{-(N−1)}·Σ_j e^{N t b_j} / ∏_{k≠j}(b_j − b_k).

    The alternating sum is evaluated in multiprecision; the working precision
    is sized from the largest term against the lower bound I ≥ e^{t·Tr B}.
    """
    requested = get_settings().precision_bits if precision_bits is None else precision_bits
    if requested < MIN_PRECISION_BITS:
        raise DomainError(f"precision_bits must be at least {MIN_PRECISION_BITS}, got {requested}")
    n = b.n
    if n == 0:
        raise DomainError("spectra must be nonempty")
    if t == 0.0:
        return LogScalar.one()
    if len(b.distinct_groups()) != n:
        raise DegeneracyError("rank-one formula needs distinct eigenvalues of B; use hciz_confluent")
    if n == 1:
        return LogScalar.exp(t * b.values[0])

    values = b.values
    log_terms = [
        n * t * bj - math.fsum(math.log(abs(bj - bk)) for k, bk in enumerate(values) if k != j)
        for j, bj in enumerate(values)
    ]
    log_lower = t * b.total() + (n - 1) * math.log(n * abs(t)) - gammaln(n)
    bits = _work_bits(requested, max(log_terms), log_lower)

    def evaluate(prec: int) -> LogScalar:
        ctx = MPContext()
        ctx.prec = prec
        bs = [ctx.mpf(v) for v in values]
        tt = ctx.mpf(t)
        terms = [
            ctx.exp(n * tt * bj) / ctx.fprod(bj - bk for k, bk in enumerate(bs) if k != j)
            for j, bj in enumerate(bs)
        ]
        value = ctx.fsum(terms) * ctx.factorial(n - 1) / (n * tt) ** (n - 1)
        return _to_logscalar(ctx, value)

    return _verified(evaluate, bits, "rank-one")


def _confluent_entry(ctx: MPContext, n: int, alpha, k: int, beta, l: int, shift):
    """∂_α^k ∂_β^l e^{Nαβ} / (k! l!), times e^{−shift}."""
    total = ctx.fsum(
        ctx.mpf(n) ** (k + l - r)
        * alpha ** (l - r)
        * beta ** (k - r)
        / (ctx.factorial(r) * ctx.factorial(k - r) * ctx.factorial(l - r))
        for r in range(min(k, l) + 1)
    )
    return ctx.exp(n * alpha * beta - shift) * total


def _mp_det(ctx: MPContext, matrix: list[list]) -> object:
    """Determinant by partial-pivot elimination, with no singularity cutoff."""
    rows = [list(row) for row in matrix]
    n = len(rows)
    det = ctx.one
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(rows[i][k]))
        if rows[p][k] == 0:
            return ctx.zero
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            det = -det
        pivot = rows[k][k]
        det *= pivot
        for i in range(k + 1, n):
            factor = rows[i][k] / pivot
            if factor:
                rows[i][k:] = [x - factor * y for x, y in zip(rows[i][k:], rows[k][k:])]
    return det


def _confluent_vandermonde_log(groups: list[tuple[float, int]]) -> float:
    """log |∏_{p<q} (α_p − α_q)^{m_p m_q}|."""
    return math.fsum(
        mp * mq * math.log(abs(ap - aq))
        for i, (ap, mp) in enumerate(groups)
        for aq, mq in groups[i + 1 :]
    )


def hciz_confluent(a: Spectrum, b: Spectrum, precision_bits: int | None = None) -> LogScalar:
    """Confluent Harish-Chandra formula for spectra with repeated eigenvalues.

    A value of multiplicity m contributes the derivative rows of orders
    0, ..., m−1 (divided by k!), so the formula stays valid when eigenvalues
    collide, e.g. the N−M zeros of a small-rank A. The determinant runs in
    multiprecision at a precision sized from the Hadamard bound against the
    lower bound log I ≥ Tr A·Tr B, then again at twice that precision.

    Args:
        a: Spectrum of A.
        b: Spectrum of B.
        precision_bits: Minimum working precision (default from settings).

    Returns:
        I_N^(2)(A, B) as a LogScalar.
    """
    n = _check_pair(a, b)
    requested = get_settings().precision_bits if precision_bits is None else precision_bits
    if requested < MIN_PRECISION_BITS:
        raise DomainError(f"precision_bits must be at least {MIN_PRECISION_BITS}, got {requested}")
    closed = _constant_case(a, b)
    if closed is not None:
        return closed

    groups_a, groups_b = a.distinct_groups(), b.distinct_groups()
    rows = [(alpha, k) for alpha, mult in groups_a for k in range(mult)]
    cols = [(beta, l) for beta, mult in groups_b for l in range(mult)]

    exponents = n * np.outer([alpha for alpha, _ in rows], [beta for beta, _ in cols])
    row_shift = exponents.max(axis=1)
    col_shift = (exponents - row_shift[:, None]).max(axis=0)
    scale_log = math.fsum(row_shift) + math.fsum(col_shift)

    def matrix(ctx: MPContext) -> list[list]:
        return [
            [
                _confluent_entry(ctx, n, ctx.mpf(alpha), k, ctx.mpf(beta), l, ctx.mpf(row_shift[i]) + ctx.mpf(col_shift[j]))
                for j, (beta, l) in enumerate(cols)
            ]
            for i, (alpha, k) in enumerate(rows)
        ]

    # Magnitudes only, so a cheap context is enough for the estimate
    coarse = MPContext()
    coarse.prec = MIN_PRECISION_BITS
    log_abs_entries = np.array(
        [[float(coarse.log(abs(x))) if x != 0 else -math.inf for x in row] for row in matrix(coarse)]
    )
    log_hadamard = math.fsum(0.5 * logsumexp(2.0 * row) for row in log_abs_entries)
    log_delta = _confluent_vandermonde_log(groups_a) + _confluent_vandermonde_log(groups_b)
    log_c = log_normalization(n)
    log_det_lower = a.total() * b.total() + log_delta - log_c - scale_log
    bits = _work_bits(requested, log_hadamard, log_det_lower)
    logger.debug("Confluent evaluation", n=n, groups_a=len(groups_a), groups_b=len(groups_b), bits=bits)

    def evaluate(prec: int) -> LogScalar:
        ctx = MPContext()
        ctx.prec = prec
        det = _mp_det(ctx, matrix(ctx))
        if det == 0:
            return LogScalar.zero()
        return LogScalar(1, float(ctx.log(abs(det))) + scale_log + log_c - log_delta)

    return _verified(evaluate, bits, "confluent")


def _rank_one_shape(s: Spectrum) -> float | None:
    """The nonzero eigenvalue t when s = diag(t, 0, ..., 0), else None."""
    if s.rank != 1 or s.n < 2:
        return None
    return s.nonzero()[0]


def _confluent_escalating(a: Spectrum, b: Spectrum, precision_bits: int) -> LogScalar:
    settings = get_settings()
    for attempt in Retrying(
        retry=retry_if_exception_type(PrecisionError),
        stop=stop_after_attempt(settings.precision_attempts),
        reraise=True,
    ):
        with attempt:
            number = attempt.retry_state.attempt_number
            bits = min(precision_bits * 2 ** (number - 1), settings.max_precision_bits)
            if number > 1:
                logger.info("Escalating precision", attempt=number, precision_bits=bits)
            return hciz_confluent(a, b, bits)
    raise PrecisionError("precision escalation exhausted", precision_bits=precision_bits)


def hciz_log(a: Spectrum, b: Spectrum, precision_bits: int | None = None) -> LogScalar:
    """Evaluate I_N^(2)(A, B) by the cheapest exact path that applies."""
    n = _check_pair(a, b)
    settings = get_settings()
    bits = settings.precision_bits if precision_bits is None else precision_bits

    closed = _constant_case(a, b)
    if closed is not None:
        return closed

    threshold = settings.degeneracy_rel_gap
    a_distinct = a.min_relative_gap() >= threshold
    b_distinct = b.min_relative_gap() >= threshold
    if a_distinct and b_distinct and n <= settings.det_max_dim:
        try:
            return hciz_det(a, b)
        except PrecisionError:
            logger.info("Double-precision determinant rejected, switching to multiprecision", n=n)

    t = _rank_one_shape(a)
    if t is not None and len(b.distinct_groups()) == n:
        return hciz_rank_one(t, b, bits)
    s = _rank_one_shape(b)
    if s is not None and len(a.distinct_groups()) == n:
        return hciz_rank_one(s, a, bits)

    logger.debug("Routing to confluent evaluation", n=n, a_distinct=a_distinct, b_distinct=b_distinct)
    return _confluent_escalating(a, b, bits)
