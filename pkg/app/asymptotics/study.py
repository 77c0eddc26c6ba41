"""Finite-N studies of the small-rank asymptotics.

Both sides of the small-rank limit are computed at a sequence of dimensions
(or rank fractions), together with the peeling bounds, and collected in a
:class:`ConvergenceReport`.
"""

import csv
import io
import json
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from app.asymptotics.bounds import sandwich_bounds
from app.config import get_settings
from app.errors import DomainError, ResolutionError, UnsupportedMethodError
from app.hciz.exact import hciz_log
from app.hciz.logscalar import LogScalar
from app.hciz.montecarlo import McParams, hciz_mc_estimate
from app.measures.sampling import Placement, sample_spectrum
from app.measures.spectral import SpectralMeasure, Spectrum
from app.transforms.beta import BetaClass
from app.transforms.limit import f_beta
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Absolute slack on log-values when checking the bounds of exact rows
SANDWICH_TOL = 1e-9
# Standard errors allowed on Monte Carlo rows
MC_SIGMAS = 3.0


class Method(str, Enum):
    EXACT = "exact"
    MC = "mc"


class PrefactorMode(str, Enum):
    """Normalization of the f-average: plain (1/M)Σf, or with the extra β/2."""

    NONE = "none"
    HALF_BETA = "half_beta"


def _ceil_root(n: int, k: int) -> int:
    """Smallest r ≥ 1 with r^k ≥ n, in exact integer arithmetic."""
    r = max(1, round(n ** (1.0 / k)))
    while r**k < n:
        r += 1
    while r > 1 and (r - 1) ** k >= n:
        r -= 1
    return r


class RankRule(str, Enum):
    """How the rank M(N) of A_N grows with N; every rule is o(N)."""

    ONE = "one"
    CBRT = "cbrt"
    SQRT = "sqrt"
    N_OVER_LOG = "n_over_log"

    def rank(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"dimension must be positive, got {n}")
        if self is RankRule.ONE:
            return 1
        if self is RankRule.CBRT:
            return _ceil_root(n, 3)
        if self is RankRule.SQRT:
            return _ceil_root(n, 2)
        if n < 3:
            return 1
        return min(n, math.ceil(n / math.log(n)))


def resolve_rank(rule: "RankRule | int | str", n: int) -> int:
    """M(N) from a named rule or a fixed integer rank."""
    if isinstance(rule, int) and not isinstance(rule, bool):
        if not 1 <= rule <= n:
            raise DomainError(f"fixed rank {rule} outside [1, {n}]")
        return rule
    try:
        return RankRule(rule).rank(n)
    except ValueError as exc:
        raise DomainError(f"unknown rank rule {rule!r}") from exc


@dataclass(frozen=True)
class ReportRow:
    """One dimension (or rank fraction) of a study."""

    n: int
    m: int
    lhs: float
    rhs: float
    gap: float
    method: Method
    log_value: LogScalar
    lower_log: LogScalar | None = None
    upper_log: LogScalar | None = None
    stderr: float | None = None
    fraction: float | None = None
    # lhs = scale·log I
    scale: float = 1.0

    @property
    def scaled_stderr(self) -> float | None:
        """Standard error of lhs."""
        return None if self.stderr is None else self.stderr * self.scale

    def sandwich_holds(self) -> bool | None:
        """lower ≤ log I ≤ upper within solver tolerance; None without bounds."""
        if self.lower_log is None or self.upper_log is None:
            return None
        tol = SANDWICH_TOL if self.method is Method.EXACT else MC_SIGMAS * (self.stderr or 0.0) + SANDWICH_TOL
        value = self.log_value.log_abs
        return self.lower_log.log_abs - tol <= value <= self.upper_log.log_abs + tol


CSV_COLUMNS = ["n", "m", "lhs", "rhs", "gap", "lower", "upper", "method", "stderr"]


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


@dataclass
class ConvergenceReport:
    """Rows of a study, sorted by dimension, with the parameters that produced them."""

    rows: list[ReportRow]
    metadata: dict = field(default_factory=dict)

    @property
    def gaps(self) -> list[float]:
        return [row.gap for row in self.rows]

    def summary(self) -> dict:
        gaps = self.gaps
        return {
            "max_gap": max(gaps) if gaps else None,
            "final_gap": gaps[-1] if gaps else None,
            "monotone": all(later <= earlier for earlier, later in zip(gaps, gaps[1:])),
            "improved": len(gaps) > 1 and gaps[-1] < gaps[0],
            "sandwich_violations": sum(1 for row in self.rows if row.sandwich_holds() is False),
        }

    def to_csv(self, config: dict | None = None) -> str:
        """CSV text; a ``# {"config": ...}`` comment line leads when ``config`` is given."""
        output = io.StringIO()
        if config is not None:
            output.write("# " + json.dumps({"config": config}, sort_keys=True) + "\n")
        with_fraction = any(row.fraction is not None for row in self.rows)
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow((["a"] if with_fraction else []) + CSV_COLUMNS)
        for row in self.rows:
            cells = [
                str(row.n),
                str(row.m),
                _cell(row.lhs),
                _cell(row.rhs),
                _cell(row.gap),
                _cell(row.lower_log.log_abs if row.lower_log else None),
                _cell(row.upper_log.log_abs if row.upper_log else None),
                row.method.value,
                _cell(row.scaled_stderr),
            ]
            writer.writerow(([_cell(row.fraction)] if with_fraction else []) + cells)
        return output.getvalue()


def _log_integral(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass,
    method: Method,
    mc_params: McParams | None,
    precision_bits: int | None,
) -> tuple[LogScalar, float | None]:
    """log I_N^(β)(A, B) and, for Monte Carlo, its standard error."""
    if method is Method.EXACT:
        if beta is not BetaClass.UNITARY:
            raise UnsupportedMethodError(f"exact evaluation exists for beta=2 only, got beta={beta.value}")
        return hciz_log(a, b, precision_bits), None
    params = mc_params or McParams()
    estimate = hciz_mc_estimate(a, b, beta, params.n_samples, params.seed, params.chunks)
    return estimate.log_mean, estimate.stderr_log


def _scaled_log(
    a: Spectrum,
    b: Spectrum,
    rank: int,
    beta: BetaClass,
    method: Method,
    mc_params: McParams | None,
    precision_bits: int | None,
) -> tuple[float, LogScalar, float | None]:
    """(1/(N·M))·log I with the log-value and standard error it came from."""
    value, stderr = _log_integral(a, b, beta, method, mc_params, precision_bits)
    return value.log / (a.n * rank), value, stderr


def lhs_scaled_log(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass = BetaClass.UNITARY,
    method: Method = Method.EXACT,
    mc_params: McParams | None = None,
    precision_bits: int | None = None,
) -> float:
    """(1/(N·M))·log I_N^(β)(A, B) with M the rank of A."""
    beta, method = BetaClass.parse(beta), Method(method)
    if a.rank < 1:
        raise DomainError("A must have rank at least 1")
    return _scaled_log(a, b, a.rank, beta, method, mc_params, precision_bits)[0]


def rhs_f_average(
    a: Spectrum,
    m: SpectralMeasure,
    beta: BetaClass = BetaClass.UNITARY,
    prefactor_mode: PrefactorMode = PrefactorMode.NONE,
) -> float:
    """(1/M)·Σ_i f^(β)(a_i) over the nonzero eigenvalues; ``half_beta`` mode multiplies by β/2."""
    beta, prefactor_mode = BetaClass.parse(beta), PrefactorMode(prefactor_mode)
    values = a.nonzero()
    if not values:
        raise DomainError("A must have rank at least 1")
    average = math.fsum(f_beta(m, v, beta) for v in values) / len(values)
    if prefactor_mode is PrefactorMode.HALF_BETA:
        return beta.half * average
    return average


def _bounds_for(
    a: Spectrum, b: Spectrum, beta: BetaClass, mc_params: McParams | None, precision_bits: int | None
) -> tuple[LogScalar | None, LogScalar | None]:
    """Peeling bounds for one row; (None, None) when A is zero, of mixed sign or too large to peel."""
    if a.rank == 0:
        return None, None
    try:
        return _signed_bounds(a, b, beta, mc_params, precision_bits)
    except DomainError as exc:
        logger.debug("No peeling bounds for row", n=a.n, m=a.rank, reason=str(exc))
        return None, None


def _signed_bounds(
    a: Spectrum, b: Spectrum, beta: BetaClass, mc_params: McParams | None, precision_bits: int | None
) -> tuple[LogScalar, LogScalar]:
    if all(v <= 0 for v in a.values):
        # I(A, B) = I(−A, −B), which brings A back to the nonnegative case
        return sandwich_bounds(a.scaled(-1.0), b.scaled(-1.0), beta, mc_params, precision_bits)
    return sandwich_bounds(a, b, beta, mc_params, precision_bits)


def convergence_study(
    m: SpectralMeasure,
    rank_rule: "RankRule | int | str",
    t: float,
    dims: Sequence[int],
    beta: BetaClass = BetaClass.UNITARY,
    method: Method = Method.EXACT,
    seed: int = 0,
    mc_params: McParams | None = None,
    prefactor_mode: PrefactorMode = PrefactorMode.NONE,
    placement: Placement = Placement.QUANTILE,
    precision_bits: int | None = None,
) -> ConvergenceReport:
    """Compare (1/(NM))·log I_N(A_N, B_N) with (1/M)·Σ f(a_i) along ``dims``.

    A_N carries M(N) eigenvalues equal to ``t``; B_N is realized from ``m``.
    Rows are independent and are computed on ``settings.threads`` workers,
    then assembled in increasing N.
    """
    beta, method = BetaClass.parse(beta), Method(method)
    if not dims:
        raise DomainError("at least one dimension is required")
    params = mc_params or McParams(seed=seed)

    def row_for(n: int) -> ReportRow:
        rank = resolve_rank(rank_rule, n)
        a = Spectrum.padded([t] * rank, n)
        b = sample_spectrum(m, n, seed, placement)
        lhs, log_value, stderr = _scaled_log(a, b, rank, beta, method, params, precision_bits)
        # t = 0 gives A = 0, where both sides vanish
        rhs = rhs_f_average(a, m, beta, prefactor_mode) if a.rank else 0.0
        lower, upper = _bounds_for(a, b, beta, params, precision_bits)
        row = ReportRow(
            n=n,
            m=rank,
            lhs=lhs,
            rhs=rhs,
            gap=abs(lhs - rhs),
            method=method,
            log_value=log_value,
            lower_log=lower,
            upper_log=upper,
            stderr=stderr,
            scale=1.0 / (n * rank),
        )
        logger.info("Study row", n=n, m=rank, lhs=lhs, rhs=rhs, gap=row.gap)
        return row

    with ThreadPoolExecutor(max_workers=get_settings().worker_count) as pool:
        rows = list(pool.map(row_for, sorted(set(int(n) for n in dims))))

    return ConvergenceReport(
        rows=rows,
        metadata={
            "study": "converge",
            "beta": beta.value,
            "measure": m.describe(),
            "rank_rule": rank_rule if isinstance(rank_rule, int) else RankRule(rank_rule).value,
            "t": t,
            "method": method.value,
            "seed": seed,
            "prefactor": PrefactorMode(prefactor_mode).value,
        },
    )


def dilute_rank_limit(
    nu: SpectralMeasure,
    mu: SpectralMeasure,
    a_grid: Sequence[float],
    n: int,
    beta: BetaClass = BetaClass.UNITARY,
    method: Method = Method.EXACT,
    seed: int = 0,
    mc_params: McParams | None = None,
    precision_bits: int | None = None,
) -> ConvergenceReport:
    """Finite-n proxy a^{-1}·(1/n²)·log I against ∫ f^(β)_μ dν for shrinking rank fractions a.

    A_n has M = ⌈a·n⌉ nonzero eigenvalues placed at the quantiles of ν and B_n
    is realized from μ. Rows come out in decreasing a.

    Raises:
        ResolutionError: when a·n < 1 for some a.
    """
    beta, method = BetaClass.parse(beta), Method(method)
    if not a_grid:
        raise DomainError("at least one rank fraction is required")
    for fraction in a_grid:
        if not 0.0 < fraction <= 1.0:
            raise DomainError(f"rank fraction must lie in (0, 1], got {fraction}")
        if fraction * n < 1.0:
            raise ResolutionError(f"a={fraction} leaves no nonzero eigenvalue at n={n}; increase n")

    params = mc_params or McParams(seed=seed)
    target = nu.integrate(lambda s: f_beta(mu, s, beta))
    b = sample_spectrum(mu, n, seed)

    def row_for(fraction: float) -> ReportRow:
        # Guard against a·n landing a rounding error above an integer
        rank = min(n, math.ceil(fraction * n - 1e-9))
        a = Spectrum.padded(sample_spectrum(nu, rank, seed).values, n)
        if a.rank == 0:
            log_value, stderr = LogScalar.one(), None
        else:
            log_value, stderr = _log_integral(a, b, beta, method, params, precision_bits)
        lower, upper = _bounds_for(a, b, beta, params, precision_bits)
        proxy = log_value.log / (fraction * n * n)
        row = ReportRow(
            n=n,
            m=rank,
            lhs=proxy,
            rhs=target,
            gap=abs(proxy - target),
            method=method,
            log_value=log_value,
            lower_log=lower,
            upper_log=upper,
            stderr=stderr,
            scale=1.0 / (fraction * n * n),
            fraction=fraction,
        )
        logger.info("Dilute row", a=fraction, n=n, m=rank, proxy=proxy, target=target, gap=row.gap)
        return row

    with ThreadPoolExecutor(max_workers=get_settings().worker_count) as pool:
        rows = list(pool.map(row_for, sorted(set(float(x) for x in a_grid), reverse=True)))

    return ConvergenceReport(
        rows=rows,
        metadata={
            "study": "dilute",
            "beta": beta.value,
            "nu": nu.describe(),
            "mu": mu.describe(),
            "n": n,
            "method": method.value,
            "seed": seed,
        },
    )
