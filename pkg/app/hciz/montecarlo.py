"""Monte Carlo estimation of I_N^(β)(A, B) over Haar matrices."""

import math
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from app.config import get_settings
from app.errors import DomainError
from app.hciz.haar import haar_columns
from app.hciz.logscalar import LogScalar
from app.measures.spectral import Spectrum
from app.transforms.beta import BetaClass
from app.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class McParams:
    """Sampling parameters; results depend on (n_samples, seed, chunks) only."""

    n_samples: int = 100_000
    seed: int = 0
    chunks: int = 8


@dataclass(frozen=True)
class McEstimate:
    """Log of the sample mean of e^{N Tr UAU*B} with its delta-method standard error."""

    log_mean: LogScalar
    stderr_log: float
    n_samples: int
    seed: int
    chunks: int

    def as_dict(self) -> dict:
        return {
            "log_mean": self.log_mean.log_abs,
            "stderr": self.stderr_log,
            "samples": self.n_samples,
            "seed": self.seed,
            "chunks": self.chunks,
        }


@dataclass
class _Moments:
    """Running Σe^{x−shift} and Σe^{2(x−shift)} for a stream of exponents x."""

    shift: float = -math.inf
    s1: float = 0.0
    s2: float = 0.0
    count: int = 0

    def rescale(self, shift: float) -> None:
        if shift > self.shift:
            if self.count:
                factor = math.exp(self.shift - shift)
                self.s1 *= factor
                self.s2 *= factor * factor
            self.shift = shift

    def add(self, exponents: np.ndarray) -> None:
        if exponents.size == 0:
            return
        self.rescale(float(exponents.max()))
        scaled = np.exp(exponents - self.shift)
        self.s1 += math.fsum(scaled)
        self.s2 += math.fsum(scaled * scaled)
        self.count += exponents.size

    def merge(self, other: "_Moments") -> None:
        if not other.count:
            return
        self.rescale(other.shift)
        factor = math.exp(other.shift - self.shift)
        self.s1 += other.s1 * factor
        self.s2 += other.s2 * factor * factor
        self.count += other.count


def trace_form(u: np.ndarray, a: Spectrum, b: Spectrum) -> float | np.ndarray:
    """Re Tr(U A U* B) = Σ_{ij} a_j b_i |U_ij|² for diagonal A and B.

    Only the columns with a_j ≠ 0 are read, so ``u`` may hold just the leading
    columns of the matrix. A stack of shape (S, N, k) gives one value per matrix.
    """
    u = np.asarray(u)
    a_values = a.as_array()
    idx = np.flatnonzero(a_values)
    if idx.size == 0:
        return 0.0 if u.ndim == 2 else np.zeros(u.shape[0])
    weights = np.abs(u[..., idx]) ** 2
    value = np.einsum("...ik,i,k->...", weights, b.as_array(), a_values[idx])
    return float(value) if u.ndim == 2 else value


def _leading_columns(a: Spectrum) -> int:
    nonzero = np.flatnonzero(a.as_array())
    return int(nonzero[-1]) + 1 if nonzero.size else 0


def _chunk_sizes(n_samples: int, chunks: int) -> list[int]:
    base = n_samples // chunks
    sizes = [base] * chunks
    sizes[-1] += n_samples - base * chunks
    return sizes


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, chunk)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunk_exponents(
    a: Spectrum, b: Spectrum, beta: BetaClass, count: int, seed: int, chunk: int
) -> Iterator[np.ndarray]:
    """N·Tr(UAU*B) for ``count`` draws of the chunk's stream, batch by batch."""
    n = a.n
    batch_size = get_settings().mc_batch_size
    columns = _leading_columns(a)
    rng = chunk_generator(seed, chunk)
    done = 0
    while done < count:
        size = min(batch_size, count - done)
        q = haar_columns(beta, n, columns, rng, size)
        yield n * trace_form(q, a, b)
        done += size


def _check_inputs(a: Spectrum, b: Spectrum, n_samples: int, chunks: int) -> None:
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: A has {a.n} eigenvalues, B has {b.n}")
    if a.n == 0:
        raise DomainError("spectra must be nonempty")
    if n_samples < 2:
        raise DomainError(f"Monte Carlo needs at least 2 samples, got {n_samples}")
    if chunks < 1:
        raise DomainError(f"chunk count must be positive, got {chunks}")


def hciz_mc_exponents(
    a: Spectrum, b: Spectrum, beta: BetaClass, n_samples: int, seed: int = 0, chunks: int = 8
) -> np.ndarray:
    """Every sampled exponent N·Tr(UAU*B), in chunk order."""
    beta = BetaClass.parse(beta)
    _check_inputs(a, b, n_samples, chunks)
    parts = [
        x
        for chunk, count in enumerate(_chunk_sizes(n_samples, chunks))
        for x in _chunk_exponents(a, b, beta, count, seed, chunk)
    ]
    return np.concatenate(parts) if parts else np.zeros(0)


def hciz_mc_estimate(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass,
    n_samples: int = 100_000,
    seed: int = 0,
    chunks: int = 8,
) -> McEstimate:
    """Estimate I_N^(β)(A, B) = E[e^{N Tr UAU*B}] under the Haar measure.

    Chunks draw from independent Philox streams and are merged in chunk order,
    so the estimate is bit-identical for a given (seed, chunks) whatever the
    number of worker threads.
    """
    beta = BetaClass.parse(beta)
    _check_inputs(a, b, n_samples, chunks)
    settings = get_settings()
    n = a.n
    norm_product = max(abs(v) for v in a.values) * max(abs(v) for v in b.values)
    if n > settings.mc_max_dim or norm_product > settings.mc_max_norm_product:
        logger.warning(
            "Monte Carlo outside its validated range",
            n=n,
            norm_product=norm_product,
            max_dim=settings.mc_max_dim,
            max_norm_product=settings.mc_max_norm_product,
        )

    def run_chunk(job: tuple[int, int]) -> _Moments:
        chunk, count = job
        moments = _Moments()
        for exponents in _chunk_exponents(a, b, beta, count, seed, chunk):
            moments.add(exponents)
        return moments

    jobs = list(enumerate(_chunk_sizes(n_samples, chunks)))
    with ThreadPoolExecutor(max_workers=settings.worker_count) as pool:
        per_chunk = list(pool.map(run_chunk, jobs))

    total = _Moments()
    for moments in per_chunk:
        total.merge(moments)

    count = total.count
    mean = total.s1 / count
    variance = max(0.0, (total.s2 / count - mean * mean) * count / (count - 1))
    stderr_log = math.sqrt(variance / count) / mean
    logger.debug("Monte Carlo estimate", n=n, beta=beta.value, samples=count, stderr=stderr_log)
    return McEstimate(
        log_mean=LogScalar(1, total.shift + math.log(mean)),
        stderr_log=stderr_log,
        n_samples=count,
        seed=seed,
        chunks=chunks,
    )
