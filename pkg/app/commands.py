"""Runners behind the CLI subcommands and the service endpoints.

Each runner takes domain objects and returns a pydantic result model (or a
report), so the CLI and the HTTP layer only differ in how they read inputs
and write outputs.
"""

from collections.abc import Sequence

from app.asymptotics import (
    ConvergenceReport,
    Method,
    PrefactorMode,
    convergence_study,
    dilute_rank_limit,
    sandwich_bounds,
)
from app.errors import DomainError
from app.hciz import McParams, hciz_log, hciz_mc_estimate
from app.measures import Placement, SpectralMeasure, Spectrum, bl_distance, sample_spectrum
from app.schemas import (
    BoundsResult,
    ExactResult,
    LogScalarSchema,
    McResult,
    MeasureReport,
    SpectrumSchema,
    TransformRow,
    measure_from_domain,
)
from app.transforms import BetaClass, hilbert_edges, transform_table


def run_measure(
    m: SpectralMeasure,
    sample: int | None = None,
    placement: Placement = Placement.QUANTILE,
    seed: int = 0,
    compare: SpectralMeasure | None = None,
    grid_size: int | None = None,
) -> MeasureReport:
    """Canonical form, support, mean and Hilbert edges of a measure, plus optional sample and distance."""
    report = MeasureReport(
        measure=measure_from_domain(m),
        support=(m.support_min, m.support_max),
        mean=m.mean(),
        hilbert_edges=hilbert_edges(m).as_dict(),
    )
    if sample is not None:
        report.spectrum = SpectrumSchema.from_domain(sample_spectrum(m, sample, seed, placement))
    if compare is not None:
        report.bl_distance = bl_distance(m, compare, grid_size)
    return report


def run_transform(m: SpectralMeasure, beta: BetaClass, ts: Sequence[float]) -> list[TransformRow]:
    return [TransformRow(**point.as_dict()) for point in transform_table(m, ts, beta)]


def run_exact(a: Spectrum, b: Spectrum, precision_bits: int | None = None) -> ExactResult:
    value = hciz_log(a, b, precision_bits)
    return ExactResult(**value.as_dict(), n=a.n)


def run_mc(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass,
    samples: int,
    seed: int = 0,
    chunks: int = 8,
    n: int | None = None,
) -> McResult:
    if n is not None and n != a.n:
        raise DomainError(f"--n {n} does not match the spectra dimension {a.n}")
    beta = BetaClass.parse(beta)
    estimate = hciz_mc_estimate(a, b, beta, samples, seed, chunks)
    return McResult(**estimate.as_dict(), beta=beta.value, n=a.n)


def run_bounds(
    a: Spectrum,
    b: Spectrum,
    beta: BetaClass,
    samples: int = 100_000,
    seed: int = 0,
    chunks: int = 8,
    precision_bits: int | None = None,
) -> BoundsResult:
    """Sandwich bounds, and for β=2 the exact value they enclose."""
    beta = BetaClass.parse(beta)
    params = McParams(n_samples=samples, seed=seed, chunks=chunks)
    lower, upper = sandwich_bounds(a, b, beta, params, precision_bits)
    exact = None
    if beta is BetaClass.UNITARY:
        exact = LogScalarSchema.from_domain(hciz_log(a, b, precision_bits))
    return BoundsResult(
        lower=LogScalarSchema.from_domain(lower),
        upper=LogScalarSchema.from_domain(upper),
        exact=exact,
        n=a.n,
        m=a.rank,
        beta=beta.value,
    )


def run_converge(
    m: SpectralMeasure,
    rank: "str | int",
    t: float,
    dims: Sequence[int],
    beta: BetaClass,
    method: Method,
    seed: int = 0,
    samples: int = 100_000,
    chunks: int = 8,
    prefactor: PrefactorMode = PrefactorMode.NONE,
    placement: Placement = Placement.QUANTILE,
    precision_bits: int | None = None,
) -> ConvergenceReport:
    return convergence_study(
        m,
        rank,
        t,
        dims,
        beta=beta,
        method=method,
        seed=seed,
        mc_params=McParams(n_samples=samples, seed=seed, chunks=chunks),
        prefactor_mode=prefactor,
        placement=placement,
        precision_bits=precision_bits,
    )


def run_dilute(
    nu: SpectralMeasure,
    mu: SpectralMeasure,
    a_grid: Sequence[float],
    n: int,
    beta: BetaClass,
    method: Method,
    seed: int = 0,
    samples: int = 100_000,
    chunks: int = 8,
    precision_bits: int | None = None,
) -> ConvergenceReport:
    return dilute_rank_limit(
        nu,
        mu,
        a_grid,
        n,
        beta=beta,
        method=method,
        seed=seed,
        mc_params=McParams(n_samples=samples, seed=seed, chunks=chunks),
        precision_bits=precision_bits,
    )
