"""Pydantic schemas for the wire formats shared by the CLI and the service."""

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from app.hciz.logscalar import LogScalar
from app.measures.sampling import Placement
from app.measures.spectral import SpectralMeasure, Spectrum

# ============== Measures ==============


class AtomicMeasureSchema(BaseModel):
    """Finitely many atoms; equal weights when ``weights`` is omitted."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["atomic"]
    points: list[float] = Field(min_length=1)
    weights: list[float] | None = None

    def to_domain(self) -> SpectralMeasure:
        return SpectralMeasure.atomic(self.points, self.weights)


class UniformMeasureSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform"]
    a: float = 0.0
    b: float = 1.0

    def to_domain(self) -> SpectralMeasure:
        return SpectralMeasure.uniform(self.a, self.b)


class SemicircleMeasureSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["semicircle"]
    center: float = 0.0
    radius: float = 2.0

    def to_domain(self) -> SpectralMeasure:
        return SpectralMeasure.semicircle(self.center, self.radius)


MeasureSchema = Annotated[
    AtomicMeasureSchema | UniformMeasureSchema | SemicircleMeasureSchema,
    Field(discriminator="kind"),
]
measure_adapter: TypeAdapter = TypeAdapter(MeasureSchema)


def measure_from_domain(m: SpectralMeasure) -> MeasureSchema:
    return measure_adapter.validate_python(m.describe())


# ============== Spectra and values ==============


class SpectrumSchema(BaseModel):
    """Eigenvalues of a diagonal matrix, in any order."""

    model_config = ConfigDict(extra="forbid")

    values: list[float] = Field(min_length=1)

    def to_domain(self) -> Spectrum:
        return Spectrum.of(self.values)

    @classmethod
    def from_domain(cls, s: Spectrum) -> "SpectrumSchema":
        return cls(values=list(s.values))


class LogScalarSchema(BaseModel):
    sign: int
    log_abs: float | None

    @classmethod
    def from_domain(cls, value: LogScalar) -> "LogScalarSchema":
        return cls(**value.as_dict())


# ============== Results ==============


class ExactResult(BaseModel):
    sign: int
    log_abs: float | None
    n: int


class McResult(BaseModel):
    log_mean: float
    stderr: float
    samples: int
    seed: int
    chunks: int
    beta: int
    n: int


class BoundsResult(BaseModel):
    lower: LogScalarSchema
    upper: LogScalarSchema
    exact: LogScalarSchema | None = None
    n: int
    m: int
    beta: int


class TransformRow(BaseModel):
    t: float
    v: float
    f_beta: float
    branch: Literal["R", "upper", "lower"]


class MeasureReport(BaseModel):
    measure: MeasureSchema
    support: tuple[float, float]
    mean: float
    hilbert_edges: dict[str, float | None]
    spectrum: SpectrumSchema | None = None
    bl_distance: float | None = None


class StudySummary(BaseModel):
    max_gap: float | None
    final_gap: float | None
    monotone: bool
    improved: bool
    sandwich_violations: int


# ============== Service requests ==============


class MeasureRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    measure: MeasureSchema
    sample: int | None = Field(default=None, ge=1)
    placement: Placement = Placement.QUANTILE
    seed: int = 0
    compare: MeasureSchema | None = None


class TransformRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    measure: MeasureSchema
    beta: Literal[1, 2, 4] = 2
    t: list[float] = Field(min_length=1)


class ExactRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: SpectrumSchema
    b: SpectrumSchema
    precision_bits: int = Field(default=256, ge=53)


class McRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: SpectrumSchema
    b: SpectrumSchema
    beta: Literal[1, 2, 4] = 2
    samples: int = Field(default=100_000, ge=2)
    seed: int = 0
    chunks: int = Field(default=8, ge=1)


class BoundsRequest(McRequest):
    precision_bits: int = Field(default=256, ge=53)
