"""Spectral measures, finite spectra and their diagnostics."""

from app.measures.hypotheses import (
    HypothesisReport,
    check_spacing,
    spacing_constant,
    spectrum_moment,
    validate_hypotheses,
)
from app.measures.metric import bl_distance
from app.measures.sampling import (
    Placement,
    Side,
    empirical_measure,
    quantile,
    sample_spectrum,
    shift_nonnegative,
    trim_spectrum,
)
from app.measures.spectral import MeasureKind, SpectralMeasure, Spectrum

__all__ = [
    "MeasureKind",
    "SpectralMeasure",
    "Spectrum",
    "Side",
    "Placement",
    "empirical_measure",
    "bl_distance",
    "check_spacing",
    "spacing_constant",
    "spectrum_moment",
    "trim_spectrum",
    "sample_spectrum",
    "shift_nonnegative",
    "quantile",
    "HypothesisReport",
    "validate_hypotheses",
]
