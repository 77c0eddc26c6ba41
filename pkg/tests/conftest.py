"""Shared fixtures."""

import pytest

from app.config import get_settings
from app.measures import SpectralMeasure
from app.transforms.hilbert import hilbert_edges


@pytest.fixture
def semicircle() -> SpectralMeasure:
    """Semicircle on [-2, 2], whose R-transform is R(t) = t."""
    return SpectralMeasure.semicircle(0.0, 2.0)


@pytest.fixture
def uniform01() -> SpectralMeasure:
    return SpectralMeasure.uniform(0.0, 1.0)


@pytest.fixture
def three_atoms() -> SpectralMeasure:
    return SpectralMeasure.atomic([-1.0, 0.0, 2.0], [0.25, 0.5, 0.25])


@pytest.fixture
def settings_env(monkeypatch):
    """Set HCIZ_* variables for one test; settings are rebuilt on both sides."""

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"HCIZ_{key.upper()}", str(value))
        get_settings.cache_clear()
        hilbert_edges.cache_clear()
        return get_settings()

    yield apply
    monkeypatch.undo()
    get_settings.cache_clear()
    hilbert_edges.cache_clear()
