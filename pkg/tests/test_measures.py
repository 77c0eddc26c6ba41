"""Tests for spectral measures, spectra and their realizations."""

import math

import numpy as np
import pytest
from scipy import integrate

from app.errors import DomainError
from app.measures import (
    MeasureKind,
    Placement,
    Side,
    SpectralMeasure,
    Spectrum,
    check_spacing,
    empirical_measure,
    sample_spectrum,
    shift_nonnegative,
    spacing_constant,
    spectrum_moment,
    trim_spectrum,
    validate_hypotheses,
)


def test_atomic_canonical_form():
    """Atoms are sorted, zero weights dropped and coincident points merged."""
    m = SpectralMeasure.atomic([2.0, -1.0, 2.0, 5.0], [0.25, 0.5, 0.25, 0.0])
    assert m.points == (-1.0, 2.0)
    assert m.weights == (0.5, 0.5)
    assert m.support_min == -1.0
    assert m.support_max == 2.0
    assert m == SpectralMeasure.atomic([-1.0, 2.0])


def test_invalid_measures():
    with pytest.raises(DomainError):
        SpectralMeasure.atomic([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(DomainError):
        SpectralMeasure.atomic([0.0], [-1.0])
    with pytest.raises(DomainError):
        SpectralMeasure.atomic([])
    with pytest.raises(DomainError):
        SpectralMeasure.uniform(1.0, 1.0)
    with pytest.raises(DomainError):
        SpectralMeasure.semicircle(0.0, 0.0)


def test_means_and_moments(semicircle, uniform01, three_atoms):
    assert semicircle.mean() == 0.0
    assert semicircle.moment(2) == pytest.approx(1.0, abs=1e-10)
    assert semicircle.moment(4) == pytest.approx(2.0, abs=1e-10)
    assert uniform01.moment(2) == pytest.approx(1.0 / 3.0)
    assert three_atoms.mean() == pytest.approx(0.25)
    assert three_atoms.moment(2) == pytest.approx(1.25)


def test_integrate_matches_direct_quadrature(uniform01):
    m = SpectralMeasure.uniform(-1.0, 3.0)
    direct, _ = integrate.quad(lambda x: math.exp(x) / 4.0, -1.0, 3.0)
    assert m.integrate(math.exp) == pytest.approx(direct, rel=1e-10)
    assert uniform01.integrate(lambda x: 1.0) == pytest.approx(1.0)


def test_reflect(three_atoms, semicircle):
    reflected = three_atoms.reflect()
    assert reflected.points == (-2.0, 0.0, 1.0)
    assert reflected.weights == (0.25, 0.5, 0.25)
    assert SpectralMeasure.uniform(0.0, 1.0).reflect() == SpectralMeasure.uniform(-1.0, 0.0)
    assert semicircle.reflect() == semicircle


def test_cdf_and_partial_mean(semicircle, three_atoms):
    assert float(semicircle.cdf(0.0)) == pytest.approx(0.5)
    assert float(semicircle.cdf(2.0)) == pytest.approx(1.0)
    assert float(semicircle.partial_mean(2.0)) == pytest.approx(0.0, abs=1e-12)
    assert float(three_atoms.cdf(0.0)) == pytest.approx(0.75)
    assert float(three_atoms.partial_mean(0.0)) == pytest.approx(-0.25)


def test_quantile(uniform01, semicircle, three_atoms):
    assert uniform01.quantile(0.3) == pytest.approx(0.3)
    assert semicircle.quantile(0.5) == 0.0
    assert semicircle.quantile(0.9) == -semicircle.quantile(0.1)
    assert float(semicircle.cdf(semicircle.quantile(0.2))) == pytest.approx(0.2, abs=1e-12)
    assert three_atoms.quantile(0.25) == -1.0
    assert three_atoms.quantile(0.5) == 0.0
    assert three_atoms.quantile(0.8) == 2.0
    with pytest.raises(DomainError):
        uniform01.quantile(1.0)


def test_quantile_placement(uniform01, three_atoms):
    """b_i = F^{-1}((i - 1/2)/N), returned in descending order."""
    s = sample_spectrum(uniform01, 4)
    assert s.values == pytest.approx((0.875, 0.625, 0.375, 0.125))
    assert sample_spectrum(uniform01, 4, seed=99) == s

    atoms = sample_spectrum(three_atoms, 8)
    assert atoms.values == (2.0, 2.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0)


def test_iid_placement_is_seeded(semicircle):
    first = sample_spectrum(semicircle, 50, seed=3, placement=Placement.IID)
    again = sample_spectrum(semicircle, 50, seed=3, placement="iid")
    other = sample_spectrum(semicircle, 50, seed=4, placement=Placement.IID)
    assert first == again
    assert first != other
    assert all(-2.0 <= v <= 2.0 for v in first.values)


def test_quantile_moments_converge(semicircle):
    errors = [abs(spectrum_moment(sample_spectrum(semicircle, n), 2) - 1.0) for n in (8, 32, 128)]
    assert errors[0] > errors[1] > errors[2]


def test_spectrum_basics():
    s = Spectrum.of([0.0, 3.0, 1.0, 0.0])
    assert s.values == (3.0, 1.0, 0.0, 0.0)
    assert s.rank == 2
    assert s.n == 4
    assert s.total() == 4.0
    assert s.nonzero() == (3.0, 1.0)
    assert s.distinct_groups() == [(3.0, 1), (1.0, 1), (0.0, 2)]
    assert Spectrum.rank_one(2.0, 3).values == (2.0, 0.0, 0.0)
    assert Spectrum.padded([1.0], 2).values == (1.0, 0.0)
    with pytest.raises(DomainError):
        Spectrum.padded([1.0, 2.0], 1)
    with pytest.raises(DomainError):
        Spectrum.of([1.0, math.inf])


def test_trim_spectrum():
    s = Spectrum.of([3.0, 2.0, 1.0])
    assert trim_spectrum(s, 1, Side.UPPER).values == (3.0, 2.0, 1.0)
    assert trim_spectrum(s, 2, Side.UPPER).values == (3.0, 2.0)
    assert trim_spectrum(s, 2, Side.LOWER).values == (2.0, 1.0)
    assert trim_spectrum(s, 3, "lower").values == (1.0,)
    with pytest.raises(DomainError):
        trim_spectrum(s, 4, Side.LOWER)

    four = Spectrum.of([4.0, 3.0, 2.0, 1.0])
    assert trim_spectrum(four, 2, Side.LOWER, block=2).values == (2.0, 1.0)
    assert trim_spectrum(four, 2, Side.UPPER, block=2).values == (4.0, 3.0)


def test_shift_nonnegative():
    s, x = shift_nonnegative(Spectrum.of([1.0, -0.5]))
    assert x == 0.5
    assert s.values == (1.5, 0.0)
    same, zero = shift_nonnegative(Spectrum.of([1.0, 0.0]))
    assert zero == 0.0
    assert same.values == (1.0, 0.0)


def test_spacing():
    """An exact 1/N grid passes with c = 1 despite rounding."""
    n = 10
    s = Spectrum.of([i / n for i in range(n)])
    assert check_spacing(s, 1.0)
    assert not check_spacing(s, 0.5)
    assert spacing_constant(s) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        check_spacing(s, 0.0)
    with pytest.raises(DomainError):
        check_spacing(Spectrum.of([1.0]), 1.0)


def test_empirical_measure():
    m = empirical_measure(Spectrum.of([1.0, 1.0, 0.0, 2.0]))
    assert m.kind is MeasureKind.ATOMIC
    assert m.points == (0.0, 1.0, 2.0)
    assert m.weights == (0.25, 0.5, 0.25)


def test_validate_hypotheses(uniform01):
    n = 16
    b = sample_spectrum(uniform01, n)
    a = Spectrum.padded([0.5, 0.5], n)
    report = validate_hypotheses(a, b, uniform01, grid_size=64)
    assert report.rank == 2
    assert report.rank_fraction == pytest.approx(2 / n)
    assert report.edge_gap_max == pytest.approx(0.5 / n)
    assert report.edge_gap_min == pytest.approx(0.5 / n)
    assert 0.0 < report.bl_to_limit < 0.2
    assert report.spacing_constant == pytest.approx(1.0)
    assert set(report.as_dict()) >= {"n", "rank", "bl_to_limit"}
    assert np.isfinite(report.bl_to_limit)
