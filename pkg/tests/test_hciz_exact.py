"""Tests for the exact β=2 evaluators."""

import math

import numpy as np
import pytest

from app.errors import DegeneracyError, DomainError, PrecisionError
from app.hciz import (
    hciz_confluent,
    hciz_det,
    hciz_log,
    hciz_rank_one,
    log_normalization,
    vandermonde_log,
)
from app.measures import Spectrum, sample_spectrum

E2_VALUE = (math.e**2 - 1.0) / 2.0


def separated(rng: np.random.Generator, n: int, low: float = -1.0) -> np.ndarray:
    """n increasing values above ``low`` with gaps of at least 0.1."""
    return low + np.cumsum(rng.uniform(0.1, 2.0 / n, size=n))


def rank_one_reference(c: float, n: int) -> float:
    """E[e^{c·x}] for x ~ Beta(1, n−1), the law of |U_11|² under U(n) Haar, n = 3."""
    assert n == 3
    return 2.0 * (-1.0 / c + (math.exp(c) - 1.0) / c**2)


def test_vandermonde():
    value = vandermonde_log(Spectrum.of([2.0, 1.0, 0.0]))
    assert value.sign == 1
    assert value.log_abs == pytest.approx(math.log(2.0))
    assert vandermonde_log(Spectrum.of([1.0, 1.0, 0.0])).sign == 0


def test_normalization():
    assert log_normalization(1) == 0.0
    assert log_normalization(2) == pytest.approx(-math.log(2.0))
    assert log_normalization(3) == pytest.approx(math.log(2.0) - 3.0 * math.log(3.0))


def test_two_by_two_value():
    a, b = Spectrum.of([1.0, 0.0]), Spectrum.of([1.0, 0.0])
    assert hciz_det(a, b).log == pytest.approx(math.log(E2_VALUE), abs=1e-12)
    assert hciz_rank_one(1.0, b).log == pytest.approx(math.log(E2_VALUE), abs=1e-12)
    assert hciz_log(a, b).log == pytest.approx(1.16144, abs=1e-5)


def test_zero_a_gives_one():
    b = Spectrum.of([3.0, -1.0, 0.5])
    assert hciz_log(Spectrum.of([0.0, 0.0, 0.0]), b).log == 0.0
    assert hciz_rank_one(0.0, b).log == 0.0


def test_scalar_matrix_closed_form():
    a = Spectrum.of([0.7, 0.7, 0.7])
    b = Spectrum.of([1.0, 2.0, -0.5])
    assert hciz_log(a, b).log == pytest.approx(3 * 0.7 * 2.5)
    assert hciz_confluent(a, b).log == pytest.approx(3 * 0.7 * 2.5)


def test_symmetry_in_a_and_b():
    a = Spectrum.of([1.0, 0.4, -0.3])
    b = Spectrum.of([0.8, 0.1, -0.6])
    assert hciz_log(a, b).log == pytest.approx(hciz_log(b, a).log, abs=1e-10)


def test_translation_identity():
    """I(A, B + x) = e^{N·x·Tr A}·I(A, B)."""
    a = Spectrum.of([0.9, 0.3, 0.0])
    b = Spectrum.of([1.0, 0.2, -0.7])
    x, n = 0.8, 3
    shifted = hciz_log(a, b.shifted(x)).log
    assert shifted == pytest.approx(hciz_log(a, b).log + n * x * a.total(), abs=1e-10)


def test_det_rejects_repeated_eigenvalues():
    with pytest.raises(DegeneracyError):
        hciz_det(Spectrum.of([1.0, 1.0, 0.0]), Spectrum.of([2.0, 1.0, 0.0]))
    with pytest.raises(DomainError):
        hciz_det(Spectrum.of([1.0, 0.0]), Spectrum.of([2.0, 1.0, 0.0]))


def test_confluent_matches_rank_one_reference():
    """Both spectra repeated: diag(1, 0, 0) against itself in U(3)."""
    a = Spectrum.of([1.0, 0.0, 0.0])
    expected = math.log(rank_one_reference(3.0, 3))
    assert hciz_confluent(a, a).log == pytest.approx(expected, abs=1e-10)
    assert hciz_log(a, a).log == pytest.approx(expected, abs=1e-10)


def test_confluent_matches_det_on_distinct_spectra():
    a = Spectrum.of([1.0, 0.5, -0.25])
    b = Spectrum.of([2.0, 1.0, 0.0])
    assert hciz_confluent(a, b).log == pytest.approx(hciz_det(a, b).log, abs=1e-9)


def test_rank_one_agrees_with_confluent(uniform01):
    """The alternating-sum formula and the confluent determinant on a moderate dimension."""
    n = 12
    b = sample_spectrum(uniform01, n)
    a = Spectrum.rank_one(0.5, n)
    assert hciz_rank_one(0.5, b).log == pytest.approx(hciz_confluent(a, b).log, abs=1e-9)


def test_small_rank_lower_bound(uniform01):
    """Jensen: log I ≥ Tr A·Tr B."""
    n = 10
    a = Spectrum.padded([0.5, 0.5], n)
    b = sample_spectrum(uniform01, n)
    value = hciz_log(a, b)
    assert value.sign == 1
    assert value.log >= a.total() * b.total() - 1e-9


def test_precision_cap(settings_env):
    settings_env(max_precision_bits=60)
    a = Spectrum.of([1.0, 0.0, 0.0])
    with pytest.raises(PrecisionError) as excinfo:
        hciz_log(a, a, precision_bits=53)
    assert excinfo.value.exit_code == 3


def test_precision_argument_validated():
    with pytest.raises(DomainError):
        hciz_confluent(Spectrum.of([1.0, 0.0]), Spectrum.of([1.0, 0.0]), precision_bits=20)


def test_random_symmetry_and_translation():
    """log I(A + x, B) − log I(A, B) = N·x·Tr B, and I is symmetric in A and B."""
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        a = Spectrum.of(separated(rng, n))
        b = Spectrum.of(separated(rng, n))
        x = float(rng.uniform(-1.0, 1.0))
        base = hciz_log(a, b).log
        assert hciz_log(a.shifted(x), b).log - base == pytest.approx(n * x * b.total(), abs=1e-9)
        assert hciz_log(b, a).log == pytest.approx(base, rel=1e-10, abs=1e-10)


def test_monotone_in_a_for_nonnegative_b():
    """A ≥ A′ and B ≥ 0 give I(A, B) ≥ I(A′, B)."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        a_low = separated(rng, n)
        a_high = a_low + rng.uniform(0.0, 0.5, size=n)
        b = Spectrum.of(separated(rng, n, low=0.0))
        low = hciz_confluent(Spectrum.of(a_low), b).log
        high = hciz_confluent(Spectrum.of(a_high), b).log
        assert high >= low - 1e-12


def test_det_approaches_confluent_as_gaps_close():
    a0 = Spectrum.of([1.0, 0.5, 0.5])
    b = Spectrum.of([1.0, 0.3, 0.0])
    target = hciz_confluent(a0, b).log
    gaps = [abs(hciz_det(Spectrum.of([1.0, 0.5 + eps, 0.5 - eps]), b).log - target) for eps in (1e-1, 1e-2, 1e-3)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4
