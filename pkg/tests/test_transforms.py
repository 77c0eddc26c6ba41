"""Tests for the Hilbert and R-transforms and the limit function f^(β)."""

import math

import pytest
from scipy import integrate

from app.errors import DomainError, OutOfBandError
from app.measures import SpectralMeasure, empirical_measure, sample_spectrum
from app.transforms import (
    BetaClass,
    Branch,
    classify_branch,
    f_beta,
    f_beta_integral_form,
    hilbert_edges,
    hilbert_transform,
    r_transform,
    transform_table,
    v_branch,
)


def test_beta_class():
    assert BetaClass.parse("4") is BetaClass.SYMPLECTIC
    assert BetaClass.parse(1).group == "O(N)"
    assert BetaClass.UNITARY.half == 1.0
    with pytest.raises(DomainError):
        BetaClass.parse(3)


def test_hilbert_closed_forms(uniform01, semicircle, three_atoms):
    assert hilbert_transform(uniform01, 2.0) == pytest.approx(math.log(2.0), abs=1e-12)
    assert hilbert_transform(semicircle, 3.0) == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=1e-14)
    assert hilbert_transform(semicircle, -3.0) == pytest.approx(-(3.0 - math.sqrt(5.0)) / 2.0, abs=1e-14)
    assert hilbert_transform(three_atoms, 3.0) == pytest.approx(0.25 / 4 + 0.5 / 3 + 0.25 / 1)


def test_hilbert_matches_quadrature(uniform01):
    m = SpectralMeasure.uniform(-1.0, 2.0)
    for z in (2.5, 4.0, -3.0):
        direct, _ = integrate.quad(lambda x: 1.0 / ((z - x) * 3.0), -1.0, 2.0)
        assert hilbert_transform(m, z) == pytest.approx(direct, rel=1e-10)


def test_hilbert_at_the_edge(semicircle, uniform01):
    """The semicircle edge limit is finite, a flat density's is not."""
    assert hilbert_transform(semicircle, 2.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        hilbert_transform(uniform01, 1.0)
    with pytest.raises(DomainError):
        hilbert_transform(semicircle, 0.5)


def test_hilbert_edges(semicircle, uniform01, three_atoms):
    edges = hilbert_edges(semicircle)
    assert edges.h_max == pytest.approx(1.0, abs=1e-8)
    assert edges.h_min == pytest.approx(-1.0, abs=1e-8)
    assert hilbert_edges(uniform01).as_dict() == {"h_min": None, "h_max": None}
    assert math.isinf(hilbert_edges(three_atoms).h_max)


def test_r_transform(semicircle, uniform01, three_atoms):
    assert r_transform(SpectralMeasure.atomic([-1.0, 1.0]), 1.0) == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0, abs=1e-12)
    for t in (0.1, 0.5, -0.7, 0.99):
        assert r_transform(semicircle, t) == pytest.approx(t, abs=1e-10)
    assert r_transform(three_atoms, 0.0) == three_atoms.mean()
    with pytest.raises(OutOfBandError):
        r_transform(semicircle, 1.5)


def test_r_transform_inverts_hilbert(uniform01, three_atoms):
    """H(1/t + R(t)) = t, including tiny and large t."""
    for m in (uniform01, three_atoms):
        for t in (1e-6, 0.3, 2.0, 6.0, -0.4, -8.0):
            r = r_transform(m, t)
            assert m.support_min <= r <= m.support_max
            assert hilbert_transform(m, 1.0 / t + r) == pytest.approx(t, rel=1e-9)


def test_r_transform_near_zero_is_the_mean(uniform01):
    """R(t) = mean + variance·t + O(t²)."""
    t = 1e-4
    assert r_transform(uniform01, t) == pytest.approx(0.5 + t / 12.0, abs=1e-9)


def test_v_branch(semicircle):
    assert v_branch(semicircle, 2.0, BetaClass.UNITARY) == pytest.approx(1.5)
    assert classify_branch(semicircle, 2.0, BetaClass.UNITARY) is Branch.UPPER
    assert v_branch(semicircle, -2.0, BetaClass.UNITARY) == pytest.approx(-1.5)
    assert classify_branch(semicircle, -2.0, BetaClass.UNITARY) is Branch.LOWER
    assert v_branch(semicircle, 0.5, BetaClass.UNITARY) == pytest.approx(0.5, abs=1e-10)
    assert v_branch(semicircle, 0.25, BetaClass.ORTHOGONAL) == pytest.approx(0.5, abs=1e-10)
    assert classify_branch(semicircle, 0.0, BetaClass.ORTHOGONAL) is Branch.R


def test_v_branch_is_continuous_at_the_band_edge(semicircle):
    below = v_branch(semicircle, 1.0 - 1e-9, BetaClass.UNITARY)
    above = v_branch(semicircle, 1.0 + 1e-9, BetaClass.UNITARY)
    assert below == pytest.approx(above, abs=1e-6)


def test_f_beta_in_band(semicircle):
    assert f_beta(semicircle, 0.5, BetaClass.UNITARY) == pytest.approx(0.125, abs=1e-9)
    assert f_beta(semicircle, 0.25, BetaClass.ORTHOGONAL) == pytest.approx(0.0625, abs=1e-9)
    assert f_beta(semicircle, 0.0, BetaClass.ORTHOGONAL) == 0.0


def test_f_beta_integral_form_agrees(semicircle, uniform01, three_atoms):
    for m in (semicircle, uniform01, three_atoms):
        for t in (0.3, -0.2):
            for beta in (BetaClass.ORTHOGONAL, BetaClass.UNITARY):
                assert f_beta(m, t, beta) == pytest.approx(f_beta_integral_form(m, t, beta), abs=1e-8)
    with pytest.raises(OutOfBandError):
        f_beta_integral_form(semicircle, 3.0, BetaClass.UNITARY)


def test_f_beta_symplectic_reflection(uniform01):
    for t in (0.4, -1.3):
        assert f_beta(uniform01, t, BetaClass.SYMPLECTIC) == -f_beta(uniform01, -t, BetaClass.UNITARY)


def test_f_beta_saturated_branch(semicircle):
    """Beyond the band f' = λ_max − 1/t, so f(2) − f(1) = 2 − log 2 for β=2."""
    f1 = f_beta(semicircle, 1.0, BetaClass.UNITARY)
    f2 = f_beta(semicircle, 2.0, BetaClass.UNITARY)
    assert f1 == pytest.approx(0.5, abs=1e-7)
    assert f2 - f1 == pytest.approx(2.0 - math.log(2.0), abs=1e-7)


def test_transform_table(semicircle):
    rows = transform_table(semicircle, [-2.0, 0.0, 0.5, 2.0], BetaClass.UNITARY)
    assert [row.branch for row in rows] == [Branch.LOWER, Branch.R, Branch.R, Branch.UPPER]
    assert rows[3].v == pytest.approx(1.5)
    assert rows[2].f_beta == pytest.approx(0.125, abs=1e-9)
    assert rows[0].as_dict()["branch"] == "lower"

    symplectic = transform_table(semicircle, [0.5], BetaClass.SYMPLECTIC)[0]
    # d/dt[−f2(−t)] = v2(−t)
    assert symplectic.v == pytest.approx(-0.5, abs=1e-10)
    assert symplectic.f_beta == pytest.approx(-0.125, abs=1e-9)


def test_r_transform_when_the_pole_meets_the_lower_edge(uniform01):
    """1/t equal to the support width puts the bracket end on the divergent edge."""
    e = math.e
    assert r_transform(uniform01, 1.0) == pytest.approx(1.0 / (e - 1.0), abs=1e-12)
    assert r_transform(uniform01, -1.0) == pytest.approx((e - 2.0) / (e - 1.0), abs=1e-12)
    wide = SpectralMeasure.uniform(-1.0, 1.0)
    assert r_transform(wide, 0.5) == pytest.approx((3.0 - e) / (e - 1.0), abs=1e-12)
    assert r_transform(wide, -0.5) == pytest.approx(-(3.0 - e) / (e - 1.0), abs=1e-12)


def test_f_beta_when_the_pole_meets_the_lower_edge(uniform01):
    assert f_beta(uniform01, 0.5, BetaClass.ORTHOGONAL) == pytest.approx(
        f_beta_integral_form(uniform01, 0.5, BetaClass.ORTHOGONAL), abs=1e-8
    )
    assert f_beta(uniform01, 1.0, BetaClass.SYMPLECTIC) == pytest.approx(
        f_beta_integral_form(uniform01, 1.0, BetaClass.SYMPLECTIC), abs=1e-8
    )
    rows = transform_table(uniform01, [0.4, 0.5, 0.6], BetaClass.ORTHOGONAL)
    assert all(math.isfinite(row.f_beta) for row in rows)


def test_v_branch_far_into_a_divergent_band(uniform01):
    """R(t) approaches λ_max − 1/t faster than float resolution for large |t|."""
    assert v_branch(uniform01, 20.0, BetaClass.UNITARY) == pytest.approx(
        0.95 + 1.0 / math.expm1(20.0), abs=1e-11
    )
    assert v_branch(uniform01, 40.0, BetaClass.UNITARY) == pytest.approx(0.975, abs=1e-12)
    assert v_branch(uniform01, -40.0, BetaClass.UNITARY) == pytest.approx(0.025, abs=1e-12)
    assert v_branch(uniform01, 200.0, BetaClass.ORTHOGONAL) == pytest.approx(1.0 - 1.0 / 400.0, abs=1e-12)


def test_f_beta_is_continuous_across_the_band_edge(semicircle):
    for beta, edge in ((BetaClass.UNITARY, 1.0), (BetaClass.ORTHOGONAL, 0.5)):
        below = f_beta(semicircle, edge - 1e-6, beta)
        above = f_beta(semicircle, edge + 1e-6, beta)
        assert abs(above - below) < 1e-5


def test_r_inversion_residual_grid(semicircle, uniform01, three_atoms):
    """|H(1/t + R(t)) − t| stays at rounding level over 25 (measure, t) pairs."""
    measures = [
        semicircle,
        uniform01,
        three_atoms,
        SpectralMeasure.uniform(-1.0, 2.0),
        SpectralMeasure.atomic([-1.0, 1.0]),
    ]
    ts = (-0.9, -0.3, 0.2, 0.6, 0.95)
    for m in measures:
        for t in ts:
            r = r_transform(m, t)
            assert abs(hilbert_transform(m, 1.0 / t + r) - t) <= 1e-9 * max(1.0, abs(t))


def test_f_beta_is_continuous_in_the_measure(semicircle):
    """Atomizing the semicircle more finely brings f(0.5) closer to the limit value."""
    target = f_beta(semicircle, 0.5, BetaClass.UNITARY)
    gaps = [
        abs(f_beta(empirical_measure(sample_spectrum(semicircle, n)), 0.5, BetaClass.UNITARY) - target)
        for n in (50, 200, 800)
    ]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4
