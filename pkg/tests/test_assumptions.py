import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistoeplitz import CriterionInapplicableError, DegenerateFitError, DomainError
from twistoeplitz.assumptions import (
    CriterionConstants, criterion_constants, estimate_volume, fit_exponent, fit_power_law,
    sampler_agreement, thickened_singularity_volume, uniform_bound_check,
)
from twistoeplitz.symbol import (
    FrequencyLattice, Piece, PiecewiseCoefficient, Symbol, library,
)


def chord_volume(t):
    """Exact measure of {xi : |e^{2 i pi xi} - 1|^2 <= t}, from |e^{2 i pi xi} - 1| = 2 |sin(pi xi)|."""
    return (2 / np.pi) * np.arcsin(np.minimum(np.sqrt(t) / 2, 1.0))


def test_chord_oracle_value():
    assert chord_volume(0.01) == pytest.approx(0.031844, abs=1e-6)


def test_jordan_volume_trivial():
    j = library("jordan")
    est = estimate_volume(j, 0, [0.1, 0.5, 0.99])
    np.testing.assert_array_equal(est.vhat, 0)
    est = estimate_volume(j, 0, [1.0, 2.0])
    np.testing.assert_array_equal(est.vhat, 1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_jordan_volume_chord(seed):
    est = estimate_volume(library("jordan"), 1.0, [0.01], 40_000, seed)
    assert abs(est.vhat[0] - chord_volume(0.01)) <= 3 * est.stderr[0]


def test_volume_monotone_and_bounded():
    est = estimate_volume(library("hpm_example"), -1 + 0.5j, np.logspace(-4, 1, 15), 20_000, 3)
    assert np.all(np.diff(est.vhat) >= 0)
    assert np.all((est.vhat >= 0) & (est.vhat <= 1))


def test_volume_validation():
    with pytest.raises(DomainError):
        estimate_volume(library("jordan"), 1, [0.1], n_mc=9_999)
    with pytest.raises(DomainError):
        estimate_volume(library("jordan"), 1, [0.1, 0.05])
    with pytest.raises(DomainError):
        estimate_volume(library("jordan"), 1, [0.1], sampler="sobol")


def test_volume_csv(tmp_path):
    est = estimate_volume(library("jordan"), 1, [0.01, 0.1])
    lines = est.to_csv(tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "t,vhat,stderr" and len(lines) == 3


def test_fit_synthetic():
    t = np.logspace(-4, -1, 10)
    k, C, r2 = fit_power_law(t, np.sqrt(t))
    assert k == pytest.approx(0.5, abs=1e-6) and C == pytest.approx(1.0, abs=1e-6) and r2 == pytest.approx(1.0)
    k, C, _ = fit_power_law(t, 3 * t)
    assert k == pytest.approx(1.0, abs=1e-6) and C == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(DegenerateFitError):
        fit_power_law(t, np.zeros_like(t))


@settings(max_examples=30)
@given(st.floats(0.05, 3), st.floats(0.01, 100))
def test_fit_recovers_power_law(kappa, C):
    t = np.logspace(-4, -1, 8)
    k, c, _ = fit_power_law(t, C * t**kappa)
    assert k == pytest.approx(kappa, abs=1e-6)
    assert c == pytest.approx(C, rel=1e-6)


def test_fit_jordan():
    est = estimate_volume(library("jordan"), 1.0, np.logspace(-4, -1, 10), 100_000, 0)
    kappa, _, _ = fit_exponent(est)
    assert 0.4 <= kappa <= 0.6


def test_criterion_constants_jordan():
    c = criterion_constants(library("jordan"), margin=0.0)
    assert (c.S, c.Xi, c.m_lower, c.kappa) == (1, 2, 1.0, 0.5)
    assert c.C == pytest.approx(14 * math.sqrt(2))


def test_criterion_constants_hpm():
    c = criterion_constants(library("hpm_example"), margin=0.0)
    assert (c.S, c.Xi, c.kappa) == (2, 3, 0.25)
    assert c.m_lower == pytest.approx(1.0)
    assert c.C == pytest.approx(14 * 3 ** 0.25)


def test_criterion_constants_bidiagonal():
    c = criterion_constants(library("bidiagonal(2,1)"), margin=0.0)
    assert (c.S, c.Xi, c.m_lower, c.kappa) == (2, 3, 3.0, 0.25)
    assert c.C == pytest.approx(14 * (math.sqrt(3) / 3) ** 0.5)


def test_criterion_margin():
    c = criterion_constants(library("jordan"))
    assert c.m_lower == pytest.approx(0.99)
    assert c.C > 14 * math.sqrt(2)


def test_criterion_inapplicable():
    with pytest.raises(CriterionInapplicableError):
        criterion_constants(library("constant(1)"))
    vanishing = Symbol(FrequencyLattice((0,), (1,)), {(1,): PiecewiseCoefficient.from_expr("x - 0.5")})
    with pytest.raises(CriterionInapplicableError):
        criterion_constants(vanishing, x_samples=1001)


def test_criterion_bound_formula():
    c = CriterionConstants(2, 9, 0.5, 2)
    assert c.C == pytest.approx(28 * (3 / 0.5) ** 0.5)
    assert c.bound(0.01) == pytest.approx(c.C * 0.01 ** 0.25)


def test_thickened_volume_examples():
    assert thickened_singularity_volume(library("hpm_example"), 0.01) == pytest.approx(0.06)
    assert thickened_singularity_volume(library("jordan"), 0.2) == 0.0
    point = Symbol(FrequencyLattice((0,), (0,)), {(0,): PiecewiseCoefficient((
        Piece((0.0,), (0.5,), "0"), Piece((0.5,), (1.0,), "1"), ))})
    # the jump at 0.5 and the gluing jump at 0 ~ 1
    assert thickened_singularity_volume(point, 0.1) == pytest.approx(0.4)
    smooth_glue = Symbol(FrequencyLattice((0,), (0,)), {(0,): PiecewiseCoefficient((
        Piece((0.0,), (0.5,), "x"), Piece((0.5,), (1.0,), "1 - x"), ))})
    assert thickened_singularity_volume(smooth_glue, 0.1) == pytest.approx(0.2)
    with pytest.raises(DomainError):
        thickened_singularity_volume(point, 0)


def test_thickened_volume_2d():
    f = PiecewiseCoefficient((Piece((0.0, 0.0), (0.5, 1.0), "1"), Piece((0.5, 0.0), (1.0, 1.0), "2 + x2")))
    sym = Symbol(FrequencyLattice((0, 0), (0, 0)), {(0, 0): f})
    # planes x1 in {0, 0.5, 1} (covered length 4r) and x2 in {0, 1} (2r)
    r = 0.05
    assert thickened_singularity_volume(sym, r) == pytest.approx(1 - (1 - 4 * r) * (1 - 2 * r))
    # an L-shaped partition: the cut x2 = 0.5 stops at x1 = 0.5
    ell = Symbol(FrequencyLattice((0, 0), (0, 0)), {(0, 0): PiecewiseCoefficient((
        Piece((0.0, 0.0), (0.5, 0.5), "1"), Piece((0.5, 0.0), (1.0, 1.0), "2"), Piece((0.0, 0.5), (0.5, 1.0), "3"),
    ))})
    assert not ell.is_tensor_grid
    with pytest.raises(NotImplementedError):
        thickened_singularity_volume(ell, 0.01)


@settings(max_examples=40)
@given(st.floats(1e-4, 0.5), st.floats(1e-4, 0.5))
def test_thickened_volume_monotone(r1, r2):
    h = library("hpm_example")
    lo, hi = sorted((r1, r2))
    a, b = thickened_singularity_volume(h, lo), thickened_singularity_volume(h, hi)
    assert a <= b + 1e-15
    assert b <= min(1.0, 2 * hi * 3 + 1e-12)


def test_uniform_bound_jordan_and_hpm():
    t = np.logspace(-4, -1, 6)
    for name in ("jordan", "hpm_example"):
        sym = library(name)
        chk = uniform_bound_check(sym, criterion_constants(sym), t, z_points=5, n_mc=10_000, seed=1)
        assert chk.passed and chk.n_checks == 25 * 6


def test_sampler_agreement():
    t = np.logspace(-3, -0.5, 6)
    ok, score = sampler_agreement(library("jordan"), 1.0, t, 40_000, 0)
    assert ok, score
    ok, score = sampler_agreement(library("hpm_example"), -1 + 0.5j, t, 40_000, 0)
    assert ok, score
