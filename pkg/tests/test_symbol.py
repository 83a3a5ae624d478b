import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from twistoeplitz import AccuracyError, DomainError, PreconditionError
from twistoeplitz._expr import compile_expr, validate_expr
from twistoeplitz.symbol import (
    FrequencyLattice, MollifierSpec, Piece, PiecewiseCoefficient, Symbol, bump,
    coeff_decay_check, eval_symbol, from_manifest, library, load_manifest, mollify,
    project_to_lattice, save_manifest, to_manifest,
)

# integral of exp(-1/(1-y^2)) over [-1, 1], frozen from an mpmath quadrature at 30 digits
BUMP_MASS_1D = 0.44399381616807937


def test_bump_mass_oracle():
    mpmath.mp.dps = 30
    mass = mpmath.quad(lambda y: mpmath.exp(-1 / (1 - y * y)), [-1, 0, 1])
    assert abs(float(mass) - BUMP_MASS_1D) < 1e-15
    assert MollifierSpec().norm_const == pytest.approx(1 / BUMP_MASS_1D, rel=1e-12)


def test_bump_normalized_2d():
    spec = MollifierSpec(d=2)
    val, _ = integrate.dblquad(
        lambda y, x: bump(np.array([x, y]), spec),
        -1, 1, lambda x: -math.sqrt(1 - x * x), lambda x: math.sqrt(1 - x * x),
        epsabs=1e-11,
    )
    assert val == pytest.approx(1.0, abs=1e-8)


def test_bump_support():
    spec = MollifierSpec()
    assert bump(1.0, spec) == 0.0
    assert bump(-1.2, spec) == 0.0
    assert bump(0.0, spec) == pytest.approx(math.exp(-1) / BUMP_MASS_1D)


def test_lattice_order():
    lat = FrequencyLattice((1, 0), (0, 1))
    assert lat.frequencies == ((-1, 0), (-1, 1), (0, 0), (0, 1))
    assert lat.d == 2 and len(lat) == 4 and lat.max_frequency == 1
    with pytest.raises(DomainError):
        FrequencyLattice((-1,), (1,))


def test_jordan_evaluation():
    j = library("jordan")
    assert eval_symbol(j, 0.3, 0.25) == pytest.approx(1j)
    assert j.singularities == ()
    assert j.holder == 1.0


def test_hpm_pieces_and_jump():
    h = library("hpm_example")
    f = h.coeffs[(0,)]
    assert f(np.array([[1 / 3]]))[0] == pytest.approx(1.0)
    left = f(np.array([[np.nextafter(1 / 3, 0)]]))[0].real
    assert left == pytest.approx(math.sqrt(1 / 3) - 2.5, abs=1e-12)
    assert f(np.array([[1.0]]))[0] == pytest.approx(1.5)
    assert f(np.array([[0.0]]))[0] == pytest.approx(-2.5)
    assert h.singularities == (0.0, 1 / 3, 2 / 3, 1.0)
    assert h.holder == 0.5
    # p(x, xi) = f(x) + i cos(2 pi xi)
    x, xi = 0.8, 0.1
    expect = 0.5 + math.exp(3 * (1 - x)) + 1j * math.cos(2 * math.pi * xi)
    assert eval_symbol(h, x, xi) == pytest.approx(expect, abs=1e-14)


def test_eval_domain():
    h = library("hpm_example")
    with pytest.raises(DomainError):
        eval_symbol(h, 1.2, 0.0)
    with pytest.raises(DomainError):
        eval_symbol(h, -1e-9, 0.0)


@given(st.floats(0, 1), st.floats(-5, 5), st.integers(-3, 3))
def test_eval_periodic_in_xi(x, xi, k):
    h = library("hpm_example")
    assert eval_symbol(h, x, xi + k) == pytest.approx(eval_symbol(h, x, xi), abs=1e-9)


def test_project_to_lattice_exact():
    h = library("hpm_example")
    M = 16
    xi = np.arange(M) / M
    for x in (0.1, 0.5, 0.9):
        samples = eval_symbol(h, np.full(M, x), xi)
        c = project_to_lattice(samples, h.lattice)
        f = h.coeffs[(0,)](np.array([[x]]))[0]
        np.testing.assert_allclose(c, [0.5j, f, 0.5j], atol=1e-14)
    with pytest.raises(PreconditionError):
        project_to_lattice(samples[:4], h.lattice)


def test_project_to_lattice_2d():
    lat = FrequencyLattice((0, 1), (1, 1))
    M = 8
    g = np.arange(M) / M
    a, b = np.meshgrid(g, g, indexing="ij")
    samples = 2 * np.exp(2j * np.pi * a) + 3 * np.exp(-2j * np.pi * b)
    c = dict(zip(lat.frequencies, project_to_lattice(samples, lat)))
    assert c[(1, 0)] == pytest.approx(2)
    assert c[(0, -1)] == pytest.approx(3)
    assert abs(c[(1, 1)]) < 1e-14


def test_piece_validation():
    with pytest.raises(DomainError):
        PiecewiseCoefficient((Piece((0.0,), (0.5,), "x"),))
    with pytest.raises(DomainError):
        PiecewiseCoefficient((Piece((0.0,), (0.6,), "x"), Piece((0.4,), (1.0,), "x")))
    with pytest.raises(DomainError):
        Piece((0.0,), (1.0,), "__import__('os')")


@pytest.mark.parametrize("text", ["x.real", "open(x)", "[x]", "x if x else 1", "lambda: 1", "'a'"])
def test_expression_whitelist(text):
    with pytest.raises(DomainError):
        validate_expr(text, 1)


def test_expression_values():
    f = compile_expr("abs(12*x - 6) - 1 + 0*i", 1)
    np.testing.assert_allclose(f(np.array([[0.0], [0.5]])), [5, -1])
    g = compile_expr("x1 * x2", 2)
    np.testing.assert_allclose(g(np.array([[2.0, 3.0]])), [6])


def test_library_parsing():
    b = library("bidiagonal(2, 1)")
    assert b.coeffs[(1,)](np.array([[0.5]]))[0] == 2
    assert b.coeffs[(-1,)](np.array([[0.5]]))[0] == 1
    assert library("constant(1.5-2j)").coeffs[(0,)](np.array([[0.2]]))[0] == 1.5 - 2j
    with pytest.raises(DomainError):
        library("nope")


def test_manifest_roundtrip(tmp_path):
    h = library("hpm_example")
    path = save_manifest(h, tmp_path / "hpm.json")
    back = load_manifest(path)
    x = np.linspace(0, 1, 101)
    xi = np.linspace(0, 1, 101)
    np.testing.assert_array_equal(eval_symbol(back, x, xi), eval_symbol(h, x, xi))
    assert back.singularities == h.singularities
    assert to_manifest(from_manifest(to_manifest(h))) == to_manifest(h)


def test_two_dimensional_planes():
    f = PiecewiseCoefficient((
        Piece((0.0, 0.0), (0.5, 1.0), "1"),
        Piece((0.5, 0.0), (1.0, 1.0), "2 + x2"),
    ))
    sym = Symbol(FrequencyLattice((0, 0), (0, 1)), {(0, 0): f, (0, 1): PiecewiseCoefficient.constant(1, 2)})
    assert sym.planes[0] == (0.0, 0.5, 1.0)
    assert sym.planes[1] == (0.0, 1.0)
    assert sym.is_tensor_grid
    val = eval_symbol(sym, [0.75, 0.5], [0.0, 0.25])
    assert val == pytest.approx(2.5 + 1j)


def test_mollify_constant_is_fixed():
    c = library("constant(2.5)")
    m = mollify(c, 1 / (2 * math.pi * 64))
    vals = m.coeffs[(0,)](np.linspace(0, 1, 17)[:, None])
    np.testing.assert_allclose(vals, 2.5, atol=1e-10)
    assert m.mollified and m.singularities == ()


def _quad_oracle(f, x, scale):
    """Periodic convolution by adaptive quadrature split at the preimages of the pieces' breakpoints."""
    spec = MollifierSpec()
    cuts = []
    for b in (0.0, 1 / 3, 2 / 3):
        for m in range(-2, 3):
            y = (x - b - m) / scale
            if -1 < y < 1:
                cuts.append(y)
    cuts.append((x - 0.5) / scale)

    def integrand(y):
        u = (x - scale * y) % 1.0
        u = 1.0 if u == 0.0 else u
        return f(np.array([[u]]))[0].real * bump(y, spec)

    val, _ = integrate.quad(integrand, -1, 1, points=sorted(c for c in cuts if -1 < c < 1),
                            limit=400, epsabs=1e-13, epsrel=1e-12)
    return val


@pytest.mark.parametrize("x", [0.0, 0.1, 0.3, 1 / 3, 0.5, 0.7, 0.95, 1.0])
def test_mollify_against_adaptive_quadrature(x):
    h = library("hpm_example")
    hh = 1 / (2 * math.pi * 128)
    m = mollify(h, hh)
    got = m.coeffs[(0,)](np.array([[x]]))[0]
    want = _quad_oracle(h.coeffs[(0,)], x, hh ** (1 / 6))
    assert got.real == pytest.approx(want, abs=1e-7)
    assert abs(got.imag) < 1e-14


def test_mollify_unconverged_raises():
    jumpy = Symbol(FrequencyLattice((0,), (0,)), {(0,): PiecewiseCoefficient.from_expr("floor(2*x)")})
    m = mollify(jumpy, 1 / (2 * math.pi * 64))
    with pytest.raises(AccuracyError):
        m.coeffs[(0,)](np.array([[0.45]]))


def test_mollify_validation():
    h = library("hpm_example")
    with pytest.raises(DomainError):
        mollify(h, 0.0)
    with pytest.raises(DomainError):
        MollifierSpec(eta=0.3)
    with pytest.raises(DomainError):
        mollify(h, 0.01, MollifierSpec(d=2))


def test_mollify_d2_smooth_coefficient():
    f = PiecewiseCoefficient.from_expr("cos(2*pi*x1) * cos(2*pi*x2)", d=2)
    sym = Symbol(FrequencyLattice((0, 0), (0, 0)), {(0, 0): f})
    spec = MollifierSpec(d=2)
    m = mollify(sym, 1 / (2 * math.pi * 4096), spec)
    x = np.array([[0.2, 0.7]])
    # the kernel is radial, so the result is f(x) times a scalar damping factor
    ratio = m.coeffs[(0, 0)](x)[0] / f(x)[0]
    x2 = np.array([[0.4, 0.1]])
    assert m.coeffs[(0, 0)](x2)[0] / f(x2)[0] == pytest.approx(ratio, rel=1e-6)
    assert 0 < ratio.real < 1


def test_coeff_decay():
    h = library("hpm_example")
    x = np.linspace(0, 1, 200_001)[:, None]
    sup_f = float(np.abs(h.coeffs[(0,)](x)).max())
    assert sup_f == pytest.approx(0.5 + math.e, abs=1e-3)
    C2, ok = coeff_decay_check(h, 2)
    assert ok
    assert C2 == pytest.approx(max(sup_f, 0.5 * 2), abs=1e-3)
    C0, _ = coeff_decay_check(library("jordan"), 0)
    assert C0 == 1.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0))
def test_mollified_hpm_within_range(x):
    h = library("hpm_example")
    m = mollify(h, 1 / (2 * math.pi * 64))
    v = m.coeffs[(0,)](np.array([[x]]))[0].real
    assert -2.5 - 1e-9 <= v <= 0.5 + math.e + 1e-9
