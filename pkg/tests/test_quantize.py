import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistoeplitz import DomainError, PreconditionError
from twistoeplitz.quantize import (
    QuantMatrix, aliasing_decomposition_check, build_matrix, build_torus_matrix,
    index_grid, operator_norm, torus_coeffs, torus_coeffs_from_function,
    torus_coeffs_from_symbol, trace_formula_check,
)
from twistoeplitz.symbol import (
    CallableCoefficient, FrequencyLattice, PiecewiseCoefficient, Symbol, library,
)

TWO_PI = 2 * np.pi


def cos_shift_symbol():
    """p(x, xi) = cos(2 pi x) e^{2 i pi xi}."""
    return Symbol(FrequencyLattice((0,), (1,)), {(1,): PiecewiseCoefficient.from_expr("cos(2*pi*x)")})


def test_jordan_is_shift():
    for N in (4, 16, 128):
        M = build_matrix(library("jordan"), N)
        np.testing.assert_array_equal(M.data, np.eye(N, k=1))
        assert M.h * 2 * math.pi * N == pytest.approx(1.0, abs=1e-15)


def test_bidiagonal():
    M = build_matrix(library("bidiagonal(2,1)"), 5).data
    np.testing.assert_array_equal(M, 2 * np.eye(5, k=1) + np.eye(5, k=-1))


def test_constant_symbol():
    M = build_matrix(library("constant(1.5+2j)"), 7).data
    np.testing.assert_array_equal(M, (1.5 + 2j) * np.eye(7))


def test_position_dependence_uses_row_point():
    M = build_matrix(cos_shift_symbol(), 8).data
    s = np.arange(1, 8)
    np.testing.assert_allclose(np.diagonal(M, 1), np.cos(TWO_PI * s / 8), atol=1e-15)


def test_convolution_convention():
    p = library("bidiagonal(2,1)")
    A = build_matrix(p, 6, "paper_matrix").data
    B = build_matrix(p, 6, "convolution").data
    np.testing.assert_array_equal(A.T, B)
    C = build_matrix(cos_shift_symbol(), 8, "convolution").data
    s = np.arange(2, 9)
    np.testing.assert_allclose(np.diagonal(C, -1), np.cos(TWO_PI * s / 8), atol=1e-15)


def test_bandwidth_precondition():
    with pytest.raises(PreconditionError):
        build_matrix(library("jordan"), 1)
    with pytest.raises(PreconditionError):
        build_matrix(library("jordan"), 64, memory_budget=1000)


def test_linearity():
    rng = np.random.default_rng(3)
    lat = FrequencyLattice((1,), (1,))
    p = library("hpm_example")
    q = Symbol(lat, {(1,): PiecewiseCoefficient.from_expr("sin(2*pi*x)"),
                     (-1,): PiecewiseCoefficient.from_expr("x*x")})
    a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    combo = Symbol(lat, {nu: CallableCoefficient(lambda x, nu=nu: a * p.coeffs[nu](x) + b * q.coeffs[nu](x))
                         for nu in lat.frequencies})
    N = 32
    lhs = build_matrix(combo, N).data
    rhs = a * build_matrix(p, N).data + b * build_matrix(q, N).data
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_two_dimensional_lexicographic():
    lat = FrequencyLattice((0, 0), (0, 1))
    sym = Symbol(lat, {(0, 1): PiecewiseCoefficient.from_expr("x1", d=2)})
    N = 3
    M = build_matrix(sym, N).data
    assert M.shape == (9, 9)
    S = index_grid(N, 2)
    for r, s in enumerate(S):
        for c, j in enumerate(S):
            want = s[0] / N if (j[0] == s[0] and j[1] == s[1] + 1) else 0.0
            assert M[r, c] == pytest.approx(want)


def test_operator_norm_examples():
    assert operator_norm(build_matrix(library("jordan"), 32)) == pytest.approx(1.0)
    assert operator_norm(build_matrix(library("constant(3-4j)"), 9)) == pytest.approx(5.0)


def test_operator_norm_bounded():
    h = library("hpm_example")
    x = np.linspace(0, 1, 400_001)[:, None]
    sup_f = float(np.abs(h.coeffs[(0,)](x)).max())
    for N in (64, 128, 256):
        assert operator_norm(build_matrix(h, N)) <= (sup_f + 1) * (1 + 1e-6)
    norms = [operator_norm(build_matrix(h, N)) for N in (16, 32, 64, 128)]
    assert max(norms) <= 1.05 * max(norms[:2]) + 1e-12 or max(norms) <= (sup_f + 1)


def test_torus_coeffs_examples():
    one = torus_coeffs(np.ones((8, 8)), 1, 1)
    assert one.as_dict() == {((0,), (0,)): 1.0}
    grid = np.arange(8) / 8
    X, XI = np.meshgrid(grid, grid, indexing="ij")
    shift = torus_coeffs(np.exp(2j * np.pi * XI), 1, 1).as_dict()
    assert list(shift) == [((0,), (1,))]
    assert shift[((0,), (1,))] == pytest.approx(1.0)
    cc = torus_coeffs(np.cos(TWO_PI * X) * np.cos(TWO_PI * XI), 1, 1).as_dict()
    assert set(cc) == {((a,), (b,)) for a in (-1, 1) for b in (-1, 1)}
    for v in cc.values():
        assert v == pytest.approx(0.25)
    with pytest.raises(PreconditionError):
        torus_coeffs(np.ones((4, 4)), 2, 1)


def test_torus_identity_and_shift():
    one = torus_coeffs(np.ones((8, 8)), 1, 1)
    np.testing.assert_allclose(build_torus_matrix(one, 5, 0.5).data, np.eye(5), atol=1e-15)
    table = torus_coeffs_from_function(lambda x, xi: np.exp(2j * np.pi * xi[:, 0]), 1, 0, 1)
    F = build_torus_matrix(table, 6, 1).data
    expect = np.roll(np.eye(6), 1, axis=1)
    np.testing.assert_allclose(F, expect, atol=1e-14)
    with pytest.raises(DomainError):
        build_torus_matrix(table, 6, 0.25)


def test_torus_t_half_entry_formula():
    # hand formula for a single coefficient c_{n,m}: exp(i pi n (j+s)/N) (-1)^{n r}
    n, m, N = 3, 2, 5
    table = torus_coeffs_from_function(
        lambda x, xi: np.exp(2j * np.pi * (n * x[:, 0] + m * xi[:, 0])), 1, n, m)
    F = build_torus_matrix(table, N, 0.5).data
    for s in range(1, N + 1):
        j = (s + m - 1) % N + 1
        r = (s + m - j) // N
        want = np.exp(1j * np.pi * n * (j + s) / N) * (-1) ** (n * r)
        assert F[s - 1, j - 1] == pytest.approx(want, abs=1e-13)


def _real_trig(seed, K=2):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(2 * K + 1, 2 * K + 1)) + 1j * rng.normal(size=(2 * K + 1, 2 * K + 1))
    ks = np.arange(-K, K + 1)

    def f(x, xi):
        phase = np.exp(2j * np.pi * (x[:, :1] * ks[None, :]))[:, :, None] * \
            np.exp(2j * np.pi * (xi[:, :1] * ks[None, :]))[:, None, :]
        return np.real(np.einsum("pab,ab->p", phase, c))

    return f


@pytest.mark.parametrize("seed", range(3))
def test_hermitian_for_real_functions(seed):
    table = torus_coeffs_from_function(_real_trig(seed), 1, 2, 2)
    F = build_torus_matrix(table, 32, 0.5).data
    assert np.abs(F - F.conj().T).max() <= 1e-10


def test_torus_norm_close_to_sup():
    f = lambda x, xi: 2 + np.cos(TWO_PI * x[:, 0]) + np.cos(TWO_PI * xi[:, 0])  # noqa: E731
    table = torus_coeffs_from_function(f, 1, 2, 2)
    for N in (64, 128):
        assert operator_norm(build_torus_matrix(table, N, 0.5)) <= 4.0 + 0.1


def test_trace_formula_examples():
    one = torus_coeffs(np.ones((8, 8)), 1, 1)
    lhs, rhs, resid = trace_formula_check(one, 8)
    assert lhs == pytest.approx(8) and rhs == pytest.approx(8) and resid <= 1e-12
    f = lambda x, xi: 2 + np.cos(TWO_PI * x[:, 0]) + np.cos(TWO_PI * xi[:, 0])  # noqa: E731
    lhs, rhs, resid = trace_formula_check(torus_coeffs_from_function(f, 1, 2, 2), 64)
    assert lhs == pytest.approx(128) and resid <= 1e-9 * 64
    for N in (8, 16):
        g = lambda x, xi, N=N: np.cos(TWO_PI * N * x[:, 0])  # noqa: E731
        _, _, resid = trace_formula_check(torus_coeffs_from_function(g, 1, N, 0), N)
        assert resid == pytest.approx(N, abs=1e-9)


def test_trace_formula_2d():
    f = lambda x, xi: 1 + np.cos(TWO_PI * x[:, 0]) * np.cos(TWO_PI * xi[:, 1])  # noqa: E731
    table = torus_coeffs_from_function(f, 2, 1, 1)
    lhs, rhs, resid = trace_formula_check(table, 6)
    assert rhs == pytest.approx(36) and resid <= 1e-9 * 36


def test_aliasing_examples():
    rep = aliasing_decomposition_check(library("jordan"), 8)
    assert rep.band_deviation == 0.0 and rep.wrap_deviation <= 1e-14
    T = build_torus_matrix(torus_coeffs_from_symbol(library("jordan"), 2), 8, 1.0).data
    assert T[7, 0] == pytest.approx(1.0)
    rep = aliasing_decomposition_check(library("constant(2)"), 8)
    assert rep.max_deviation <= 1e-14 and rep.wrap_magnitude == 0.0
    p = cos_shift_symbol()
    rep = aliasing_decomposition_check(p, 16)
    assert rep.max_deviation <= 1e-10
    T = build_torus_matrix(torus_coeffs_from_symbol(p, 4), 16, 1.0).data
    M = build_matrix(p, 16).data
    assert (T - M)[15, 0] == pytest.approx(np.cos(TWO_PI * 16 / 16), abs=1e-12)


def test_aliasing_precondition():
    with pytest.raises(PreconditionError):
        aliasing_decomposition_check(library("hpm_example"), 16)
    with pytest.raises(PreconditionError):
        aliasing_decomposition_check(library("jordan"), 2)


def test_binary_roundtrip(tmp_path):
    M = build_matrix(library("hpm_example"), 12)
    path = M.to_binary(tmp_path / "m.twqm")
    raw = path.read_bytes()
    assert raw[:4] == b"TWQM" and len(raw) == 16 + 16 * 144
    back = QuantMatrix.from_binary(path)
    np.testing.assert_array_equal(back.data, M.data)
    assert back.N == 12 and back.d == 1
    with pytest.raises(DomainError):
        (tmp_path / "bad").write_bytes(b"XXXX" + raw[4:])
        QuantMatrix.from_binary(tmp_path / "bad")


def test_csv_export(tmp_path):
    M = build_matrix(library("bidiagonal(2,1)"), 4)
    lines = M.to_csv(tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 1 + 6
    assert "0,1,2.0,0.0" in lines


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16, 33]))
def test_hermitian_property(seed, N):
    table = torus_coeffs_from_function(_real_trig(seed, K=1), 1, 1, 1)
    F = build_torus_matrix(table, N, 0.5).data
    assert np.abs(F - F.conj().T).max() <= 1e-10
