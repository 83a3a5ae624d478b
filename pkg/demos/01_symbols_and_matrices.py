"""
Symbols and their matrices
==========================

A symbol ``p(x, xi) = sum_k p_k(x) e^{2 i pi k xi}`` is a finite list of
position-dependent Fourier coefficients. Sampling ``p_k`` at ``x = s/N`` on
the ``k``-th diagonal gives the twisted Toeplitz matrix ``M_N(p)``.
"""

import numpy as np

from twistoeplitz.quantize import aliasing_decomposition_check, build_matrix, operator_norm
from twistoeplitz.symbol import FrequencyLattice, PiecewiseCoefficient, Symbol, eval_symbol, library

np.set_printoptions(precision=3, suppress=True, linewidth=110)

# the shift e^{2 i pi xi} gives the Jordan block
J = build_matrix(library("jordan"), 5)
print("M_5(e^{2 i pi xi}) =\n", J.data.real)

# a constant-coefficient bidiagonal symbol 2 e^{2 i pi xi} + e^{-2 i pi xi}
B = build_matrix(library("bidiagonal(2,1)"), 5)
print("\nbidiagonal(2, 1), N = 5:\n", B.data.real)

# coefficients can depend on x; here p(x, xi) = cos(2 pi x) e^{2 i pi xi}
sym = Symbol(FrequencyLattice((0,), (1,)), {(1,): PiecewiseCoefficient.from_expr("cos(2*pi*x)")})
M = build_matrix(sym, 8)
print("\nsuperdiagonal of M_8(cos(2 pi x) e^{2 i pi xi}):", np.diagonal(M.data, 1).real)

# the piecewise example: f(x) + i cos(2 pi xi) with f jumping at x = 1/3 and 2/3
hpm = library("hpm_example")
print("\nhpm_example at (x, xi) = (0.8, 0.1):", eval_symbol(hpm, 0.8, 0.1))
print("breakpoints of the x-coefficients:", hpm.singularities)
for N in (32, 128, 512):
    print(f"  ||M_{N}|| = {operator_norm(build_matrix(hpm, N)):.4f}")

# the periodic (torus) matrix differs from M_N only by the wrap-around corners
rep = aliasing_decomposition_check(sym, 16)
print(f"\ntorus vs banded matrix: band deviation {rep.band_deviation:.1e}, "
      f"corner magnitude {rep.wrap_magnitude:.3f}")
