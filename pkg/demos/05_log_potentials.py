"""
Logarithmic potentials and the mollified symbol
===============================================

The log potential of the spectral measure, ``(1/N) log|det(M - z)|``, is
computed from singular values. Comparing it with the potential of the
push-forward sample is a distance that does not need a matching.

Convolving the coefficients with a bump of width ``h^eta`` gives a smooth
surrogate symbol. Small singular values of its matrix are counted below
``alpha = N^-omega``; the count stays proportional to ``N alpha^kappa``.
"""

import math

import numpy as np

from twistoeplitz.perturb import EnsembleSpec, sample
from twistoeplitz.quantize import build_matrix
from twistoeplitz.spectra import (
    EmpiricalMeasure, eigenvalues, log_potential_matrix, log_potential_measure,
    measure_distance, pushforward_measure, singular_count,
)
from twistoeplitz.symbol import library, mollify

hpm = library("hpm_example")
ref = pushforward_measure(hpm, 4096)
N = 400
M = build_matrix(hpm, N).data + N ** -1.6 * sample(EnsembleSpec("ginibre_complex", 1, N))
mu = EmpiricalMeasure(eigenvalues(M, singular=False).eigenvalues)
for z in (-1 + 0.5j, 2.0, 3 + 2j):
    print(f"z = {z}: matrix {log_potential_matrix(M, z):+.4f}, spectrum {log_potential_measure(mu, z):+.4f}, "
          f"push-forward {log_potential_measure(ref, z):+.4f}")
print(f"max potential gap over a grid: {measure_distance(mu, ref, 'logpot_grid'):.4f}")

omega = min(1.1, hpm.holder * (1 / 6) / 3, (1 / 6) / 2)
print(f"\nomega = {omega:.4f}")
for N in (128, 256, 512):
    h = 1 / (2 * math.pi * N)
    A = build_matrix(mollify(hpm, h), N)
    alpha = N ** -omega
    m = singular_count(A, -1 + 0.5j, alpha)
    print(f"N = {N}: {m} squared singular values of M - z below {alpha:.3f}; m / (N alpha^1/4) = "
          f"{m / (N * alpha ** 0.25):.3f}")
x = np.linspace(0, 1, 7)[:, None]
print("\nf and its mollification at N = 512:")
print(np.c_[x, hpm.coeffs[(0,)](x).real, mollify(hpm, 1 / (2 * math.pi * 512)).coeffs[(0,)](x).real].round(4))
