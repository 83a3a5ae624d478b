"""
Checking the volume assumptions
===============================

The sublevel volume ``V_z(t) = |{(x, xi) : |p(x, xi) - z|^2 <= t}|`` should
grow like a power of ``t``. For the Jordan symbol at ``z = 1`` it is exactly
``(2/pi) arcsin(sqrt(t)/2) ~ sqrt(t)/pi``. A closed-form criterion gives an
explicit bound ``C t^kappa`` from the frequency lattice and a lower bound on
the non-constant coefficients.
"""

import numpy as np

from twistoeplitz.assumptions import (
    criterion_constants, estimate_volume, fit_exponent, thickened_singularity_volume,
    uniform_bound_check,
)
from twistoeplitz.symbol import library

t = np.logspace(-4, -1, 7)
est = estimate_volume(library("jordan"), 1.0, t, n_mc=100_000, seed=0)
exact = (2 / np.pi) * np.arcsin(np.sqrt(t) / 2)
print("      t      estimate    stderr     exact")
for row in zip(t, est.vhat, est.stderr, exact):
    print("  {:.1e}   {:.5f}   {:.5f}   {:.5f}".format(*row))
kappa, C, r2 = fit_exponent(est)
print(f"fitted exponent {kappa:.3f} (r^2 = {r2:.4f})")

for name in ("jordan", "hpm_example", "bidiagonal(2,1)"):
    c = criterion_constants(library(name), margin=0.0)
    print(f"{name:>16}: S = {c.S}, Xi = {c.Xi}, m = {c.m_lower:.3f}, kappa = {c.kappa}, C = {c.C:.3f}")

hpm = library("hpm_example")
check = uniform_bound_check(hpm, criterion_constants(hpm), t, z_points=5, n_mc=20_000)
print(f"bound over a 5x5 grid of z: passed = {check.passed}, worst margin {check.worst_margin:.3f}")

for r in (0.1, 0.01, 0.001):
    print(f"measure of the {r}-neighbourhood of the jumps of f: {thickened_singularity_volume(hpm, r):.4f}")
