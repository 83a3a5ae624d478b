"""
A perturbed Jordan block
========================

``J_N`` is nilpotent: every eigenvalue is 0. Adding ``2 E_{N,1}`` (a 2 in
the bottom-left corner) moves them to the circle of radius ``2^{1/N}``.
A tiny Gaussian perturbation of size ``N^{-1.6}`` pushes most eigenvalues
onto the unit circle, the range of the symbol ``e^{2 i pi xi}``.
"""

import math
import sys
from pathlib import Path

import numpy as np

from twistoeplitz.explab.figures import spectrum_svg
from twistoeplitz.perturb import DeltaSchedule, EnsembleSpec, sample
from twistoeplitz.quantize import build_matrix
from twistoeplitz.spectra import eigenvalues, log_potential_matrix
from twistoeplitz.symbol import library

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

N = 512
J = build_matrix(library("jordan"), N)
bumped = J.data.copy()
bumped[N - 1, 0] = 2.0

ev = eigenvalues(bumped, singular=False).eigenvalues
print(f"no noise: |lambda| in [{np.abs(ev).min():.6f}, {np.abs(ev).max():.6f}], 2^(1/N) = {2 ** (1 / N):.6f}")

delta = DeltaSchedule(0.5, 1.1).delta(N)
Q = sample(EnsembleSpec("ginibre_complex", seed=7, dim=N))
noisy = eigenvalues(bumped + delta * Q, singular=False).eigenvalues
frac = np.mean(np.abs(np.abs(noisy) - 1) <= 0.1)
print(f"delta = N^-1.6 = {delta:.2e}: {100 * frac:.1f}% of eigenvalues within 0.1 of the unit circle")
print("eigenvalue nearest to 2:", noisy[np.argmin(np.abs(noisy - 2))])

# without the corner bump the log potential matches that of the uniform measure on the circle
plain = J.data + delta * Q
for z in (0, 2, 1 + 1j):
    print(f"  log potential at z = {z}: {log_potential_matrix(plain, z):+.4f}  "
          f"(circle: {math.log(max(abs(z), 1)):+.4f})")

path = spectrum_svg(out / "perturbed_jordan.svg", noisy, title=f"J_N + 2E_(N,1) + delta Q, N = {N}")
print("wrote", path)
