"""Random perturbation ensembles and the coupling constant delta(N).

Every sample is a pure function of ``(kind, dim, seed)``: the triple is
hashed (BLAKE2b, 128 bits) into the key of a counter-based Philox
generator, so each matrix has its own stream. The result is the same
whatever the order or thread in which samples are drawn.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from ._errors import DomainError, PreconditionError

__all__ = [
    "EnsembleKind", "EnsembleSpec", "DeltaSchedule", "sample", "rng_for",
    "default_kappa3", "smin_anticoncentration_probe",
]


class EnsembleKind(str, Enum):
    GINIBRE = "ginibre_complex"
    HAAR = "haar_unitary_scaled"
    BERNOULLI = "bernoulli_pm1"


@dataclass(frozen=True)
class EnsembleSpec:
    """Law of the perturbation ``Q``.

    ``ginibre_complex``: iid ``(a + i b) / sqrt(2)`` with ``a, b`` standard normal.
    ``haar_unitary_scaled``: ``sqrt(dim) U`` with ``U`` Haar on ``U(dim)``.
    ``bernoulli_pm1``: iid signs.
    """

    kind: EnsembleKind | str
    seed: int
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if int(self.dim) < 1:
            raise DomainError("dim must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "seed", int(self.seed))


def rng_for(kind: str, dim: int, seed: int) -> np.random.Generator:
    """Philox generator keyed by a hash of ``(kind, dim, seed)``."""
    digest = hashlib.blake2b(f"{kind}|{dim}|{seed}".encode(), digest_size=16).digest()
    return np.random.Generator(np.random.Philox(key=int.from_bytes(digest, "little")))


def sample(spec: EnsembleSpec) -> np.ndarray:
    """Draw the ``dim x dim`` complex matrix described by `spec`."""
    n = spec.dim
    rng = rng_for(spec.kind.value, n, spec.seed)
    if spec.kind is EnsembleKind.BERNOULLI:
        return (2.0 * rng.integers(0, 2, size=(n, n)) - 1.0).astype(complex)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    if spec.kind is EnsembleKind.GINIBRE:
        return g
    # Haar: Q from QR, with the phases of diag(R) moved into Q so the law is invariant
    q, r = scipy.linalg.qr(g)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))[None, :]
    return np.sqrt(n) * q


def default_kappa3(kind: EnsembleKind | str, d: int = 1) -> float:
    """Exponent with ``E||Q|| = O(N^{kappa3})``; ``d / 2`` for all built-in ensembles."""
    EnsembleKind(kind)
    return d / 2.0


@dataclass(frozen=True)
class DeltaSchedule:
    """``delta(N) = N^{-(kappa3 + delta0)}``."""

    kappa3: float = 0.5
    delta0: float = 1.1

    def __post_init__(self):
        if self.kappa3 < 0 or self.delta0 <= 0:
            raise DomainError("need kappa3 >= 0 and delta0 > 0")

    @property
    def exponent(self) -> float:
        return self.kappa3 + self.delta0

    def delta(self, N: int) -> float:
        if N < 1:
            raise DomainError("N must be positive")
        return float(N) ** (-self.exponent)


def smin_anticoncentration_probe(
    spec: EnsembleSpec, A, beta: float, trials: int, d: int = 1
) -> float:
    """Fraction of trials with ``s_min(A + Q) <= dim^(-beta/d)``.

    Trial ``k`` uses seed ``spec.seed + k``.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape != (spec.dim, spec.dim):
        raise PreconditionError(f"A has shape {A.shape}, expected {(spec.dim, spec.dim)}")
    if trials < 1:
        raise DomainError("need at least one trial")
    threshold = spec.dim ** (-beta / d)
    hits = 0
    for k in range(trials):
        Q = sample(EnsembleSpec(spec.kind, (spec.seed + k) % 2**64, spec.dim))
        hits += scipy.linalg.svdvals(A + Q)[-1] <= threshold
    return hits / trials
