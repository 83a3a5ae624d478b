"""Twisted Toeplitz matrices and torus quantizations.

Two families of ``N^d x N^d`` matrices are built here, with rows and
columns indexed by ``s in [[1, N]]^d`` in lexicographic order and
``x_s = s / N``:

* :func:`build_matrix` places symbol coefficients on the diagonals,
  ``M[s, j] = p_{j-s}(x_s)`` (``paper_matrix``) or ``p_{s-j}(x_s)``
  (``convolution``).
* :func:`build_torus_matrix` quantizes a function on the ``2d``-torus from
  its Fourier table ``c_{n,m}`` with the ``t``-quantization, ``t`` in
  ``{1/2, 1}``.

Examples
--------
>>> from twistoeplitz.symbol import library
>>> build_matrix(library("jordan"), 4).data.real
array([[0., 1., 0., 0.],
       [0., 0., 1., 0.],
       [0., 0., 0., 1.],
       [0., 0., 0., 0.]])
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg

from ._errors import DomainError, PreconditionError
from .symbol import Symbol

__all__ = [
    "QuantizationConvention", "QuantMatrix", "TorusCoeffTable", "AliasingReport",
    "build_matrix", "operator_norm", "torus_coeffs", "torus_coeffs_from_function",
    "torus_coeffs_from_symbol", "build_torus_matrix", "trace_formula_check",
    "aliasing_decomposition_check", "index_grid",
]

MAGIC = b"TWQM"
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class QuantizationConvention(str, Enum):
    PAPER_MATRIX = "paper_matrix"
    CONVOLUTION = "convolution"


def index_grid(N: int, d: int) -> np.ndarray:
    """All ``s in [[1, N]]^d`` in lexicographic order, shape ``(N^d, d)``."""
    axes = np.meshgrid(*([np.arange(1, N + 1)] * d), indexing="ij")
    return np.stack(axes, -1).reshape(-1, d)


def _flat(idx: np.ndarray, N: int) -> np.ndarray:
    """Lexicographic position of 1-based multi-indices."""
    weights = N ** np.arange(idx.shape[1] - 1, -1, -1)
    return (idx - 1) @ weights


@dataclass(eq=False)
class QuantMatrix:
    """Dense quantization matrix plus the metadata needed to reproduce it."""

    data: np.ndarray
    N: int
    d: int = 1
    label: str = ""
    convention: str = QuantizationConvention.PAPER_MATRIX.value
    mollified: bool = False
    eta: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise DomainError("quantization matrix must be square")
        if self.data.shape[0] != self.N**self.d:
            raise DomainError(f"dimension {self.data.shape[0]} differs from N^d = {self.N ** self.d}")

    @property
    def h(self) -> float:
        """Semiclassical parameter ``1 / (2 pi N)``."""
        return 1.0 / (2.0 * math.pi * self.N)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def to_binary(self, path) -> Path:
        """Header ``TWQM``, u32 dim, u32 N, u32 d; then row-major interleaved re/im float64 (LE)."""
        path = Path(path)
        with path.open("wb") as fh:
            fh.write(MAGIC + struct.pack("<III", self.dim, self.N, self.d))
            fh.write(np.ascontiguousarray(self.data, dtype="<c16").tobytes())
        return path

    @classmethod
    def from_binary(cls, path, label: str = "") -> "QuantMatrix":
        raw = Path(path).read_bytes()
        if raw[:4] != MAGIC:
            raise DomainError("not a TWQM file")
        dim, N, d = struct.unpack("<III", raw[4:16])
        data = np.frombuffer(raw[16:], dtype="<c16")
        if data.size != dim * dim:
            raise DomainError("truncated TWQM file")
        return cls(data.reshape(dim, dim).astype(complex), N, d, label=label)

    def to_csv(self, path, threshold: float = 1e-14) -> Path:
        """Rows ``(row, col, re, im)`` (0-based) for entries with modulus above `threshold`."""
        path = Path(path)
        rows, cols = np.nonzero(np.abs(self.data) > threshold)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "re", "im"])
            for r, c in zip(rows, cols):
                v = self.data[r, c]
                w.writerow([int(r), int(c), repr(float(v.real)), repr(float(v.imag))])
        return path


def build_matrix(
    sym: Symbol,
    N: int,
    conv: QuantizationConvention | str = QuantizationConvention.PAPER_MATRIX,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> QuantMatrix:
    """Twisted Toeplitz matrix of `sym`.

    Parameters
    ----------
    sym : Symbol
    N : int
        Points per axis; must exceed the largest lattice frequency.
    conv : {"paper_matrix", "convolution"}
        Index convention for the diagonals.
    memory_budget : int
        Maximum bytes for the dense matrix.

    Returns
    -------
    QuantMatrix
    """
    conv = QuantizationConvention(conv)
    N = int(N)
    if N <= sym.lattice.max_frequency:
        raise PreconditionError(f"N = {N} does not exceed the bandwidth {sym.lattice.max_frequency}")
    dim = N**sym.d
    if 16 * dim * dim > memory_budget:
        raise PreconditionError(f"a {dim}x{dim} complex matrix exceeds the memory budget")
    S = index_grid(N, sym.d)
    x = S / N
    rows = np.arange(dim)
    data = np.zeros((dim, dim), dtype=complex)
    sign = 1 if conv is QuantizationConvention.PAPER_MATRIX else -1
    for nu in sym.lattice.frequencies:
        J = S + sign * np.asarray(nu)
        ok = np.all((J >= 1) & (J <= N), axis=1)
        if not ok.any():
            continue
        vals = sym.coeffs[nu](x[ok])
        data[rows[ok], _flat(J[ok], N)] = vals
    meta = sym.meta
    return QuantMatrix(
        data, N, sym.d, label=sym.label, convention=conv.value,
        mollified="mollify_h" in meta, eta=meta.get("mollify_eta"),
    )


def operator_norm(M) -> float:
    """Largest singular value."""
    data = M.data if isinstance(M, QuantMatrix) else np.asarray(M)
    if data.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(data)[0])


# ---------------------------------------------------------------------------
# torus quantization

@dataclass(frozen=True, eq=False)
class TorusCoeffTable:
    """Sparse table of ``c_{n,m}``, ``|n| <= K_n`` and ``|m| <= K_m`` componentwise."""

    n: np.ndarray
    m: np.ndarray
    c: np.ndarray
    K_n: int
    K_m: int

    @property
    def d(self) -> int:
        return self.n.shape[1]

    def get(self, n, m) -> complex:
        hit = np.all(self.n == np.asarray(n), axis=1) & np.all(self.m == np.asarray(m), axis=1)
        return complex(self.c[hit].sum())

    def as_dict(self) -> dict:
        return {(tuple(map(int, a)), tuple(map(int, b))): complex(v) for a, b, v in zip(self.n, self.m, self.c)}


def torus_coeffs(f_samples, K_n: int, K_m: int, drop_tol: float = 1e-14) -> TorusCoeffTable:
    """Fourier coefficients of ``f`` on ``T^{2d}`` from a uniform grid of samples.

    Parameters
    ----------
    f_samples : array of shape ``(Mx_1, ..., Mx_d, Mxi_1, ..., Mxi_d)``
        ``f(k / Mx, l / Mxi)``.
    K_n, K_m : int
        Radii kept in the position and frequency variables.
    drop_tol : float
        Coefficients with modulus below ``drop_tol * max|c|`` are discarded.
    """
    f = np.asarray(f_samples, dtype=complex)
    if f.ndim % 2 or f.ndim == 0:
        raise PreconditionError("samples must have 2d axes")
    d = f.ndim // 2
    for k, size in enumerate(f.shape):
        K = K_n if k < d else K_m
        if size < max(4 * K, 2 * K + 1):
            raise PreconditionError(f"axis {k} has {size} samples, fewer than needed for radius {K}")
    spec = np.fft.fftn(f) / f.size
    rn = np.arange(-K_n, K_n + 1)
    rm = np.arange(-K_m, K_m + 1)
    grids = np.meshgrid(*([rn] * d + [rm] * d), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], -1)
    vals = spec[tuple(np.mod(idx[:, k], f.shape[k]) for k in range(2 * d))]
    keep = np.abs(vals) > drop_tol * max(1.0, float(np.abs(vals).max()))
    return TorusCoeffTable(idx[keep, :d], idx[keep, d:], vals[keep], int(K_n), int(K_m))


def torus_coeffs_from_function(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    d: int,
    K_n: int,
    K_m: int,
    grid: tuple[int, int] | None = None,
) -> TorusCoeffTable:
    """Sample ``f(x, xi)`` (vectorized over ``(n, d)`` arrays) and take its coefficient table."""
    mx, mxi = grid or (max(4 * K_n, 8), max(4 * K_m, 8))
    ax = [np.arange(mx) / mx] * d + [np.arange(mxi) / mxi] * d
    mesh = np.meshgrid(*ax, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], -1)
    vals = np.asarray(f(pts[:, :d], pts[:, d:]), dtype=complex)
    return torus_coeffs(vals.reshape(mesh[0].shape), K_n, K_m)


def torus_coeffs_from_symbol(sym: Symbol, K_n: int, grid_x: int | None = None) -> TorusCoeffTable:
    """Coefficient table of ``p`` viewed as a function on ``T^{2d}``.

    The frequency variable is already a trigonometric polynomial, so only
    the position variable is sampled (``grid_x`` points per axis).
    """
    d = sym.d
    mx = grid_x or max(4 * K_n, 8)
    if mx < max(4 * K_n, 2 * K_n + 1):
        raise PreconditionError(f"{mx} position samples undersample radius {K_n}")
    mesh = np.meshgrid(*([np.arange(mx) / mx] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], -1)
    rn = np.arange(-K_n, K_n + 1)
    ngrid = np.stack([g.ravel() for g in np.meshgrid(*([rn] * d), indexing="ij")], -1)
    ns, ms, cs = [], [], []
    for nu in sym.lattice.frequencies:
        vals = sym.coeffs[nu](pts).reshape(mesh[0].shape)
        spec = np.fft.fftn(vals) / vals.size
        c = spec[tuple(np.mod(ngrid[:, k], mx) for k in range(d))]
        ns.append(ngrid)
        ms.append(np.tile(np.asarray(nu), (len(ngrid), 1)))
        cs.append(c)
    n, m, c = np.concatenate(ns), np.concatenate(ms), np.concatenate(cs)
    keep = np.abs(c) > 1e-14 * max(1.0, float(np.abs(c).max()))
    return TorusCoeffTable(n[keep], m[keep], c[keep], int(K_n), sym.lattice.max_frequency)


def build_torus_matrix(
    table: TorusCoeffTable, N: int, t: float = 0.5, K_r: int | None = None, label: str = ""
) -> QuantMatrix:
    """Matrix of the ``t``-quantization of the function with coefficients `table`.

    Entry ``(s, j)`` is
    ``sum_{n, r} c_{n, j-s+rN} exp(2 i pi/N [(1-t)<n, j> + t<n, s - rN>])``.
    Each ``(n, m)`` in the table lands on exactly one column per row, with
    ``j = s + m - rN``; `K_r` optionally drops terms with ``max|r| > K_r``.
    """
    if t not in (0.5, 1, 1.0):
        raise DomainError("only t = 1/2 and t = 1 are supported")
    d = table.d
    N = int(N)
    S = index_grid(N, d)
    rows = np.arange(S.shape[0])
    data = np.zeros((S.shape[0], S.shape[0]), dtype=complex)
    for n, m, c in zip(table.n, table.m, table.c):
        J = np.mod(S + m - 1, N) + 1
        R = (S + m - J) // N
        keep = slice(None) if K_r is None else np.max(np.abs(R), axis=1) <= K_r
        phase = (2j * np.pi / N) * ((1 - t) * (J @ n) + t * ((S - R * N) @ n))
        data[rows[keep], _flat(J[keep], N)] += c * np.exp(phase[keep])
    return QuantMatrix(data, N, d, label=label or f"torus(t={t})", convention=f"torus_t={t}")


def trace_formula_check(table: TorusCoeffTable, N: int) -> tuple[complex, complex, float]:
    """Return ``(tr F, N^d c_{0,0}, |tr F - N^d c_{0,0}|)`` for the ``t = 1/2`` quantization."""
    F = build_torus_matrix(table, N, 0.5)
    lhs = complex(np.trace(F.data))
    rhs = N**table.d * table.get((0,) * table.d, (0,) * table.d)
    return lhs, rhs, abs(lhs - rhs)


@dataclass(frozen=True)
class AliasingReport:
    """Entrywise comparison of the twisted Toeplitz and ``t = 1`` torus matrices.

    Attributes
    ----------
    band_deviation : max ``|T - M|`` over entries with ``|j - s| < N - deg`` (all axes)
    wrap_deviation : max ``|(T - M) - W|`` off the band, ``W`` the wrap-around terms
        ``sum_{r != 0} p_{j-s+rN}(s/N)``
    wrap_magnitude : max ``|W|``
    """

    band_deviation: float
    wrap_deviation: float
    wrap_magnitude: float

    @property
    def max_deviation(self) -> float:
        return max(self.band_deviation, self.wrap_deviation)


def _periodic_matrix(sym: Symbol, N: int) -> np.ndarray:
    """``sum_r p_{j-s+rN}(s/N)``: the diagonals of ``M_N(p)`` wrapped mod N."""
    S = index_grid(N, sym.d)
    rows = np.arange(S.shape[0])
    out = np.zeros((S.shape[0],) * 2, dtype=complex)
    x = S / N
    for nu in sym.lattice.frequencies:
        J = np.mod(S + np.asarray(nu) - 1, N) + 1
        out[rows, _flat(J, N)] += sym.coeffs[nu](x)
    return out


def aliasing_decomposition_check(sym: Symbol, N: int, K_n: int = 32) -> AliasingReport:
    """Compare ``M_N(p)`` with the ``t = 1`` torus quantization of ``p``.

    The symbol must be periodic and smooth in ``x`` so that its position
    Fourier series truncated at `K_n` reproduces it to quadrature accuracy.
    """
    if any(sym.planes):
        raise PreconditionError("aliasing check needs a symbol smooth and periodic in x")
    deg = sym.lattice.max_frequency
    if 2 * deg >= N:
        raise PreconditionError("the largest frequency must be below N/2")
    M = build_matrix(sym, N).data
    T = build_torus_matrix(torus_coeffs_from_symbol(sym, K_n), N, 1.0).data
    W = _periodic_matrix(sym, N) - M
    S = index_grid(N, sym.d)
    gap = np.abs(S[:, None, :] - S[None, :, :]).max(axis=2)
    band = gap < N - deg
    diff = T - M
    return AliasingReport(
        band_deviation=float(np.abs(diff[band]).max()),
        wrap_deviation=float(np.abs(diff[~band] - W[~band]).max()) if (~band).any() else 0.0,
        wrap_magnitude=float(np.abs(W).max()),
    )
