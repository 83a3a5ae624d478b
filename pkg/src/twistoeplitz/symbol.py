"""Symbols p(x, xi) = sum_nu p_nu(x) exp(2 i pi <nu, xi>).

A :class:`Symbol` is smooth (here: a trigonometric polynomial) in the
frequency variable ``xi`` on the torus and only piecewise Hölder in the
position variable ``x`` in ``[0, 1]^d``. Each Fourier coefficient
``p_nu`` is a coefficient object: a callable taking an ``(n, d)`` array of
positions and returning ``n`` complex values, exposing the per-axis
interior breakpoints of its pieces.

Piece boundaries follow a right-continuous convention: a piece covers the
half-open box ``[lower, upper)``, closed at 1. Periodization in ``x`` (used
only by :func:`mollify`) sends ``x = 0`` to the value at ``x = 1``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, special

from ._errors import AccuracyError, DomainError, PreconditionError
from ._expr import compile_expr, validate_expr

__all__ = [
    "FrequencyLattice", "Piece", "PiecewiseCoefficient", "CallableCoefficient",
    "MollifiedCoefficient", "Symbol", "MollifierSpec",
    "eval_symbol", "project_to_lattice", "bump", "mollify", "coeff_decay_check",
    "library", "to_manifest", "from_manifest", "save_manifest", "load_manifest",
    "as_points",
]

_GLUE_TOL = 1e-12
_GRADING = 3


def as_points(x, d: int) -> tuple[np.ndarray, bool]:
    """Coerce `x` to an ``(n, d)`` float array; report whether it was a single point."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if d != 1:
            raise DomainError(f"scalar point given for dimension {d}")
        return arr.reshape(1, 1), True
    if d == 1 and arr.ndim == 1:
        return arr.reshape(-1, 1), False
    if arr.ndim == 1 and arr.shape[0] == d:
        return arr.reshape(1, d), True
    if arr.ndim == 2 and arr.shape[1] == d:
        return arr, False
    raise DomainError(f"points of shape {arr.shape} do not match dimension {d}")


def _periodize(x: np.ndarray) -> np.ndarray:
    """Reduce to (0, 1]^d: restrict to ]0,1] and extend by Z^d-periodicity."""
    u = x - np.floor(x)
    u[u == 0.0] = 1.0
    return u


# ---------------------------------------------------------------------------
# lattice and coefficients

@dataclass(frozen=True)
class FrequencyLattice:
    """Box of frequencies prod_j [-lows[j], highs[j]] in Z^d."""

    lows: tuple[int, ...]
    highs: tuple[int, ...]

    def __post_init__(self):
        lows = tuple(int(v) for v in self.lows)
        highs = tuple(int(v) for v in self.highs)
        if len(lows) == 0 or len(lows) != len(highs):
            raise DomainError("lows and highs must be non-empty and of equal length")
        if min(lows) < 0 or min(highs) < 0:
            raise DomainError("lattice bounds must be non-negative")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def d(self) -> int:
        return len(self.lows)

    @cached_property
    def frequencies(self) -> tuple[tuple[int, ...], ...]:
        """All frequencies, lexicographic order."""
        axes = [range(-lo, hi + 1) for lo, hi in zip(self.lows, self.highs)]
        return tuple(itertools.product(*axes))

    @property
    def max_frequency(self) -> int:
        return max(max(self.lows), max(self.highs))

    def __contains__(self, nu) -> bool:
        return len(nu) == self.d and all(-lo <= v <= hi for v, lo, hi in zip(nu, self.lows, self.highs))

    def __len__(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True)
class Piece:
    """Closed-form expression on the half-open box ``[lower, upper)``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    expr: str

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper):
            raise DomainError("piece bounds of unequal dimension")
        for lo, hi in zip(self.lower, self.upper):
            if not 0.0 <= lo < hi <= 1.0:
                raise DomainError(f"bad piece bounds {self.lower} .. {self.upper}")
        validate_expr(self.expr, len(self.lower))

    def contains(self, x: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        upper_ok = (x < hi) | ((hi == 1.0) & (x == 1.0))
        return np.all((x >= lo) & upper_ok, axis=1)

    @property
    def volume(self) -> float:
        return math.prod(hi - lo for lo, hi in zip(self.lower, self.upper))


@dataclass(frozen=True)
class PiecewiseCoefficient:
    """Coefficient function given by closed-form expressions on boxes."""

    pieces: tuple[Piece, ...]
    holder: float = 1.0

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise DomainError("a coefficient needs at least one piece")
        d = len(pieces[0].lower)
        if any(len(p.lower) != d for p in pieces):
            raise DomainError("pieces of mixed dimension")
        if not 0.0 < self.holder <= 1.0:
            raise DomainError("Hölder exponent must lie in (0, 1]")
        total = sum(p.volume for p in pieces)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"pieces cover volume {total}, expected 1")
        for a, b in itertools.combinations(pieces, 2):
            overlap = math.prod(
                max(0.0, min(ah, bh) - max(al, bl))
                for al, ah, bl, bh in zip(a.lower, a.upper, b.lower, b.upper)
            )
            if overlap > 1e-14:
                raise DomainError("pieces overlap")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def constant(cls, value: complex, d: int = 1) -> "PiecewiseCoefficient":
        return cls((Piece((0.0,) * d, (1.0,) * d, repr(complex(value))),))

    @classmethod
    def from_expr(cls, expr: str, d: int = 1, holder: float = 1.0) -> "PiecewiseCoefficient":
        return cls((Piece((0.0,) * d, (1.0,) * d, expr),), holder)

    @property
    def d(self) -> int:
        return len(self.pieces[0].lower)

    @property
    def breakpoints(self) -> tuple[tuple[float, ...], ...]:
        out = []
        for k in range(self.d):
            pts = {p.lower[k] for p in self.pieces} | {p.upper[k] for p in self.pieces}
            out.append(tuple(sorted(v for v in pts if 0.0 < v < 1.0)))
        return tuple(out)

    @property
    def is_tensor_grid(self) -> bool:
        """True when the pieces are exactly the cells cut out by the axis breakpoints."""
        grids = [(0.0,) + b + (1.0,) for b in self.breakpoints]
        return len(self.pieces) == math.prod(len(g) - 1 for g in grids)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape[0], np.nan, dtype=complex)
        for piece in self.pieces:
            mask = piece.contains(x)
            if mask.any():
                out[mask] = compile_expr(piece.expr, self.d)(x[mask])
        return out


@dataclass(frozen=True, eq=False)
class CallableCoefficient:
    """Wrap an arbitrary vectorized ``func(x: (n, d)) -> (n,)``; not serializable."""

    func: Callable[[np.ndarray], np.ndarray]
    d: int = 1
    breakpoints: tuple[tuple[float, ...], ...] = ()
    holder: float = 1.0

    def __post_init__(self):
        if not self.breakpoints:
            object.__setattr__(self, "breakpoints", ((),) * self.d)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(self.func(x), dtype=complex).reshape(x.shape[0])


# ---------------------------------------------------------------------------
# the symbol

@dataclass(frozen=True, eq=False)
class Symbol:
    """A symbol with finitely many frequencies.

    Parameters
    ----------
    lattice : FrequencyLattice
    coeffs : mapping from frequency tuples to coefficient objects
        Frequencies of the lattice missing from the mapping are identically zero.
    label : str
    singular_planes : optional per-axis tuple of hyperplane coordinates
        Overrides the singularity set derived from the pieces.
    meta : dict
        Free provenance (e.g. mollification parameters).
    """

    lattice: FrequencyLattice
    coeffs: Mapping[tuple[int, ...], object]
    label: str = "symbol"
    singular_planes: tuple[tuple[float, ...], ...] | None = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        d = self.lattice.d
        full = {}
        for nu in self.lattice.frequencies:
            full[nu] = PiecewiseCoefficient.constant(0.0, d)
        for nu, c in self.coeffs.items():
            nu = tuple(int(v) for v in np.atleast_1d(nu))
            if nu not in self.lattice:
                raise DomainError(f"frequency {nu} outside the lattice")
            if getattr(c, "d", d) != d:
                raise DomainError(f"coefficient for {nu} has the wrong dimension")
            full[nu] = c
        object.__setattr__(self, "coeffs", full)

    @property
    def d(self) -> int:
        return self.lattice.d

    @property
    def holder(self) -> float:
        return min(getattr(c, "holder", 1.0) for c in self.coeffs.values())

    @property
    def mollified(self) -> bool:
        return "mollify_h" in self.meta

    def coefficient_values(self, x: np.ndarray) -> np.ndarray:
        """Array ``(len(lattice), n)`` of coefficient values at points `x`."""
        return np.stack([self.coeffs[nu](x) for nu in self.lattice.frequencies])

    @cached_property
    def planes(self) -> tuple[tuple[float, ...], ...]:
        """Per-axis coordinates of the singular hyperplanes, x=0/x=1 included on a gluing jump."""
        if self.singular_planes is not None:
            return tuple(tuple(sorted(p)) for p in self.singular_planes)
        d = self.d
        rng = np.random.default_rng(12345)
        out = []
        for k in range(d):
            pts = set()
            for c in self.coeffs.values():
                pts.update(getattr(c, "breakpoints", ((),) * d)[k])
            face = rng.random((16, d))
            lo, hi = face.copy(), face.copy()
            lo[:, k], hi[:, k] = 0.0, 1.0
            jump = any(
                np.max(np.abs(c(lo) - c(hi))) > _GLUE_TOL for c in self.coeffs.values()
            )
            if jump:
                pts.update((0.0, 1.0))
            out.append(tuple(sorted(pts)))
        return tuple(out)

    @property
    def singularities(self) -> tuple[float, ...]:
        """Singular points of a one-dimensional symbol."""
        if self.d != 1:
            raise DomainError("use .planes for d > 1")
        return self.planes[0]

    @property
    def is_tensor_grid(self) -> bool:
        return all(getattr(c, "is_tensor_grid", True) for c in self.coeffs.values())


def eval_symbol(sym: Symbol, x, xi):
    """Evaluate ``p(x, xi)``; `x` must lie in ``[0, 1]^d``, `xi` is reduced mod 1.

    Scalar inputs (for ``d = 1``) give a Python complex; otherwise an array.
    """
    xs, scalar_x = as_points(x, sym.d)
    xis, scalar_xi = as_points(xi, sym.d)
    if np.any((xs < 0.0) | (xs > 1.0)) or not np.all(np.isfinite(xs)):
        raise DomainError("x must lie in [0, 1]^d")
    xis = np.mod(xis, 1.0)
    xs, xis = np.broadcast_arrays(xs, xis)
    total = np.zeros(xs.shape[0], dtype=complex)
    for nu in sym.lattice.frequencies:
        total += sym.coeffs[nu](xs) * np.exp(2j * np.pi * (xis @ np.asarray(nu, dtype=float)))
    if scalar_x and scalar_xi:
        return complex(total[0])
    return total


def project_to_lattice(samples, lattice: FrequencyLattice) -> np.ndarray:
    """Discrete Fourier estimates of ``p_nu`` for ``nu`` in `lattice`.

    `samples` holds ``p(x, xi_k)`` on the uniform grid ``xi_k = k / M`` along
    each of the ``d`` axes (shape ``(M_1, ..., M_d)``). The result follows
    the lattice's lexicographic order.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != lattice.d:
        raise PreconditionError(f"expected a {lattice.d}-dimensional grid, got shape {samples.shape}")
    for m, lo, hi in zip(samples.shape, lattice.lows, lattice.highs):
        if m < 4 * (max(lo, hi) + 1):
            raise PreconditionError(f"grid of {m} points undersamples frequencies up to {max(lo, hi)}")
    spectrum = np.fft.fftn(samples) / samples.size
    return np.array([spectrum[tuple(np.mod(nu, samples.shape))] for nu in lattice.frequencies])


# ---------------------------------------------------------------------------
# mollification

def _bump_mass(d: int) -> float:
    """Integral of exp(-1/(1-|y|^2)) over the unit ball of R^d."""
    radial, _ = integrate.quad(
        lambda r: r ** (d - 1) * math.exp(-1.0 / (1.0 - r * r)) if r < 1 else 0.0,
        0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    if d == 1:
        return 2.0 * radial
    sphere = 2.0 * math.pi ** (d / 2) / special.gamma(d / 2)
    return sphere * radial


@dataclass(frozen=True)
class MollifierSpec:
    """Parameters of the smoothing kernel psi_h(x) = h^(-d eta) psi(h^(-eta) x).

    Parameters
    ----------
    eta : float
        Scale exponent in (0, 1/4); the kernel radius is ``h**eta``.
    quad_nodes : int
        Gauss-Legendre nodes per axis and per smooth sub-interval.
    d : int
    norm_const : float, optional
        Normalization of the bump; computed by adaptive quadrature if omitted.
    """

    eta: float = 1.0 / 6.0
    quad_nodes: int = 64
    d: int = 1
    norm_const: float | None = None

    def __post_init__(self):
        if not 0.0 < self.eta < 0.25:
            raise DomainError("eta must lie in (0, 1/4)")
        if self.quad_nodes < 4:
            raise DomainError("need at least 4 quadrature nodes")
        if self.norm_const is None:
            object.__setattr__(self, "norm_const", 1.0 / _bump_mass(self.d))


def bump(y, spec: MollifierSpec):
    """Normalized bump ``c * exp(-1 / (1 - |y|^2))`` supported in the open unit ball."""
    pts, scalar = as_points(y, spec.d)
    r2 = np.sum(pts * pts, axis=1)
    out = np.zeros(r2.shape)
    inside = r2 < 1.0
    out[inside] = spec.norm_const * np.exp(-1.0 / (1.0 - r2[inside]))
    return float(out[0]) if scalar else out


@lru_cache(maxsize=16)
def _graded_rule(q: int, k: int = _GRADING) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on [0, 1] after the sigmoidal map u^k / (u^k + (1-u)^k).

    The map clusters nodes at both ends, which restores fast convergence for
    integrands with algebraic (Hölder) endpoint singularities.
    """
    t, w = np.polynomial.legendre.leggauss(q)
    u = 0.5 * (t + 1.0)
    den = u**k + (1.0 - u) ** k
    phi = u**k / den
    dphi = k * (u * (1.0 - u)) ** (k - 1) / den**2
    return phi, 0.5 * w * dphi


def _cut_edges(xk: float, scale: float, cuts: Sequence[float]) -> list[float]:
    """Split [-1, 1] where ``x - scale*y`` crosses a cut (mod 1)."""
    edges = {-1.0, 1.0}
    for b in cuts:
        for m in range(math.floor(xk - scale - b), math.ceil(xk + scale - b) + 1):
            y = (xk - b - m) / scale
            if -1.0 < y < 1.0:
                edges.add(y)
    return sorted(edges)


def _composite_rule(lo: np.ndarray, hi: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the graded rule on each interval, shape ``(len(lo), q)``."""
    u, w = _graded_rule(q)
    width = (hi - lo)[:, None]
    return lo[:, None] + width * u, width * w


@dataclass(frozen=True, eq=False)
class MollifiedCoefficient:
    """``x -> int p_nu(x - h^eta y) psi(y) dy`` with the periodized base coefficient."""

    base: object
    h: float
    spec: MollifierSpec
    rel_tol: float = 1e-6

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def holder(self) -> float:
        return 1.0

    @property
    def breakpoints(self) -> tuple[tuple[float, ...], ...]:
        return ((),) * self.d

    @cached_property
    def _cuts(self) -> tuple[tuple[float, ...], ...]:
        bps = getattr(self.base, "breakpoints", ((),) * self.d)
        return tuple(tuple(sorted(set(b) | {0.0})) for b in bps)

    def _integrand(self, xi: np.ndarray, scale: float, ys: np.ndarray) -> np.ndarray:
        kernel = bump(ys, self.spec)
        vals = np.zeros(ys.shape[0], dtype=complex)
        inside = kernel > 0.0
        vals[inside] = self.base(_periodize(xi[None, :] - scale * ys[inside])) * kernel[inside]
        return vals

    def _adaptive_1d(self, xi: np.ndarray, scale: float) -> complex:
        # breadth-first bisection; every active interval is judged by a q versus 2q comparison
        q = self.spec.quad_nodes
        edges = np.asarray(_cut_edges(xi[0], scale, self._cuts[0]))
        lo, hi = edges[:-1], edges[1:]
        total = 0.0j
        tol = None
        while lo.size:
            estimates = []
            for nodes in (q, 2 * q):
                ys, ws = _composite_rule(lo, hi, nodes)
                vals = self._integrand(xi, scale, ys.reshape(-1, 1)).reshape(ys.shape)
                estimates.append(np.sum(vals * ws, axis=1))
            coarse, fine = estimates
            if tol is None:
                tol = 0.25 * self.rel_tol * max(1.0, abs(fine.sum()))
            ok = np.abs(fine - coarse) <= tol * (hi - lo) / 2.0
            total += fine[ok].sum()
            lo, hi = lo[~ok], hi[~ok]
            if lo.size and np.min(hi - lo) < 1e-12:
                raise AccuracyError(
                    f"mollifier quadrature did not converge near x = {xi[0]:.6g}"
                )
            mid = 0.5 * (lo + hi)
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        return total

    def _tensor(self, xi: np.ndarray, scale: float, q: int) -> complex:
        rules = []
        for k in range(self.d):
            edges = np.asarray(_cut_edges(xi[k], scale, self._cuts[k]))
            ys, ws = _composite_rule(edges[:-1], edges[1:], q)
            rules.append((ys.ravel(), ws.ravel()))
        ys = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), -1).reshape(-1, self.d)
        ws = np.prod(np.stack(np.meshgrid(*[r[1] for r in rules], indexing="ij"), -1), -1).ravel()
        return complex(np.sum(self._integrand(xi, scale, ys) * ws))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scale = self.h ** self.spec.eta
        q = self.spec.quad_nodes
        out = np.empty(x.shape[0], dtype=complex)
        for i, xi in enumerate(x):
            if self.d == 1:
                out[i] = self._adaptive_1d(xi, scale)
                continue
            coarse, fine = self._tensor(xi, scale, q), self._tensor(xi, scale, 2 * q)
            if abs(fine - coarse) > self.rel_tol * max(1.0, abs(fine)):
                raise AccuracyError(
                    f"mollifier quadrature not converged at x = {xi} "
                    f"(change {abs(fine - coarse):.2e})"
                )
            out[i] = fine
        return out


def mollify(sym: Symbol, h: float, spec: MollifierSpec | None = None) -> Symbol:
    """Smooth every coefficient in ``x`` by convolution with ``psi_h`` (periodic extension)."""
    if not 0.0 < h <= 1.0:
        raise DomainError("h must lie in (0, 1]")
    spec = spec or MollifierSpec(d=sym.d)
    if spec.d != sym.d:
        raise DomainError("mollifier dimension does not match the symbol")
    coeffs = {nu: MollifiedCoefficient(c, h, spec) for nu, c in sym.coeffs.items()}
    meta = dict(sym.meta, mollify_h=h, mollify_eta=spec.eta)
    return Symbol(sym.lattice, coeffs, label=sym.label, singular_planes=((),) * sym.d, meta=meta)


def coeff_decay_check(sym: Symbol, k: int, x_samples: int = 2001) -> tuple[float, bool]:
    """Estimate ``C_k = max_{x, nu} |p_nu(x)| <nu>^k`` over a grid of positions.

    The grid is uniform plus both one-sided limits at each singular plane.

    With a finite lattice every ``p_nu`` outside it vanishes, so the bound
    holds as soon as the estimate is finite.
    """
    axes = []
    for planes in sym.planes:
        # add both one-sided limits at every breakpoint so that jumps are seen
        edges = np.asarray(planes, dtype=float)
        extra = np.concatenate([edges, np.nextafter(edges, 0.0), np.nextafter(edges, 1.0)])
        axes.append(np.unique(np.clip(np.concatenate([np.linspace(0.0, 1.0, x_samples), extra]), 0, 1)))
    x = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, sym.d)
    best = 0.0
    for nu in sym.lattice.frequencies:
        jap = math.sqrt(1.0 + sum(v * v for v in nu))
        best = max(best, float(np.max(np.abs(sym.coeffs[nu](x)))) * jap ** k)
    return best, bool(np.isfinite(best))


# ---------------------------------------------------------------------------
# built-in symbols and manifests

def _jordan() -> Symbol:
    lat = FrequencyLattice((0,), (1,))
    return Symbol(lat, {(1,): PiecewiseCoefficient.from_expr("1")}, label="jordan")


def _hpm_example() -> Symbol:
    f = PiecewiseCoefficient(
        (
            Piece((0.0,), (1 / 3,), "sqrt(x) - 5/2"),
            Piece((1 / 3,), (2 / 3,), "abs(12*x - 6) - 1"),
            Piece((2 / 3,), (1.0,), "1/2 + exp(3*(1 - x))"),
        ),
        holder=0.5,
    )
    half_i = PiecewiseCoefficient.constant(0.5j)
    lat = FrequencyLattice((1,), (1,))
    return Symbol(lat, {(0,): f, (1,): half_i, (-1,): half_i}, label="hpm_example")


def _bidiagonal(a: complex, b: complex) -> Symbol:
    lat = FrequencyLattice((1,), (1,))
    coeffs = {(1,): PiecewiseCoefficient.constant(a), (-1,): PiecewiseCoefficient.constant(b)}
    return Symbol(lat, coeffs, label=f"bidiagonal({a},{b})")


def _constant(c: complex) -> Symbol:
    lat = FrequencyLattice((0,), (0,))
    return Symbol(lat, {(0,): PiecewiseCoefficient.constant(c)}, label=f"constant({c})")


_NUM = r"\s*([-+0-9.eEj()]+)\s*"


def library(name: str) -> Symbol:
    """Built-in symbols: ``jordan``, ``hpm_example``, ``bidiagonal(a,b)``, ``constant(c)``."""
    name = name.strip()
    if name == "jordan":
        return _jordan()
    if name == "hpm_example":
        return _hpm_example()
    m = re.fullmatch(r"bidiagonal\(" + _NUM + "," + _NUM + r"\)", name)
    if m:
        return _bidiagonal(complex(m.group(1)), complex(m.group(2)))
    m = re.fullmatch(r"constant\(" + _NUM + r"\)", name)
    if m:
        return _constant(complex(m.group(1)))
    raise DomainError(f"unknown library symbol {name!r}")


def to_manifest(sym: Symbol) -> dict:
    """Plain-data description of a closed-form symbol."""
    coeffs = []
    for nu, c in sym.coeffs.items():
        if not isinstance(c, PiecewiseCoefficient):
            raise DomainError("only closed-form (piecewise) symbols can be serialized")
        coeffs.append({
            "nu": list(nu),
            "holder": c.holder,
            "pieces": [
                {"lower": list(p.lower), "upper": list(p.upper), "expr": p.expr} for p in c.pieces
            ],
        })
    out = {
        "label": sym.label,
        "d": sym.d,
        "lattice": {"lows": list(sym.lattice.lows), "highs": list(sym.lattice.highs)},
        "coefficients": coeffs,
    }
    if sym.singular_planes is not None:
        out["singular_planes"] = [list(p) for p in sym.singular_planes]
    return out


def from_manifest(data: Mapping) -> Symbol:
    d = int(data["d"])
    lat = FrequencyLattice(tuple(data["lattice"]["lows"]), tuple(data["lattice"]["highs"]))
    if lat.d != d:
        raise DomainError("manifest dimension does not match its lattice")
    coeffs = {}
    for entry in data["coefficients"]:
        pieces = tuple(Piece(tuple(p["lower"]), tuple(p["upper"]), p["expr"]) for p in entry["pieces"])
        coeffs[tuple(entry["nu"])] = PiecewiseCoefficient(pieces, float(entry.get("holder", 1.0)))
    planes = data.get("singular_planes")
    planes = tuple(tuple(p) for p in planes) if planes is not None else None
    return Symbol(lat, coeffs, label=data.get("label", "symbol"), singular_planes=planes)


def save_manifest(sym: Symbol, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_manifest(sym), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_manifest(path) -> Symbol:
    return from_manifest(json.loads(Path(path).read_text(encoding="utf-8")))
