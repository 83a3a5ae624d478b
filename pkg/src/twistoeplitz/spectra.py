"""Spectra, empirical measures, logarithmic potentials and measure distances.

The empirical spectral measure of an ``n x n`` matrix puts mass ``1/n`` on
each eigenvalue. Its logarithmic potential at ``z`` can be read either from
the eigenvalues or, far more stably near the spectrum, from the singular
values of ``M - z``::

    (1/n) sum_j log|lambda_j - z| = (1/n) log|det(M - z)| = (1/n) sum_j log s_j(M - z)

Examples
--------
>>> import numpy as np
>>> res = eigenvalues(np.diag([1.0, 1j, -3.0]))
>>> sorted(res.eigenvalues, key=lambda v: (v.real, v.imag))
[(-3+0j), (1+0j), 1j]
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy import ndimage
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree
from scipy.stats import qmc

from ._errors import ConfigError, DomainError, NumericError
from .symbol import Symbol, eval_symbol

__all__ = [
    "SpectralResult", "EmpiricalMeasure", "eigenvalues", "empirical_measure",
    "pushforward_measure", "log_potential_measure", "log_potential_matrix",
    "singular_count", "measure_distance",
]

ATOM_TOL = 1e-14


def _dense(M) -> np.ndarray:
    data = getattr(M, "data", M)
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2 or data.shape[0] != data.shape[1]:
        raise DomainError("matrix must be square")
    if not np.all(np.isfinite(data)):
        raise DomainError("matrix has non-finite entries")
    return data


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Eigenvalues (unordered), singular values (descending) and the Schur backward error."""

    eigenvalues: np.ndarray
    singular_values: np.ndarray
    backward_error: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def to_csv(self, path, metadata: dict | None = None) -> Path:
        """Write ``(index, eig_re, eig_im, singular_value)`` plus a JSON sidecar."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "eig_re", "eig_im", "singular_value"])
            for k, (lam, s) in enumerate(zip(self.eigenvalues, self.singular_values)):
                w.writerow([k, repr(float(lam.real)), repr(float(lam.imag)), repr(float(s))])
        meta = {"dim": self.dim, "backward_error": self.backward_error}
        meta.update(metadata or {})
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return path


def eigenvalues(M, singular: bool = True) -> SpectralResult:
    """Dense eigen- and singular-value solve.

    Eigenvalues come from a complex Schur form ``M = Z T Z^*``; the reported
    backward error is ``||M - Z T Z^*||_F / ||M||_F``.

    Parameters
    ----------
    M : square array or QuantMatrix
    singular : bool
        Skip the SVD (``singular_values`` left empty) when False.

    Raises
    ------
    DomainError
        On non-finite entries.
    NumericError
        If LAPACK fails to converge.
    """
    data = _dense(M)
    try:
        T, Z = scipy.linalg.schur(data, output="complex")
        sv = scipy.linalg.svdvals(data) if singular else np.empty(0)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"dense eigensolver failed: {exc}") from exc
    norm = np.linalg.norm(data)
    resid = np.linalg.norm(data - (Z @ T) @ Z.conj().T)
    berr = float(resid / norm) if norm > 0 else float(resid)
    return SpectralResult(np.diagonal(T).copy(), np.asarray(sv), berr)


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Uniform probability measure on a finite multiset of complex atoms."""

    points: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if pts.size == 0:
            raise DomainError("a measure needs at least one atom")
        if not np.all(np.isfinite(pts)):
            raise DomainError("atoms must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.points.size, 1.0 / self.points.size)

    def to_csv(self, path) -> Path:
        path = Path(path)
        w = 1.0 / self.points.size
        with path.open("w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["re", "im", "weight"])
            for p in self.points:
                out.writerow([repr(float(p.real)), repr(float(p.imag)), repr(w)])
        return path


def empirical_measure(res: SpectralResult, provenance: str = "") -> EmpiricalMeasure:
    return EmpiricalMeasure(res.eigenvalues, provenance)


def pushforward_measure(sym: Symbol, n: int, mode: str = "halton") -> EmpiricalMeasure:
    """Atoms ``p(x_i, xi_i)`` for a uniform design in ``[0, 1]^d x T^d``.

    ``grid`` uses ``k = ceil(n^(1/(2d)))`` cell midpoints per axis, so the
    measure has ``k^(2d) >= n`` atoms. ``halton`` uses the first `n`
    unscrambled Halton points after the origin.
    """
    if n < 1:
        raise DomainError("n must be positive")
    d = sym.d
    if mode == "grid":
        k = math.ceil(round(n ** (1.0 / (2 * d)), 12))
        axis = (np.arange(k) + 0.5) / k
        mesh = np.meshgrid(*([axis] * (2 * d)), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], -1)
    elif mode == "halton":
        engine = qmc.Halton(d=2 * d, scramble=False)
        engine.fast_forward(1)
        pts = engine.random(n)
    else:
        raise ConfigError(f"unknown design {mode!r}")
    vals = eval_symbol(sym, pts[:, :d], pts[:, d:])
    return EmpiricalMeasure(np.atleast_1d(vals), f"pushforward:{sym.label}:{mode}:{len(pts)}")


def log_potential_measure(mu: EmpiricalMeasure, z, return_flag: bool = False):
    """``(1/n) sum log|w_i - z|``.

    At a point within ``1e-14`` of an atom the value is ``-inf`` and a
    :class:`RuntimeWarning` is issued; with ``return_flag`` the pair
    ``(value, hit_atom)`` is returned instead. `z` may be an array.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = np.abs(mu.points[None, :] - zs[:, None])
    hit = np.any(dist <= ATOM_TOL, axis=1)
    with np.errstate(divide="ignore"):
        vals = np.mean(np.log(dist), axis=1)
    vals[hit] = -np.inf
    if hit.any() and not return_flag:
        warnings.warn("log potential evaluated at an atom", RuntimeWarning, stacklevel=2)
    scalar = np.ndim(z) == 0
    out = float(vals[0]) if scalar else vals
    if return_flag:
        return out, (bool(hit[0]) if scalar else hit)
    return out


def log_potential_matrix(M, z, return_flag: bool = False):
    """``(1/dim) sum_j log s_j(M - z)``, from singular values.

    A zero singular value gives ``-inf`` (with a warning, or the flag when
    ``return_flag`` is set).
    """
    data = _dense(M)
    s = scipy.linalg.svdvals(data - complex(z) * np.eye(data.shape[0]))
    singular = bool(np.any(s == 0.0))
    with np.errstate(divide="ignore"):
        val = float(np.mean(np.log(s)))
    if singular:
        val = -np.inf
        if not return_flag:
            warnings.warn("M - z is singular", RuntimeWarning, stacklevel=2)
    return (val, singular) if return_flag else val


def singular_count(M, z, alpha: float) -> int:
    """Number of eigenvalues of ``(M - z)^*(M - z)`` in ``[0, alpha]``."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    data = _dense(M)
    s = scipy.linalg.svdvals(data - complex(z) * np.eye(data.shape[0]))
    return int(np.count_nonzero(s * s <= alpha))


# ---------------------------------------------------------------------------
# distances

def _subsample(points: np.ndarray, size: int, seed: int) -> np.ndarray:
    if points.size <= size:
        return points
    rng = np.random.default_rng(seed)
    return points[np.sort(rng.choice(points.size, size=size, replace=False))]


def _w1(mu1, mu2, n_sub: int = 512, seed: int = 0) -> float:
    if not 1 <= n_sub <= 1024:
        raise ConfigError("exact assignment is limited to subsamples of at most 1024 atoms")
    size = min(n_sub, len(mu1), len(mu2))
    a = _subsample(mu1.points, size, seed)
    b = _subsample(mu2.points, size, seed + 1)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].mean())


def _tv(mu1, mu2, bbox=None, bandwidth=None, bins: int = 64) -> float:
    if bbox is None or bandwidth is None:
        raise ConfigError("histogram_tv needs bbox=(lo, hi) and bandwidth (in bins)")
    lo, hi = complex(bbox[0]), complex(bbox[1])
    if not (hi.real > lo.real and hi.imag > lo.imag):
        raise ConfigError("degenerate bounding box")
    edges = (np.linspace(lo.real, hi.real, bins + 1), np.linspace(lo.imag, hi.imag, bins + 1))

    def density(mu):
        # atoms outside the box are clipped onto its edge so that mass is preserved
        re = np.clip(mu.points.real, lo.real, hi.real)
        im = np.clip(mu.points.imag, lo.imag, hi.imag)
        hist, _, _ = np.histogram2d(re, im, bins=edges, weights=mu.weights)
        smooth = ndimage.gaussian_filter(hist, sigma=float(bandwidth), mode="constant")
        return smooth / smooth.sum()

    return float(0.5 * np.abs(density(mu1) - density(mu2)).sum())


def _logpot(mu1, mu2, grid: int = 21, inflate: float = 0.5, exclusion: float | None = None) -> float:
    pts = np.concatenate([mu1.points, mu2.points])
    lo = complex(pts.real.min() - inflate, pts.imag.min() - inflate)
    hi = complex(pts.real.max() + inflate, pts.imag.max() + inflate)
    gx, gy = np.meshgrid(np.linspace(lo.real, hi.real, grid), np.linspace(lo.imag, hi.imag, grid))
    zs = (gx + 1j * gy).ravel()
    radius = exclusion if exclusion is not None else 10.0 / math.sqrt(max(len(mu1), len(mu2)))
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    dist, _ = tree.query(np.column_stack([zs.real, zs.imag]))
    zs = zs[dist > radius]
    if zs.size == 0:
        raise ConfigError("every grid point lies within the exclusion radius of an atom")
    phi1 = log_potential_measure(mu1, zs)
    phi2 = log_potential_measure(mu2, zs)
    return float(np.max(np.abs(phi1 - phi2)))


_METHODS = {"w1_assignment": _w1, "histogram_tv": _tv, "logpot_grid": _logpot}


def measure_distance(mu1: EmpiricalMeasure, mu2: EmpiricalMeasure, method: str = "w1_assignment", **options) -> float:
    """Distance between two empirical measures.

    Parameters
    ----------
    method : {"w1_assignment", "histogram_tv", "logpot_grid"}
        ``w1_assignment``: exact optimal matching cost between seeded uniform
        subsamples of equal size (options ``n_sub`` <= 1024, ``seed``).
        ``histogram_tv``: half-L1 distance between Gaussian-smoothed 2d
        histograms (options ``bbox``, ``bandwidth`` in bins, ``bins``).
        ``logpot_grid``: max difference of log potentials over a grid on the
        inflated joint bounding box, skipping points within ``exclusion``
        (default ``10 / sqrt(n)``, ``n`` the larger atom count) of any atom
        (options ``grid``, ``inflate``, ``exclusion``).
    """
    try:
        fn = _METHODS[method]
    except KeyError:
        raise ConfigError(f"unknown distance {method!r}") from None
    try:
        return fn(mu1, mu2, **options)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
