"""Numerical checks of the regularity hypotheses on a symbol.

Three quantities are estimated:

* the sublevel-set volume ``V_z(t) = |{(x, xi) : |p(x, xi) - z|^2 <= t}|``
  (Monte Carlo over ``[0, 1]^d x T^d``) and its power-law exponent,
* closed-form constants ``(kappa, C)`` with ``V_z(t) <= C t^kappa`` for
  every ``z``, valid when the non-constant coefficients never vanish together,
* the volume of the ``r``-neighbourhood of the singular set in ``x``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from ._errors import CriterionInapplicableError, DegenerateFitError, DomainError
from .perturb import rng_for
from .symbol import Symbol, eval_symbol

__all__ = [
    "VolumeEstimate", "CriterionConstants", "UniformCheck", "estimate_volume",
    "fit_exponent", "fit_power_law", "criterion_constants",
    "thickened_singularity_volume", "uniform_bound_check", "sampler_agreement",
]

MIN_MC = 10_000


@dataclass(frozen=True, eq=False)
class VolumeEstimate:
    """Monte Carlo estimate of ``V_z(t)`` on an increasing grid of ``t``."""

    z: complex
    t_grid: np.ndarray
    vhat: np.ndarray
    stderr: np.ndarray
    n_mc: int
    seed: int
    sampler: str = "random"

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "vhat", "stderr"])
            for row in zip(self.t_grid, self.vhat, self.stderr):
                w.writerow([repr(float(v)) for v in row])
        return path


def _design(d: int, n: int, seed: int, sampler: str) -> np.ndarray:
    if sampler == "random":
        return rng_for("volume", 2 * d, seed).random((n, 2 * d))
    if sampler == "halton":
        engine = qmc.Halton(d=2 * d, scramble=False)
        engine.fast_forward(1 + seed)
        return engine.random(n)
    raise DomainError(f"unknown sampler {sampler!r}")


def estimate_volume(
    sym: Symbol,
    z: complex,
    t_grid: Sequence[float],
    n_mc: int = MIN_MC,
    seed: int = 0,
    sampler: str = "random",
) -> VolumeEstimate:
    """Fraction of uniform ``(x, xi)`` samples with ``|p - z|^2 <= t`` for each ``t``.

    Standard errors are binomial, ``sqrt(v (1 - v) / n_mc)``. The ``halton``
    sampler skips ``1 + seed`` leading points.
    """
    if n_mc < MIN_MC:
        raise DomainError(f"n_mc must be at least {MIN_MC}")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be increasing and positive")
    pts = _design(sym.d, n_mc, seed, sampler)
    dist2 = np.abs(eval_symbol(sym, pts[:, : sym.d], pts[:, sym.d :]) - z) ** 2
    dist2.sort()
    # a few ulps of slack so that boundary points such as |e^{2 i pi xi}|^2 = 1 are not lost to rounding
    v = np.searchsorted(dist2, t * (1 + 4 * np.finfo(float).eps), side="right") / n_mc
    se = np.sqrt(v * (1.0 - v) / n_mc)
    return VolumeEstimate(complex(z), t, v, se, int(n_mc), int(seed), sampler)


def fit_power_law(t, v) -> tuple[float, float, float]:
    """Least-squares fit ``log v = kappa log t + log C`` over points with ``v > 0``.

    Returns
    -------
    kappa, C, r2 : float
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    keep = (v > 0) & (t > 0)
    if keep.sum() < 5:
        raise DegenerateFitError("need at least five points with positive volume")
    lt, lv = np.log(t[keep]), np.log(v[keep])
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(math.exp(intercept)), r2


def fit_exponent(est: VolumeEstimate) -> tuple[float, float, float]:
    """Power-law fit ``(kappa_hat, C_hat, r2)`` of a volume estimate."""
    return fit_power_law(est.t_grid, est.vhat)


@dataclass(frozen=True)
class CriterionConstants:
    """Constants of the bound ``V_z(t) <= C t^kappa``.

    ``S`` is the total lattice width ``sum_j (lows_j + highs_j)``, ``Xi`` the
    number of lattice points, ``m_lower`` a lower bound on
    ``sum_{k != 0} |p_k(x)|``.
    """

    S: int
    Xi: int
    m_lower: float
    d: int = 1

    @property
    def kappa(self) -> float:
        return 1.0 / (2 * self.S)

    @property
    def C(self) -> float:
        return 14 * self.d * (math.sqrt(self.Xi) / self.m_lower) ** (1.0 / self.S)

    def bound(self, t):
        return self.C * np.asarray(t, dtype=float) ** self.kappa


def criterion_constants(sym: Symbol, x_samples: int = 100_000, margin: float = 0.01) -> CriterionConstants:
    """Constants from the lattice shape and a sampled lower bound on the non-constant coefficients.

    ``m_lower`` is the minimum of ``sum_{k != 0} |p_k(x)|`` over a uniform
    grid of about `x_samples` points, reduced by the relative `margin`.

    Raises
    ------
    CriterionInapplicableError
        If the lattice is ``{0}`` or the sampled minimum is not positive.
    """
    lat = sym.lattice
    S = sum(lo + hi for lo, hi in zip(lat.lows, lat.highs))
    Xi = math.prod(lo + hi + 1 for lo, hi in zip(lat.lows, lat.highs))
    if S == 0:
        raise CriterionInapplicableError("the symbol does not depend on xi")
    per_axis = max(2, math.ceil(x_samples ** (1.0 / sym.d)))
    axis = np.linspace(0.0, 1.0, per_axis)
    x = np.stack(np.meshgrid(*([axis] * sym.d), indexing="ij"), -1).reshape(-1, sym.d)
    zero = (0,) * sym.d
    total = np.zeros(x.shape[0])
    for nu in lat.frequencies:
        if nu != zero:
            total += np.abs(sym.coeffs[nu](x))
    m = float(total.min()) * (1.0 - margin)
    if not m > 0:
        raise CriterionInapplicableError("the non-constant coefficients vanish simultaneously")
    return CriterionConstants(S, Xi, m, sym.d)


def _union_length(points: Sequence[float], r: float) -> float:
    intervals = sorted((max(0.0, p - r), min(1.0, p + r)) for p in points)
    total, end = 0.0, -math.inf
    for lo, hi in intervals:
        lo = max(lo, end)
        if hi > lo:
            total += hi - lo
        end = max(end, hi)
    return total


def thickened_singularity_volume(sym: Symbol, r: float) -> float:
    """Lebesgue measure of the ``r``-neighbourhood of the singular set within ``[0, 1]^d``.

    The singular set is a union of axis-aligned hyperplanes, whose
    neighbourhoods are slabs, so the volume is ``1 - prod_k (1 - L_k)`` with
    ``L_k`` the covered length on axis ``k``.

    Raises
    ------
    NotImplementedError
        For ``d >= 2`` when the pieces do not form a tensor grid.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    if sym.d >= 2 and not sym.is_tensor_grid:
        raise NotImplementedError("only tensor-grid piece boundaries are supported for d >= 2")
    free = 1.0
    for planes in sym.planes:
        free *= 1.0 - _union_length(planes, r)
    return 1.0 - free


@dataclass(frozen=True)
class UniformCheck:
    """Outcome of ``V_z(t) <= C t^kappa + 3 stderr`` over a grid of ``z`` and ``t``.

    The grid of ``z`` covers the sampled range of the symbol only, so this
    is a heuristic for the ``z``-uniform statement.
    """

    passed: bool
    worst_margin: float
    worst_z: complex
    worst_t: float
    n_checks: int


def uniform_bound_check(
    sym: Symbol,
    consts: CriterionConstants,
    t_grid: Sequence[float],
    z_points: int = 5,
    n_mc: int = MIN_MC,
    seed: int = 0,
    inflate: float = 0.1,
) -> UniformCheck:
    """Check the volume bound on a ``z_points x z_points`` grid over the inflated range of `sym`."""
    engine = qmc.Halton(d=2 * sym.d, scramble=False)
    engine.fast_forward(1)
    pts = engine.random(4096)
    vals = eval_symbol(sym, pts[:, : sym.d], pts[:, sym.d :])
    lo = complex(vals.real.min() - inflate, vals.imag.min() - inflate)
    hi = complex(vals.real.max() + inflate, vals.imag.max() + inflate)
    worst = (math.inf, 0j, 0.0)
    count = 0
    for k, re in enumerate(np.linspace(lo.real, hi.real, z_points)):
        for l, im in enumerate(np.linspace(lo.imag, hi.imag, z_points)):
            z = complex(re, im)
            est = estimate_volume(sym, z, t_grid, n_mc, seed + k * z_points + l)
            margin = consts.bound(est.t_grid) + 3 * est.stderr - est.vhat
            i = int(np.argmin(margin))
            count += margin.size
            if margin[i] < worst[0]:
                worst = (float(margin[i]), z, float(est.t_grid[i]))
    return UniformCheck(worst[0] >= 0, worst[0], worst[1], worst[2], count)


def sampler_agreement(
    sym: Symbol, z: complex, t_grid: Sequence[float], n_mc: int = MIN_MC, seed: int = 0
) -> tuple[bool, float]:
    """Compare pseudo-random and Halton volume estimates; pass if within 3 standard errors."""
    a = estimate_volume(sym, z, t_grid, n_mc, seed, "random")
    b = estimate_volume(sym, z, t_grid, n_mc, seed, "halton")
    se = np.sqrt(a.stderr**2 + b.stderr**2)
    score = np.abs(a.vhat - b.vhat) / np.where(se > 0, se, np.inf)
    score = np.where((se == 0) & (a.vhat != b.vhat), np.inf, score)
    worst = float(np.max(score))
    return worst <= 3.0, worst
