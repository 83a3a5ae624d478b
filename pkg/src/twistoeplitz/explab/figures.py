"""SVG plots and desk-scale reproductions of the three reference figures.

``fig1``: the position coefficient ``f`` of ``hpm_example`` with the gaps
of its range marked by red dashes. ``fig2``: spectra of ``M_N(p)`` for
``hpm_example`` without and with a small Ginibre perturbation. ``fig3``:
the perturbed Jordan block ``J_N + 2 E_{N,1} + delta Q``.

Plots are written through :class:`matplotlib.figure.Figure` (no pyplot
state) with a fixed SVG hash salt and no date metadata, so identical data
give identical files.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .._errors import ConfigError
from ..perturb import DeltaSchedule, EnsembleSpec, sample
from ..quantize import build_matrix
from ..spectra import eigenvalues
from ..symbol import library
from ._io import write_csv

__all__ = ["FigureResult", "spectrum_svg", "range_gaps", "reproduce_figures", "DESK_N", "PAPER_N"]

DESK_N = {"fig2": 1000, "fig3": 512}
PAPER_N = {"fig2": 4000, "fig3": 2000}
MAX_DENSE_DIM = 4000
_RC = {"svg.hashsalt": "twistoeplitz", "svg.fonttype": "path", "path.simplify": False}


@dataclass
class FigureResult:
    which: str
    files: list[Path] = field(default_factory=list)
    info: dict = field(default_factory=dict)


def _save_svg(fig: Figure, path: Path, comment: str = "") -> Path:
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    text = buf.getvalue()
    if comment:
        first, rest = text.split("\n", 1)
        safe = comment.replace("--", "- -")
        text = f"{first}\n<!-- {safe} -->\n{rest}"
    path.write_text(text, encoding="utf-8")
    return path


def _viewport(*clouds: np.ndarray, pad: float = 0.1):
    pts = np.concatenate([np.asarray(c).ravel() for c in clouds if np.size(c)])
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    span = max(hi.real - lo.real, hi.imag - lo.imag, 1e-3)
    return (lo.real - pad * span, hi.real + pad * span), (lo.imag - pad * span, hi.imag + pad * span)


def spectrum_svg(path, eigs, overlay=None, title: str = "", comment: str = "") -> Path:
    """Scatter of eigenvalues, optionally over a grey push-forward sample."""
    path = Path(path)
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot()
    if overlay is not None and np.size(overlay):
        ax.scatter(np.real(overlay), np.imag(overlay), s=3, c="0.75", label="push-forward sample")
    ax.scatter(np.real(eigs), np.imag(eigs), s=4, c="tab:blue", label="eigenvalues")
    xlim, ylim = _viewport(eigs, overlay if overlay is not None else [])
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    return _save_svg(fig, path, comment)


def range_gaps(values: np.ndarray, min_gap: float) -> list[tuple[float, float]]:
    """Gaps wider than `min_gap` between consecutive sorted samples of a real function."""
    v = np.sort(np.asarray(values, dtype=float))
    jumps = np.nonzero(np.diff(v) > min_gap)[0]
    return [(float(v[k]), float(v[k + 1])) for k in jumps]


def _fig1(out: Path, comment: str) -> FigureResult:
    sym = library("hpm_example")
    f = sym.coeffs[(0,)]
    x = np.linspace(0.0, 1.0, 2000)
    y = f(x[:, None]).real
    dense = f(np.linspace(0.0, 1.0, 200_001)[:, None]).real
    gaps = range_gaps(dense, 0.05 * (dense.max() - dense.min()))
    left = f(np.array([[np.nextafter(1 / 3, 0)]])).real[0]
    right = f(np.array([[1 / 3]])).real[0]
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    ax.plot(x, y, ".", ms=1.5, c="k")
    for lo, hi in gaps:
        for level in (lo, hi):
            ax.axhline(level, ls="--", c="red", lw=0.8)
    ax.annotate(f"jump {right - left:.3f}", (1 / 3, 0.5 * (left + right)), xytext=(0.38, -2.2),
                arrowprops={"arrowstyle": "->"})
    ax.set_xlabel("x")
    ax.set_ylabel("f(x)")
    res = FigureResult("fig1")
    res.files.append(_save_svg(fig, out / "fig1.svg", comment))
    res.files.append(write_csv(out / "fig1.csv", "# " + comment, ["x", "f"],
                          ([f"{a:.12e}", f"{b:.12e}"] for a, b in zip(x, y))))
    res.info.update(gaps=gaps, left_limit=float(left), right_value=float(right), jump=float(right - left))
    return res


def _bbox_area(ev: np.ndarray) -> float:
    return float(np.ptp(ev.real) * np.ptp(ev.imag))


def _fig2(out: Path, N: int, seed: int, comment: str) -> FigureResult:
    sym = library("hpm_example")
    M = build_matrix(sym, N).data
    delta = DeltaSchedule(0.5, 1.1).delta(N)
    clean = eigenvalues(M, singular=False).eigenvalues
    noisy = eigenvalues(M + delta * sample(EnsembleSpec("ginibre_complex", seed, N)), singular=False).eigenvalues
    fig = Figure(figsize=(10, 5))
    axes = fig.subplots(1, 2, sharex=True, sharey=True)
    for ax, ev, name in zip(axes, (clean, noisy), ("no noise", f"delta = N^-1.6, N = {N}")):
        ax.scatter(ev.real, ev.imag, s=3)
        ax.set_title(name)
    xlim, ylim = _viewport(clean, noisy)
    axes[0].set_xlim(*xlim)
    axes[0].set_ylim(*ylim)
    res = FigureResult("fig2")
    res.files.append(_save_svg(fig, out / "fig2.svg", comment))
    for name, ev in (("fig2_clean.csv", clean), ("fig2_noisy.csv", noisy)):
        order = np.lexsort((np.round(ev.imag, 9), np.round(ev.real, 9)))
        res.files.append(write_csv(out / name, "# " + comment, ["re", "im"],
                              ([f"{v.real:.12e}", f"{v.imag:.12e}"] for v in ev[order])))
    clean_area = _bbox_area(clean)
    res.info.update(N=N, delta=delta, area_ratio=_bbox_area(noisy) / clean_area if clean_area > 0 else math.inf)
    return res


def _fig3(out: Path, N: int, seed: int, comment: str) -> FigureResult:
    J = build_matrix(library("jordan"), N).data
    J[N - 1, 0] = 2.0
    delta = DeltaSchedule(0.5, 1.1).delta(N)
    ev = eigenvalues(J + delta * sample(EnsembleSpec("ginibre_complex", seed, N)), singular=False).eigenvalues
    outlier = ev[np.argmin(np.abs(ev - 2.0))]
    frac = float(np.mean(np.abs(np.abs(ev) - 1.0) <= 0.1))
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot()
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), c="0.7", lw=0.8)
    ax.scatter(ev.real, ev.imag, s=3)
    ax.annotate(f"{outlier.real:.3f}{outlier.imag:+.3f}i", (outlier.real, outlier.imag),
                xytext=(0.2, 0.2), arrowprops={"arrowstyle": "->"})
    xlim, ylim = _viewport(ev, np.array([2.0 + 0j, -1.0 - 1.0j, 1.0 + 1.0j]))
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_aspect("equal")
    ax.set_title(f"J_N + 2E_(N,1) + delta Q, N = {N}")
    res = FigureResult("fig3")
    res.files.append(_save_svg(fig, out / "fig3.svg", comment))
    order = np.lexsort((np.round(ev.imag, 9), np.round(ev.real, 9)))
    res.files.append(write_csv(out / "fig3.csv", "# " + comment, ["re", "im"],
                          ([f"{v.real:.12e}", f"{v.imag:.12e}"] for v in ev[order])))
    res.info.update(N=N, delta=delta, frac_near_circle=frac, outlier=complex(outlier))
    return res


def reproduce_figures(
    which: str, out, scale: str = "desk", seed: int = 7, N: int | None = None,
    max_dense_dim: int = MAX_DENSE_DIM,
) -> FigureResult:
    """Regenerate one figure; `N` overrides the scale's default size."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if scale not in ("desk", "paper"):
        raise ConfigError("scale must be 'desk' or 'paper'")
    comment = f"figure={which}, scale={scale}, seed={seed}"
    if which == "fig1":
        return _fig1(out, comment)
    if which not in DESK_N:
        raise ConfigError(f"unknown figure {which!r}")
    size = N or (PAPER_N if scale == "paper" else DESK_N)[which]
    if size > max_dense_dim:
        raise ConfigError(f"N = {size} exceeds the dense eigensolve budget {max_dense_dim}")
    comment += f", N={size}"
    return (_fig2 if which == "fig2" else _fig3)(out, size, seed, comment)
