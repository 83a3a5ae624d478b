"""Experiment pipeline: build, perturb, diagonalize, compare with the predicted limit.

For each ``N`` of a config the pipeline

1. builds ``M_N(p)`` (or the matrix of the mollified symbol),
2. adds ``delta(N) Q_N`` with ``Q_N`` drawn from the configured ensemble,
3. computes the eigenvalues and their empirical measure,
4. measures its distance to a sample of the push-forward measure and the
   fraction of eigenvalues near the sampled range of the symbol,
5. counts small singular values of the unperturbed matrix minus ``z`` at
   ``alpha = N^-omega``, ``omega = min(delta0, holder*eta/3, eta/2)``.

All CSV, text and SVG outputs start with a comment line carrying the
config hash and the seed; JSON outputs carry both as keys.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .._errors import CriterionInapplicableError, PreconditionError
from ..assumptions import CriterionConstants, criterion_constants
from ..perturb import DeltaSchedule, EnsembleSpec, default_kappa3, sample
from ..quantize import build_matrix
from ..spectra import EmpiricalMeasure, eigenvalues, measure_distance, pushforward_measure
from ..symbol import MollifierSpec, Symbol, mollify
from ._io import write_csv
from .config import ExperimentConfig
from .figures import spectrum_svg

__all__ = ["NResult", "RunArtifacts", "SweepTable", "run_experiment", "convergence_sweep",
           "singular_alpha_exponent", "header", "write_csv"]

log = logging.getLogger(__name__)

RANGE_SAMPLES = 20_000
SWEEP_SLACK = 1.2


def header(cfg: ExperimentConfig, **extra) -> str:
    parts = [f"config_hash={cfg.hash}", f"seed={cfg.seed}"]
    parts += [f"{k}={v}" for k, v in extra.items()]
    return "# " + ", ".join(parts)


def _fmt(v: float) -> str:
    return f"{v:.12e}"


def singular_alpha_exponent(sym: Symbol, cfg: ExperimentConfig, kappa1: float = 1.0) -> float:
    """``omega = min(delta0, holder * eta / 3, kappa1 * eta / 2)``."""
    return min(cfg.delta0, sym.holder * cfg.eta / 3.0, kappa1 * cfg.eta / 2.0)


@dataclass
class NResult:
    N: int
    delta: float = 0.0
    eigenvalues: np.ndarray | None = None
    backward_error: float = math.nan
    distances: dict = field(default_factory=dict)
    alpha: float = math.nan
    counts: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    frac_in_range: float = math.nan
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class RunArtifacts:
    out_dir: Path
    config_hash: str
    results: list[NResult]
    constants: CriterionConstants | None
    omega: float
    files: list[Path] = field(default_factory=list)

    def result(self, N: int) -> NResult:
        return next(r for r in self.results if r.N == N)


def _canonical(ev: np.ndarray) -> np.ndarray:
    order = np.lexsort((np.round(ev.imag, 9), np.round(ev.real, 9)))
    return ev[order]


class _Context:
    """Per-run shared, read-only state."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.sym = cfg.load_symbol()
        self.reference = pushforward_measure(self.sym, cfg.pushforward_n, cfg.pushforward_mode)
        dense = pushforward_measure(self.sym, RANGE_SAMPLES, "halton").points
        self.range_tree = cKDTree(np.column_stack([dense.real, dense.imag]))
        lo = complex(dense.real.min() - 0.5, dense.imag.min() - 0.5)
        hi = complex(dense.real.max() + 0.5, dense.imag.max() + 0.5)
        self.bbox = (lo, hi)
        try:
            self.constants = criterion_constants(self.sym)
        except CriterionInapplicableError:
            self.constants = None
        self.omega = singular_alpha_exponent(self.sym, cfg)
        if cfg.ensemble != "none":
            k3 = cfg.kappa3 if cfg.kappa3 is not None else default_kappa3(cfg.ensemble, self.sym.d)
            self.schedule = DeltaSchedule(k3, cfg.delta0)
        else:
            self.schedule = None


def _run_one(ctx: _Context, N: int) -> NResult:
    cfg, sym = ctx.cfg, ctx.sym
    res = NResult(N)
    dim = N**sym.d
    base_sym = sym
    if cfg.mollify:
        spec = MollifierSpec(cfg.eta, cfg.quad_nodes, sym.d)
        base_sym = mollify(sym, 1.0 / (2.0 * math.pi * N), spec)
    base = build_matrix(base_sym, N, cfg.convention).data
    M = base
    if ctx.schedule is not None:
        res.delta = ctx.schedule.delta(N)
        M = base + res.delta * sample(EnsembleSpec(cfg.ensemble, cfg.seed, dim))
    spec_res = eigenvalues(M, singular=False)
    res.eigenvalues = _canonical(spec_res.eigenvalues)
    res.backward_error = spec_res.backward_error
    mu = EmpiricalMeasure(res.eigenvalues, f"spectrum:{sym.label}:N={N}")
    for method in cfg.distances:
        opts = {}
        if method == "w1_assignment":
            opts = {"n_sub": cfg.w1_subsample, "seed": cfg.seed % 2**32}
        elif method == "histogram_tv":
            opts = {"bbox": ctx.bbox, "bandwidth": 1.0}
        res.distances[method] = measure_distance(mu, ctx.reference, method, **opts)
    dist, _ = ctx.range_tree.query(np.column_stack([mu.points.real, mu.points.imag]))
    res.frac_in_range = float(np.mean(dist <= cfg.range_tol))
    res.alpha = float(N) ** (-ctx.omega)
    sv_cache = {}
    for z in cfg.z:
        s = sv_cache.setdefault(z, np.linalg.svd(base - z * np.eye(dim), compute_uv=False))
        count = int(np.count_nonzero(s * s <= res.alpha))
        res.counts[z] = count
        kappa2 = ctx.constants.kappa if ctx.constants else math.nan
        res.ratios[z] = count / (dim * res.alpha**kappa2)
    return res


def _safe_run(ctx: _Context, N: int) -> NResult:
    try:
        return _run_one(ctx, N)
    except Exception as exc:  # one bad N must not stop the others
        log.exception("pipeline failed at N=%d", N)
        return NResult(N, error=f"{type(exc).__name__}: {exc}")


def _report_text(ctx: _Context, r: NResult) -> str:
    cfg = ctx.cfg
    lines = [
        header(cfg, N=r.N),
        f"symbol: {ctx.sym.label} (d={ctx.sym.d}, convention={cfg.convention}, mollified={cfg.mollify})",
        f"ensemble: {cfg.ensemble}, delta = {r.delta:.6e}",
    ]
    if r.error:
        lines.append(f"ERROR: {r.error}")
        return "\n".join(lines) + "\n"
    lines.append(f"schur backward error: {r.backward_error:.3e}")
    c = ctx.constants
    if c is None:
        lines.append("criterion constants: not applicable")
    else:
        lines.append(
            f"criterion constants: S={c.S} Xi={c.Xi} m_lower={c.m_lower:.6g} kappa={c.kappa:.6g} C={c.C:.6g}"
        )
    lines.append(f"singular counts at alpha = N^-{ctx.omega:.6g} = {r.alpha:.6g}:")
    lines.append("  z                      count   count/(N^d alpha^kappa)")
    for z, count in r.counts.items():
        lines.append(f"  {z.real:+.4f}{z.imag:+.4f}i      {count:6d}   {r.ratios[z]:.6g}")
    lines.append("distances to the push-forward sample (thresholds are implementer-calibrated):")
    for method, value in r.distances.items():
        lines.append(f"  {method}: {value:.6g}")
    lines.append(f"fraction of eigenvalues within {cfg.range_tol} of the sampled range: {r.frac_in_range:.6g}")
    return "\n".join(lines) + "\n"


def _write_n(ctx: _Context, r: NResult, out: Path) -> list[Path]:
    cfg = ctx.cfg
    files = [out / f"report_N{r.N}.txt"]
    files[0].write_text(_report_text(ctx, r), encoding="utf-8")
    if not r.ok:
        return files
    comment = header(cfg, N=r.N, delta=_fmt(r.delta))
    ev = r.eigenvalues
    files.append(write_csv(out / f"eigenvalues_N{r.N}.csv", comment, ["index", "re", "im"],
                           ([k, _fmt(v.real), _fmt(v.imag)] for k, v in enumerate(ev))))
    w = _fmt(1.0 / ev.size)
    files.append(write_csv(out / f"measure_N{r.N}.csv", comment, ["re", "im", "weight"],
                           ([_fmt(v.real), _fmt(v.imag), w] for v in ev)))
    dist = {"config_hash": cfg.hash, "seed": cfg.seed, "N": r.N, "delta": r.delta,
            "distances": r.distances, "frac_in_range": r.frac_in_range}
    path = out / f"distances_N{r.N}.json"
    path.write_text(json.dumps(dist, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files.append(path)
    files.append(spectrum_svg(
        out / f"spectrum_N{r.N}.svg", ev, ctx.reference.points,
        title=f"{ctx.sym.label}, N = {r.N}", comment=header(cfg, N=r.N).lstrip("# "),
    ))
    return files


def _summary_rows(cfg: ExperimentConfig, results: list[NResult]):
    for r in results:
        row = [r.N, _fmt(r.delta)]
        row += [_fmt(r.distances.get(m, math.nan)) for m in cfg.distances]
        for z in cfg.z:
            row += [r.counts.get(z, -1), _fmt(r.ratios.get(z, math.nan))]
        row += [_fmt(r.frac_in_range), r.error or ""]
        yield row


def run_experiment(cfg: ExperimentConfig) -> RunArtifacts:
    """Run the pipeline for every ``N`` of `cfg` and write all artifacts to ``cfg.out_dir``."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    ctx = _Context(cfg)
    if cfg.threads > 1 and len(cfg.N) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda n: _safe_run(ctx, n), cfg.N))
    else:
        results = [_safe_run(ctx, n) for n in cfg.N]
    files = []
    for r in results:
        files += _write_n(ctx, r, out)
    ref = ctx.reference.points
    files.append(write_csv(out / "pushforward.csv", header(cfg, n=len(ref)), ["re", "im", "weight"],
                           ([_fmt(v.real), _fmt(v.imag), _fmt(1.0 / ref.size)] for v in ref)))
    columns = ["N", "delta"] + list(cfg.distances)
    for z in cfg.z:
        tag = f"{z.real:+g}{z.imag:+g}i"
        columns += [f"count[{tag}]", f"ratio[{tag}]"]
    columns += ["frac_in_range", "error"]
    files.append(write_csv(out / "summary.csv", header(cfg), columns, _summary_rows(cfg, results)))
    report = {
        "config_hash": cfg.hash,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "omega": ctx.omega,
        "criterion_constants": None if ctx.constants is None else {
            "S": ctx.constants.S, "Xi": ctx.constants.Xi, "m_lower": ctx.constants.m_lower,
            "kappa": ctx.constants.kappa, "C": ctx.constants.C,
        },
        "z_grid_note": "criterion checks over z use a finite grid and are heuristic",
        "runs": [
            {"N": r.N, "delta": r.delta, "error": r.error, "distances": r.distances,
             "alpha": r.alpha, "frac_in_range": r.frac_in_range,
             "singular_counts": [{"z": [z.real, z.imag], "count": c, "ratio": r.ratios[z]}
                                 for z, c in r.counts.items()]}
            for r in results
        ],
    }
    path = out / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    files.append(path)
    return RunArtifacts(out, cfg.hash, results, ctx.constants, ctx.omega, files)


@dataclass
class SweepTable:
    """Distances and singular counts over ``N``; ``monotone`` uses a 20% slack."""

    artifacts: RunArtifacts
    Ns: list[int]
    distances: dict[str, list[float]]
    counts: dict[complex, list[int]]
    monotone: dict[str, bool]
    path: Path


def convergence_sweep(cfg: ExperimentConfig, slack: float = SWEEP_SLACK) -> SweepTable:
    """Run `cfg` over its ``N`` list and check that each distance is non-increasing up to `slack`."""
    if len(cfg.N) < 3:
        raise PreconditionError("a sweep needs at least three values of N")
    cfg = cfg.with_overrides(N=tuple(sorted(cfg.N)))
    art = run_experiment(cfg)
    good = [r for r in art.results if r.ok]
    Ns = [r.N for r in good]
    dists = {m: [r.distances[m] for r in good] for m in cfg.distances}
    counts = {z: [r.counts[z] for r in good] for z in cfg.z}
    mono = {m: all(b <= slack * a for a, b in zip(v[:-1], v[1:])) for m, v in dists.items()}
    rows = []
    for k, n in enumerate(Ns):
        rows.append([n] + [_fmt(dists[m][k]) for m in cfg.distances] + [counts[z][k] for z in cfg.z])
    cols = ["N"] + list(cfg.distances) + [f"count[{z.real:+g}{z.imag:+g}i]" for z in cfg.z]
    path = write_csv(art.out_dir / "sweep.csv", header(cfg, slack=slack), cols, rows)
    art.files.append(path)
    return SweepTable(art, Ns, dists, counts, mono, path)
