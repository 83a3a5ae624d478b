"""Quick end-to-end self check with fixed small sizes.

Runs the exact identities at small ``N``, two tiny pipeline runs and a
volume estimate, writing every table as CSV under the output directory.
Two runs with the same seed must produce byte-identical CSV files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..assumptions import criterion_constants, estimate_volume
from ..quantize import (
    aliasing_decomposition_check, build_matrix, build_torus_matrix,
    torus_coeffs_from_function, trace_formula_check,
)
from ..symbol import FrequencyLattice, PiecewiseCoefficient, Symbol, library
from ._io import write_csv
from .config import ExperimentConfig
from .pipeline import run_experiment

__all__ = ["SelftestResult", "run_selftest"]


@dataclass
class SelftestResult:
    checks: list[tuple[str, bool, float]] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def _identity_checks(N: int = 16) -> list[tuple[str, bool, float]]:
    checks = []
    J = build_matrix(library("jordan"), N).data
    dev = float(np.abs(J - np.eye(N, k=1)).max())
    checks.append(("jordan_exact", dev == 0.0, dev))

    def f(x, xi):
        return 2 + np.cos(2 * np.pi * x[:, 0]) + np.cos(2 * np.pi * xi[:, 0])

    table = torus_coeffs_from_function(f, 1, 2, 2)
    _, _, resid = trace_formula_check(table, N)
    checks.append(("trace_identity", resid <= 1e-9 * N, resid))
    F = build_torus_matrix(table, N, 0.5).data
    herm = float(np.abs(F - F.conj().T).max())
    checks.append(("hermitian", herm <= 1e-10, herm))
    sym = Symbol(FrequencyLattice((0,), (1,)), {(1,): PiecewiseCoefficient.from_expr("cos(2*pi*x)")})
    rep = aliasing_decomposition_check(sym, N)
    checks.append(("aliasing", rep.max_deviation <= 1e-10, rep.max_deviation))
    c = criterion_constants(library("hpm_example"))
    checks.append(("criterion_kappa", c.kappa == 0.25, c.kappa))
    return checks


def run_selftest(out, seed: int = 0) -> SelftestResult:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    res = SelftestResult(_identity_checks())
    base = ExperimentConfig(
        symbol="jordan", N=(32, 64), seed=seed, out=str(out / "jordan"),
        z=(0.5 + 0j,), pushforward_n=256, w1_subsample=256,
    )
    art = run_experiment(base)
    res.files += art.files
    ok = all(r.ok for r in art.results)
    res.checks.append(("pipeline_jordan", ok, art.result(64).frac_in_range if ok else math.nan))
    hpm = ExperimentConfig(
        symbol="hpm_example", N=(48,), mollify=True, seed=seed, out=str(out / "hpm"),
        z=(complex(-1, 0.5),), pushforward_n=256, w1_subsample=256,
    )
    art = run_experiment(hpm)
    res.files += art.files
    ok = all(r.ok for r in art.results)
    res.checks.append(("pipeline_hpm_mollified", ok, art.result(48).distances.get("w1_assignment", math.nan)))
    t = np.logspace(-4, -1, 7)
    est = estimate_volume(library("jordan"), 1.0, t, 20_000, seed)
    exact = (2 / np.pi) * np.arcsin(np.sqrt(t) / 2)
    z = float(np.max(np.abs(est.vhat - exact) / np.maximum(est.stderr, 1e-12)))
    res.checks.append(("volume_jordan", z <= 4.0, z))
    res.files.append(write_csv(out / "volume_jordan.csv", f"# seed={seed}", ["t", "vhat", "stderr", "exact"],
                               ([f"{a:.12e}", f"{b:.12e}", f"{c:.12e}", f"{e:.12e}"]
                                for a, b, c, e in zip(t, est.vhat, est.stderr, exact))))
    res.files.append(write_csv(out / "selftest.csv", f"# seed={seed}", ["check", "passed", "value"],
                               ([name, int(ok), f"{v:.12e}"] for name, ok, v in res.checks)))
    return res
