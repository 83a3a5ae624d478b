"""Command line entry point: ``twistoeplitz VERB [options]``.

Verbs
-----
build     write M_N(p) as a TWQM binary and a sparse CSV
spectrum  eigenvalues of M_N(p) + delta Q (CSV, JSON sidecar, SVG)
measure   push-forward sample of the symbol, and its distance to a spectrum
assume    volume estimates, power-law fit, criterion constants
sweep     run a config over its N list and check the convergence trend
figure    regenerate fig1, fig2 or fig3
selftest  small end-to-end check; deterministic CSV output
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .._errors import TwistoeplitzError
from ..assumptions import (
    criterion_constants, estimate_volume, fit_exponent, thickened_singularity_volume,
)
from ..perturb import DeltaSchedule, EnsembleSpec, default_kappa3, sample
from ..quantize import build_matrix
from ..spectra import EmpiricalMeasure, eigenvalues, measure_distance, pushforward_measure
from ..symbol import MollifierSpec, mollify
from .config import ExperimentConfig, load_config
from .figures import reproduce_figures, spectrum_svg
from .pipeline import convergence_sweep, header
from .selftest import run_selftest

log = logging.getLogger("twistoeplitz")


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(out=".")
    over = {"seed": args.seed, "out": str(Path(args.out).resolve()) if args.out else None,
            "threads": args.threads}
    if getattr(args, "symbol", None):
        over.update(symbol=args.symbol, manifest=None)
    if getattr(args, "N", None):
        over["N"] = tuple(args.N)
    return cfg.with_overrides(**over)


def _matrix(cfg: ExperimentConfig, N: int):
    sym = cfg.load_symbol()
    if cfg.mollify:
        sym = mollify(sym, 1.0 / (2 * math.pi * N), MollifierSpec(cfg.eta, cfg.quad_nodes, sym.d))
    return sym, build_matrix(sym, N, cfg.convention)


def cmd_build(args) -> int:
    cfg = _config(args)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    for N in cfg.N:
        _, M = _matrix(cfg, N)
        M.to_binary(out / f"matrix_N{N}.twqm")
        M.to_csv(out / f"matrix_N{N}.csv")
        print(f"N={N}: wrote {out / f'matrix_N{N}.twqm'}")
    return 0


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    for N in cfg.N:
        sym, M = _matrix(cfg, N)
        data, delta = M.data, 0.0
        if cfg.ensemble != "none":
            k3 = cfg.kappa3 if cfg.kappa3 is not None else default_kappa3(cfg.ensemble, sym.d)
            delta = DeltaSchedule(k3, cfg.delta0).delta(N)
            data = data + delta * sample(EnsembleSpec(cfg.ensemble, cfg.seed, M.dim))
        res = eigenvalues(data)
        meta = {"config_hash": cfg.hash, "seed": cfg.seed, "symbol": sym.label, "N": N,
                "delta": delta, "ensemble": cfg.ensemble}
        res.to_csv(out / f"spectrum_N{N}.csv", meta)
        spectrum_svg(out / f"spectrum_N{N}.svg", res.eigenvalues, title=f"{sym.label}, N = {N}",
                     comment=header(cfg, N=N).lstrip("# "))
        print(f"N={N}: delta={delta:.3e} backward_error={res.backward_error:.2e}")
    return 0


def cmd_measure(args) -> int:
    cfg = _config(args)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    sym = cfg.load_symbol()
    ref = pushforward_measure(sym, args.n, args.mode)
    ref.to_csv(out / "pushforward.csv")
    print(f"push-forward sample: {len(ref)} atoms -> {out / 'pushforward.csv'}")
    if args.spectrum:
        pts = np.loadtxt(args.spectrum, delimiter=",", skiprows=1, usecols=(1, 2), comments="#")
        mu = EmpiricalMeasure(pts[:, 0] + 1j * pts[:, 1])
        result = {"w1_assignment": measure_distance(mu, ref, n_sub=min(cfg.w1_subsample, len(mu))),
                  "logpot_grid": measure_distance(mu, ref, "logpot_grid")}
        print(json.dumps(result, indent=2))
    return 0


def cmd_assume(args) -> int:
    cfg = _config(args)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    sym = cfg.load_symbol()
    t = np.logspace(math.log10(args.tmin), math.log10(args.tmax), args.nt)
    z = complex(args.z)
    est = estimate_volume(sym, z, t, args.n_mc, cfg.seed)
    est.to_csv(out / "volume.csv")
    report = {"config_hash": cfg.hash, "seed": cfg.seed, "z": [z.real, z.imag]}
    try:
        k, C, r2 = fit_exponent(est)
        report["fit"] = {"kappa_hat": k, "C_hat": C, "r2": r2}
    except TwistoeplitzError as exc:
        report["fit"] = str(exc)
    try:
        c = criterion_constants(sym)
        report["criterion"] = {"S": c.S, "Xi": c.Xi, "m_lower": c.m_lower, "kappa": c.kappa, "C": c.C}
    except TwistoeplitzError as exc:
        report["criterion"] = str(exc)
    try:
        report["thickened_volume"] = {str(r): thickened_singularity_volume(sym, r) for r in (0.1, 0.01, 0.001)}
    except NotImplementedError as exc:
        report["thickened_volume"] = str(exc)
    (out / "assumptions.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    table = convergence_sweep(cfg)
    for k, N in enumerate(table.Ns):
        cells = "  ".join(f"{m}={v[k]:.4g}" for m, v in table.distances.items())
        print(f"N={N}  {cells}")
    for m, ok in table.monotone.items():
        print(f"{m}: {'non-increasing (20% slack)' if ok else 'NOT monotone'}")
    print(f"wrote {table.path}")
    return 0


def cmd_figure(args) -> int:
    seed = args.seed if args.seed is not None else 7
    out = Path(args.out or "figures")
    res = reproduce_figures(args.which, out, args.scale, seed, args.N[0] if args.N else None)
    for path in res.files:
        print(f"wrote {path}")
    print(json.dumps(res.info, indent=2, default=str))
    return 0


def cmd_selftest(args) -> int:
    seed = args.seed if args.seed is not None else 0
    res = run_selftest(Path(args.out or "selftest"), seed)
    for name, ok, value in res.checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({value:.3g})")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (TOML)")
    common.add_argument("--seed", type=int, help="global seed (u64)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--scale", choices=("desk", "paper"), default="desk")
    common.add_argument("--threads", type=int, help="worker threads over N")
    common.add_argument("--symbol", help="library symbol, e.g. jordan, hpm_example, 'bidiagonal(2,1)'")
    common.add_argument("--N", type=int, nargs="+", help="matrix sizes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="twistoeplitz", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("build", parents=[common], help="write matrices").set_defaults(func=cmd_build)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues").set_defaults(func=cmd_spectrum)
    p = sub.add_parser("measure", parents=[common], help="push-forward sample and distances")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--mode", choices=("halton", "grid"), default="halton")
    p.add_argument("--spectrum", help="spectrum CSV to compare against the sample")
    p.set_defaults(func=cmd_measure)
    p = sub.add_parser("assume", parents=[common], help="assumption diagnostics")
    p.add_argument("--z", default="0", help="complex point, e.g. '1+0.5j'")
    p.add_argument("--tmin", type=float, default=1e-4)
    p.add_argument("--tmax", type=float, default=1e-1)
    p.add_argument("--nt", type=int, default=10)
    p.add_argument("--n-mc", dest="n_mc", type=int, default=100_000)
    p.set_defaults(func=cmd_assume)
    sub.add_parser("sweep", parents=[common], help="convergence sweep").set_defaults(func=cmd_sweep)
    p = sub.add_parser("figure", parents=[common], help="regenerate a figure")
    p.add_argument("--which", choices=("fig1", "fig2", "fig3"), required=True)
    p.set_defaults(func=cmd_figure)
    sub.add_parser("selftest", parents=[common], help="quick deterministic self check").set_defaults(
        func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TwistoeplitzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
