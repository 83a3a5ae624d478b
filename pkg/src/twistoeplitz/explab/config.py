"""Experiment configuration files.

Configs are TOML. Every key is optional except ``symbol.name`` (or
``symbol.manifest``) and ``grid.N``::

    seed = 7                      # global seed (u64)
    out = "runs/jordan"           # output directory
    threads = 1                   # worker pool size over N

    [symbol]
    name = "jordan"               # library name, or
    # manifest = "my_symbol.json" # path relative to the config file
    convention = "paper_matrix"   # or "convolution"

    [grid]
    N = [128, 256, 512]

    [mollify]
    enabled = false
    eta = 0.16666666666666666
    quad_nodes = 64

    [perturbation]
    ensemble = "ginibre_complex"  # haar_unitary_scaled | bernoulli_pm1 | none
    kappa3 = 0.5                  # default: d/2
    delta0 = 1.1                  # delta(N) = N^-(kappa3 + delta0)

    [analysis]
    z = [[-1.0, 0.5]]             # points for singular-value counts, [re, im]
    distances = ["w1_assignment", "logpot_grid", "histogram_tv"]
    pushforward_n = 512
    pushforward_mode = "halton"   # or "grid"
    w1_subsample = 512
    range_tol = 0.1

The config hash is the SHA-256 of the canonical JSON form with ``out`` and
``threads`` removed, so it identifies everything that affects results.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .._errors import ConfigError
from ..perturb import EnsembleKind
from ..quantize import QuantizationConvention
from ..symbol import Symbol, library, load_manifest

__all__ = ["ExperimentConfig", "load_config"]

DISTANCES = ("w1_assignment", "logpot_grid", "histogram_tv")


@dataclass(frozen=True)
class ExperimentConfig:
    symbol: str = "jordan"
    manifest: str | None = None
    convention: str = QuantizationConvention.PAPER_MATRIX.value
    N: tuple[int, ...] = (128,)
    mollify: bool = False
    eta: float = 1.0 / 6.0
    quad_nodes: int = 64
    ensemble: str = EnsembleKind.GINIBRE.value
    kappa3: float | None = None
    delta0: float = 1.1
    z: tuple[complex, ...] = (complex(-1.0, 0.5),)
    distances: tuple[str, ...] = DISTANCES
    pushforward_n: int = 512
    pushforward_mode: str = "halton"
    w1_subsample: int = 512
    range_tol: float = 0.1
    seed: int = 0
    out: str = "runs"
    threads: int = 1
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        Ns = tuple(int(n) for n in self.N)
        if not Ns or min(Ns) < 1:
            raise ConfigError("all N must be positive")
        object.__setattr__(self, "N", Ns)
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "distances", tuple(self.distances))
        if self.delta0 <= 0:
            raise ConfigError("delta0 must be positive")
        if self.kappa3 is not None and self.kappa3 < 0:
            raise ConfigError("kappa3 must be non-negative")
        if not 0 < self.eta < 0.25:
            raise ConfigError("eta must lie in (0, 1/4)")
        if self.ensemble != "none":
            try:
                EnsembleKind(self.ensemble)
            except ValueError:
                raise ConfigError(f"unknown ensemble {self.ensemble!r}") from None
        try:
            QuantizationConvention(self.convention)
        except ValueError:
            raise ConfigError(f"unknown convention {self.convention!r}") from None
        bad = set(self.distances) - set(DISTANCES)
        if bad:
            raise ConfigError(f"unknown distance methods {sorted(bad)}")
        if self.pushforward_mode not in ("halton", "grid"):
            raise ConfigError("pushforward_mode must be 'halton' or 'grid'")
        if not 1 <= self.w1_subsample <= 1024:
            raise ConfigError("w1_subsample must lie in [1, 1024]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ConfigError("threads must be positive")

    def load_symbol(self) -> Symbol:
        if self.manifest:
            path = Path(self.manifest)
            if not path.is_absolute():
                path = Path(self.base_dir) / path
            return load_manifest(path)
        return library(self.symbol)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("base_dir")
        data["N"] = list(self.N)
        data["z"] = [[v.real, v.imag] for v in self.z]
        data["distances"] = list(self.distances)
        return data

    @property
    def hash(self) -> str:
        data = self.to_dict()
        data.pop("out")
        data.pop("threads")
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    @property
    def out_dir(self) -> Path:
        path = Path(self.out)
        return path if path.is_absolute() else Path(self.base_dir) / path

    @classmethod
    def from_mapping(cls, data: dict, base_dir: str = ".") -> "ExperimentConfig":
        data = dict(data)
        sym = data.pop("symbol", {})
        grid = data.pop("grid", {})
        moll = data.pop("mollify", {})
        pert = data.pop("perturbation", {})
        ana = data.pop("analysis", {})
        kw: dict = {}
        for key in ("seed", "out", "threads"):
            if key in data:
                kw[key] = data.pop(key)
        if data:
            raise ConfigError(f"unknown top-level keys {sorted(data)}")
        if isinstance(sym, str):
            sym = {"name": sym}
        _take(kw, sym, {"name": "symbol", "manifest": "manifest", "convention": "convention"}, "symbol")
        _take(kw, grid, {"N": "N"}, "grid")
        _take(kw, moll, {"enabled": "mollify", "eta": "eta", "quad_nodes": "quad_nodes"}, "mollify")
        _take(kw, pert, {"ensemble": "ensemble", "kappa3": "kappa3", "delta0": "delta0"}, "perturbation")
        _take(kw, ana, {
            "z": "z", "distances": "distances", "pushforward_n": "pushforward_n",
            "pushforward_mode": "pushforward_mode", "w1_subsample": "w1_subsample",
            "range_tol": "range_tol",
        }, "analysis")
        if "z" in kw:
            try:
                kw["z"] = tuple(complex(re, im) for re, im in kw["z"])
            except (TypeError, ValueError):
                raise ConfigError("analysis.z must be a list of [re, im] pairs") from None
        if isinstance(kw.get("N"), int):
            kw["N"] = (kw["N"],)
        try:
            return cls(base_dir=str(base_dir), **kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _take(kw: dict, table: dict, names: dict, section: str) -> None:
    unknown = set(table) - set(names)
    if unknown:
        raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    for src, dst in names.items():
        if src in table:
            kw[dst] = table[src]


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_mapping(data, base_dir=str(path.parent))
