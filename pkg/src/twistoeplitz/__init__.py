"""Twisted Toeplitz matrices, their random perturbations and spectral statistics.

Modules
-------
symbol       symbols p(x, xi), evaluation, mollification, built-in examples
quantize     twisted Toeplitz and torus quantization matrices, exact identities
perturb      seeded random ensembles and the coupling delta(N)
spectra      eigenvalues, empirical and push-forward measures, log potentials
assumptions  sublevel-set volumes and closed-form criterion constants
explab       experiment configs, pipeline, figures and the command line
"""

from ._errors import (
    AccuracyError, ConfigError, CriterionInapplicableError, DegenerateFitError,
    DomainError, NumericError, PreconditionError, TwistoeplitzError,
)
from .symbol import Symbol, eval_symbol, library, mollify
from .quantize import QuantMatrix, build_matrix, build_torus_matrix, operator_norm
from .perturb import DeltaSchedule, EnsembleSpec, sample
from .spectra import EmpiricalMeasure, eigenvalues, pushforward_measure

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ConfigError", "CriterionInapplicableError", "DegenerateFitError",
    "DomainError", "NumericError", "PreconditionError", "TwistoeplitzError",
    "Symbol", "eval_symbol", "library", "mollify",
    "QuantMatrix", "build_matrix", "build_torus_matrix", "operator_norm",
    "DeltaSchedule", "EnsembleSpec", "sample",
    "EmpiricalMeasure", "eigenvalues", "pushforward_measure",
]
