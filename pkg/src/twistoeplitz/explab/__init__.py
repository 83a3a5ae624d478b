"""Experiment driver: configs, pipeline runs, figures and the command line."""

from .config import ExperimentConfig, load_config
from .figures import FigureResult, reproduce_figures
from .pipeline import NResult, RunArtifacts, SweepTable, convergence_sweep, run_experiment
from .selftest import SelftestResult, run_selftest

__all__ = [
    "ExperimentConfig", "load_config", "FigureResult", "reproduce_figures",
    "NResult", "RunArtifacts", "SweepTable", "convergence_sweep", "run_experiment",
    "SelftestResult", "run_selftest",
]
