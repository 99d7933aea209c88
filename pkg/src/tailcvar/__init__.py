"""Bias-corrected peaks-over-threshold CVaR estimation for heavy-tailed data."""

__version__ = "0.1.0"

from .analysis import AvarPoint, avar_curve, avar_sa_frechet, avar_upot, coverage_probability, run_metrics
from .cvar import CvarEstimate, Method, cvar_sa, estimate, pot_cvar, var_sa
from .distributions import DistributionSpec, Family, parse_distribution
from .errors import ConvergenceError, DataError, DomainError, FitError, TailCvarError
from .gpd import GpdFit, fit_mle
from .harness import SimConfig, SimResult, ingest, run_coverage, run_simulation
from .sample import SortedSample
from .secondorder import TailDiagnostics, adarho
from .threshold import ThresholdChoice, ThresholdGrid, autothresh

__all__ = [
    "AvarPoint", "ConvergenceError", "CvarEstimate", "DataError", "DistributionSpec", "DomainError",
    "Family", "FitError", "GpdFit", "Method", "SimConfig", "SimResult", "SortedSample", "TailCvarError",
    "TailDiagnostics", "ThresholdChoice", "ThresholdGrid", "adarho", "autothresh", "avar_curve",
    "avar_sa_frechet", "avar_upot", "coverage_probability", "cvar_sa", "estimate", "fit_mle", "ingest",
    "parse_distribution", "pot_cvar", "run_coverage", "run_metrics", "run_simulation", "var_sa",
]
