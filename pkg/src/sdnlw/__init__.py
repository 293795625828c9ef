"""Pseudospectral Monte-Carlo laboratory for the truncated stochastic damped
nonlinear wave equation on the 2-torus."""

from .renorm import RenormConstants, solve_lambda, sigma_weak, hermite, wick_coefficients
from .spectral import PairState, SpectralField, project, sobolev_norm, winfty_norm
from .sampling import NoiseStream, sample_initial
from .linear import ModeSymbols, symbols_for, transition_covariance, zN_step
from .integrator import (
    SimConfig,
    TrajectoryRecord,
    energy,
    simulate,
    solve_deterministic_limit,
    wick_powers,
)
from .diagnostics import SpaceTimeSample, make_sample, spacetime_norm, vlin_trajectory
from .studies import StudySpec, emit_plotdata

__version__ = "0.1.0"

__all__ = [
    "RenormConstants", "solve_lambda", "sigma_weak", "hermite", "wick_coefficients",
    "PairState", "SpectralField", "project", "sobolev_norm", "winfty_norm",
    "NoiseStream", "sample_initial",
    "ModeSymbols", "symbols_for", "transition_covariance", "zN_step",
    "SimConfig", "TrajectoryRecord", "energy", "simulate",
    "solve_deterministic_limit", "wick_powers",
    "SpaceTimeSample", "make_sample", "spacetime_norm", "vlin_trajectory",
    "StudySpec", "emit_plotdata",
    "__version__",
]
