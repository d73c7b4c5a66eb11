"""Polynomial reservoir computers driven by chaotic signals, with the
diagnostics used to study where the best testing error sits relative to the
edge of stability."""

from .estimator import PolynomialReservoirRegressor
from .experiment import SweepConfig, SweepRecord, find_edge, reproduce_figure, run_sweep
from .numerics import Rng, fft_magnitude, ridge_solve, rk4_step, spectral_radius
from .readout import ReadoutModel, evaluate_readout, train_readout
from .reservoir import NetworkSpec, ReservoirParams, ReservoirRun, build_network, run_reservoir
from .signals import DriverTrajectory, lorenz_trajectory, map3d_trajectory, normalize_input

__version__ = "0.1.0"

__all__ = [
    "DriverTrajectory",
    "NetworkSpec",
    "PolynomialReservoirRegressor",
    "ReadoutModel",
    "ReservoirParams",
    "ReservoirRun",
    "Rng",
    "SweepConfig",
    "SweepRecord",
    "build_network",
    "evaluate_readout",
    "fft_magnitude",
    "find_edge",
    "lorenz_trajectory",
    "map3d_trajectory",
    "normalize_input",
    "reproduce_figure",
    "ridge_solve",
    "rk4_step",
    "run_reservoir",
    "run_sweep",
    "spectral_radius",
    "train_readout",
]
