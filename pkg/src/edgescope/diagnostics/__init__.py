"""Lyapunov spectra, ordinal entropy, continuity and spectral difference."""

from .continuity import ContinuityReport, continuity_pair, continuity_stat
from .entropy import EntropyReport, ordinal_entropy, ordinal_patterns, symbol_entropy
from .lyapunov import (
    LinearMapSystem,
    LorenzSystem,
    LyapunovReport,
    Map3dSystem,
    ReservoirSystem,
    TangentSystem,
    kaplan_yorke,
    kaplan_yorke_saturated,
    lyapunov_spectrum,
    max_local_lyapunov,
    reservoir_lyapunov_report,
)
from .spectral import SpectralDiffReport, spectral_difference, weighted_mean_frequency

__all__ = [
    "ContinuityReport",
    "EntropyReport",
    "LinearMapSystem",
    "LorenzSystem",
    "LyapunovReport",
    "Map3dSystem",
    "ReservoirSystem",
    "SpectralDiffReport",
    "TangentSystem",
    "continuity_pair",
    "continuity_stat",
    "kaplan_yorke",
    "kaplan_yorke_saturated",
    "lyapunov_spectrum",
    "max_local_lyapunov",
    "ordinal_entropy",
    "ordinal_patterns",
    "reservoir_lyapunov_report",
    "spectral_difference",
    "symbol_entropy",
    "weighted_mean_frequency",
]
