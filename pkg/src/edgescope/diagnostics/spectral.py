"""Frequency-weighted spectral difference between a target and node signals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TooShortError
from ..numerics import fft_magnitude

GUARD_REL = 1e-9


@dataclass
class SpectralDiffReport:
    delta_f: float
    per_node_terms: np.ndarray
    guard_hits: int
    target_mean_freq: float


def weighted_mean_frequency(mags, freqs) -> float:
    return float(np.sum(mags * freqs) / np.sum(mags))


def spectral_difference(g, states, prose_variant: bool = False, min_length: int = 512) -> SpectralDiffReport:
    """``wmf(|G|) - mean_i T_i`` on normalized frequencies 0..0.5.

    ``T_i = sum((|G| - |R_i|) f) / sum(|G| - |R_i|)``, the signed difference
    spectrum used in both numerator and denominator. A node whose
    denominator is below ``1e-9 * sum|G|`` in magnitude contributes
    ``T_i = wmf(|G|)`` and is counted in ``guard_hits``.

    With ``prose_variant`` the node term is ``wmf(|R_i|)`` instead.
    """
    g = np.asarray(g, dtype=float).ravel()
    R = np.asarray(states, dtype=float)
    if R.ndim == 1:
        R = R[:, None]
    if g.size < min_length or R.shape[0] < min_length:
        raise TooShortError(f"need at least {min_length} samples")
    G = fft_magnitude(g)
    f = G.freqs
    g_mag = G.mags
    g_wmf = weighted_mean_frequency(g_mag, f)
    g_total = g_mag.sum()
    terms = np.empty(R.shape[1])
    hits = 0
    for i in range(R.shape[1]):
        r_mag = fft_magnitude(R[:, i]).mags
        if prose_variant:
            den = r_mag.sum()
            if den <= GUARD_REL * g_total:
                terms[i] = g_wmf
                hits += 1
            else:
                terms[i] = np.sum(r_mag * f) / den
            continue
        diff = g_mag - r_mag
        den = diff.sum()
        if abs(den) < GUARD_REL * g_total:
            terms[i] = g_wmf
            hits += 1
        else:
            terms[i] = np.sum(diff * f) / den
    return SpectralDiffReport(delta_f=float(g_wmf - terms.mean()), per_node_terms=terms,
                              guard_hits=hits, target_mean_freq=g_wmf)
