"""Continuity statistic between two time-aligned state sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..numerics import Rng


@dataclass
class ContinuityReport:
    psi: float
    direction: str
    eps_fraction: float
    n_ref: int
    theiler: int
    confidences: np.ndarray | None = None


def rms_radius(Z) -> float:
    Z = np.asarray(Z, dtype=float)
    return float(np.sqrt(np.mean(np.sum((Z - Z.mean(axis=0)) ** 2, axis=1))))


def _as_2d(Z):
    Z = np.asarray(Z, dtype=float)
    return Z[:, None] if Z.ndim == 1 else Z


def continuity_stat(
    X,
    Y,
    eps_fraction: float = 0.2,
    n_ref: int = 100,
    theiler: int = 10,
    delta_shrink: float = 0.5,
    seed: int = 0,
    direction: str = "forward",
    min_length: int = 2000,
) -> ContinuityReport:
    """Confidence that nearby points in X map to nearby points in Y.

    For each of ``n_ref`` seeded reference times ``t0``:

    * ``eps`` is ``eps_fraction`` times the RMS radius of Y, and ``p`` is the
      fraction of points (outside the Theiler window ``|t - t0| <= theiler``)
      whose Y-distance to ``y[t0]`` is below ``eps``.
    * ``delta`` starts at the RMS radius of X and is multiplied by
      ``delta_shrink`` until all ``n`` delta-neighbours of ``x[t0]`` land
      inside the eps-ball of ``y[t0]``. The confidence is then ``1 - p**n``.
      If the neighbourhood empties first, the confidence is 0.

    ``psi`` is the mean confidence.
    """
    X = _as_2d(X)
    Y = _as_2d(Y)
    T = X.shape[0]
    if Y.shape[0] != T:
        raise InvalidInputError("X and Y must be time-aligned")
    if T < min_length:
        raise InvalidInputError(f"need at least {min_length} samples, got {T}")
    if not 0 < delta_shrink < 1:
        raise InvalidInputError("delta_shrink must be in (0, 1)")
    if not eps_fraction > 0:
        raise InvalidInputError("eps_fraction must be positive")
    ry = rms_radius(Y)
    rx = rms_radius(X)
    if not ry > 0 or not rx > 0:
        raise InvalidInputError("degenerate (zero radius) state cloud")
    eps = eps_fraction * ry
    refs = Rng(seed).choice(T, min(n_ref, T))
    t = np.arange(T)
    conf = np.empty(refs.size)
    for i, t0 in enumerate(refs):
        valid = np.abs(t - t0) > theiler
        dx = np.sqrt(np.sum((X[valid] - X[t0]) ** 2, axis=1))
        inside = np.sqrt(np.sum((Y[valid] - Y[t0]) ** 2, axis=1)) < eps
        p = inside.mean()
        delta = rx
        conf[i] = 0.0
        while True:
            nb = dx < delta
            n = int(nb.sum())
            if n == 0:
                break
            if inside[nb].all():
                conf[i] = 1.0 - p**n
                break
            delta *= delta_shrink
    return ContinuityReport(psi=float(conf.mean()), direction=direction, eps_fraction=eps_fraction,
                            n_ref=int(refs.size), theiler=theiler, confidences=conf)


def continuity_pair(driver_states, reservoir_states, **kwargs) -> tuple[ContinuityReport, ContinuityReport]:
    """Forward (driver -> reservoir) and reverse (reservoir -> driver) statistics."""
    fwd = continuity_stat(driver_states, reservoir_states, direction="forward", **kwargs)
    rev = continuity_stat(reservoir_states, driver_states, direction="reverse", **kwargs)
    return fwd, rev
