"""Ordinal-pattern entropy of a multi-node trajectory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InvalidInputError


@dataclass
class EntropyReport:
    H: float
    n_symbols: int
    window: int
    counts: np.ndarray


def ordinal_patterns(x, window: int = 4) -> np.ndarray:
    """Pattern codes for every length-``window`` sliding window (stride 1).

    ``x`` has shape (T,) or (T, M); the result has shape (T - window + 1, M).
    Each window maps to its argsort permutation (equal values keep time
    order, so the earlier sample ranks lower), encoded in base ``window``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < window + 1:
        raise InvalidInputError(f"need at least {window + 1} samples, got {x.shape[0]}")
    win = sliding_window_view(x, window, axis=0)  # (T-w+1, M, w)
    perm = np.argsort(win, axis=-1, kind="stable")
    weights = window ** np.arange(window - 1, -1, -1)
    return (perm * weights).sum(axis=-1)


def symbol_entropy(symbols) -> EntropyReport:
    """Shannon entropy (nats) of a symbol stream; rows of a 2-D array are symbols."""
    symbols = np.asarray(symbols)
    if symbols.shape[0] == 0:
        raise InvalidInputError("empty symbol stream")
    if symbols.ndim == 1:
        _, counts = np.unique(symbols, return_counts=True)
    else:
        _, counts = np.unique(symbols, axis=0, return_counts=True)
    p = counts / counts.sum()
    H = float(-np.sum(p * np.log(p))) + 0.0  # no negative zero for a single symbol
    return EntropyReport(H=max(H, 0.0), n_symbols=int(counts.size), window=0, counts=counts)


def ordinal_entropy(states, window: int = 4) -> EntropyReport:
    """Entropy of the global symbol formed by concatenating every node's ordinal pattern.

    The pattern at time t uses samples ``t .. t + window - 1``, so the global
    stream has ``T - window + 1`` symbols.
    """
    codes = ordinal_patterns(states, window)
    report = symbol_entropy(codes)
    report.window = window
    return report
