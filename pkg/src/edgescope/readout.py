"""Linear readout training and the normalized training/testing errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CannotTrainError, DegenerateTargetError, InvalidInputError
from .numerics import ridge_solve
from .reservoir import ReservoirRun

DISCARD = 1000
FIT = 10000


@dataclass
class ReadoutModel:
    c: np.ndarray
    lambda_rel: float
    discard: int = DISCARD
    fit: int = FIT
    bias: float = 0.0
    use_bias: bool = False

    def predict(self, states) -> np.ndarray:
        return np.asarray(states, dtype=float) @ self.c + self.bias


@dataclass
class ErrorStats:
    delta_rc: float
    delta_tx: float


def _pstd(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean((x - x.mean()) ** 2)))


def normalized_error(g, h) -> float:
    """``std(g - h) / std(g)`` with population standard deviations."""
    sg = _pstd(g)
    if not sg > 0:
        raise DegenerateTargetError("target has zero standard deviation")
    return _pstd(np.asarray(g, dtype=float) - np.asarray(h, dtype=float)) / sg


def _window(n_rows: int, discard: int, fit: int | None) -> slice:
    stop = n_rows if fit is None else discard + fit
    if stop > n_rows or discard >= stop:
        raise InvalidInputError(f"window [{discard}, {stop}) does not fit {n_rows} samples")
    return slice(discard, stop)


def train_readout(run: ReservoirRun, g, lambda_rel: float = 1e-8, discard: int = DISCARD,
                  fit: int | None = FIT, use_bias: bool = False) -> tuple[ReadoutModel, float]:
    """Ridge fit ``h = sum_i c_i r_i`` on rows ``[discard, discard + fit)``.

    Returns the model and the training error on the same window.
    """
    if not run.stable:
        raise CannotTrainError(f"reservoir diverged at step {run.divergence_step}")
    g = np.asarray(g, dtype=float).ravel()
    if g.shape[0] < run.states.shape[0] and fit is None:
        raise InvalidInputError("target shorter than run")
    win = _window(run.states.shape[0], discard, fit)
    R = run.states[win]
    target = g[win]
    if not _pstd(target) > 0:
        raise DegenerateTargetError("target has zero standard deviation")
    if use_bias:
        R_aug = np.hstack([R, np.ones((R.shape[0], 1))])
        coef = ridge_solve(R_aug, target, lambda_rel)
        model = ReadoutModel(c=coef[:-1], lambda_rel=lambda_rel, discard=discard,
                             fit=R.shape[0], bias=float(coef[-1]), use_bias=True)
    else:
        model = ReadoutModel(c=ridge_solve(R, target, lambda_rel), lambda_rel=lambda_rel,
                             discard=discard, fit=R.shape[0])
    return model, normalized_error(target, model.predict(R))


def evaluate_readout(model: ReadoutModel, run_test: ReservoirRun, g_test) -> float:
    """Testing error on the same window layout as training; ``inf`` if the run diverged."""
    if not run_test.stable:
        return float("inf")
    g_test = np.asarray(g_test, dtype=float).ravel()
    win = _window(run_test.states.shape[0], model.discard, model.fit)
    return normalized_error(g_test[win], model.predict(run_test.states[win]))
