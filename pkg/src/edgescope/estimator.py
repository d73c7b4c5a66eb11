"""scikit-learn style wrapper: a polynomial reservoir with a ridge readout."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .errors import CannotTrainError, InvalidInputError
from .readout import DISCARD, normalized_error, train_readout
from .reservoir import DEFAULT_THRESHOLD, ODE, ReservoirParams, build_network, run_reservoir
from .signals import affine_normalization


class PolynomialReservoirRegressor(TransformerMixin, RegressorMixin, BaseEstimator):
    """Drive a polynomial reservoir with a scalar series and fit a linear readout.

    ``X`` is the input series as an ``(n_samples, 1)`` array (rows are time
    steps) and ``y`` the training signal. ``fit`` learns the affine input
    normalization, runs the reservoir from ``r = 0`` and ridge-fits the
    readout on rows ``[discard, n_samples)``. ``transform`` returns the node
    trajectories for a new series under the stored normalization, and
    ``predict`` applies the readout to them.

    Parameters
    ----------
    kind : {"ode", "map"}
        Reservoir update rule.
    p1, p2, p3, alpha : float
        Polynomial coefficients and time scale.
    sigma : float
        Spectral radius of the coupling matrix.
    n_nodes : int
        Reservoir size M.
    density : float
        Fraction of nonzero couplings drawn before zeroing the diagonal.
    dt : float
        RK4 step for ODE reservoirs.
    lambda_rel : float
        Ridge parameter relative to ``tr(R^T R) / M``.
    discard : int
        Leading rows excluded from the fit (and from :meth:`score`).
    threshold : float
        Divergence threshold on ``|r_i|``.
    use_bias : bool
        Add an intercept column to the readout.
    random_state : int
        Network seed.
    """

    def __init__(self, kind=ODE, p1=-3.0, p2=0.0, p3=0.0, alpha=1.0, sigma=1.0, n_nodes=100,
                 density=0.5, dt=0.02, lambda_rel=1e-8, discard=DISCARD, threshold=DEFAULT_THRESHOLD,
                 use_bias=False, random_state=0):
        self.kind = kind
        self.p1 = p1
        self.p2 = p2
        self.p3 = p3
        self.alpha = alpha
        self.sigma = sigma
        self.n_nodes = n_nodes
        self.density = density
        self.dt = dt
        self.lambda_rel = lambda_rel
        self.discard = discard
        self.threshold = threshold
        self.use_bias = use_bias
        self.random_state = random_state

    def _series(self, X) -> np.ndarray:
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise InvalidInputError(f"expected a single input column, got {X.shape[1]}")
            X = X[:, 0]
        return X

    def _params(self) -> ReservoirParams:
        return ReservoirParams(self.kind, self.p1, self.p2, self.p3, self.alpha, self.dt)

    def _run(self, X):
        s = (self._series(X) - self.input_shift_) / self.input_scale_
        return run_reservoir(self.network_, self.params_, s, threshold=self.threshold)

    def fit(self, X, y):
        x = self._series(X)
        y = column_or_1d(check_array(y, ensure_2d=False, dtype=float))
        if x.shape[0] != y.shape[0]:
            raise InvalidInputError("X and y have different lengths")
        if x.shape[0] <= self.discard + self.n_nodes:
            raise InvalidInputError("series too short for the discard window and node count")
        self.input_shift_, self.input_scale_ = affine_normalization(x)
        self.params_ = self._params()
        self.network_ = build_network(self.random_state, self.n_nodes, self.sigma, self.density)
        run = self._run(X)
        if not run.stable:
            raise CannotTrainError(f"reservoir diverged at step {run.divergence_step}")
        self.readout_, self.training_error_ = train_readout(run, y, self.lambda_rel, self.discard, None,
                                                            self.use_bias)
        self.n_features_in_ = 1
        return self

    def transform(self, X) -> np.ndarray:
        """Node trajectories ``(n_samples, n_nodes)``; rows after a divergence are absent."""
        check_is_fitted(self, "readout_")
        return self._run(X).states

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "readout_")
        run = self._run(X)
        if not run.stable:
            raise CannotTrainError(f"reservoir diverged at step {run.divergence_step}")
        return self.readout_.predict(run.states)

    def normalized_error(self, X, y) -> float:
        """``std(y - h) / std(y)`` after the discard window (the testing error when X is unseen)."""
        y = column_or_1d(check_array(y, ensure_2d=False, dtype=float))
        h = self.predict(X)
        return normalized_error(y[self.discard:], h[self.discard:])
