"""Gram-Schmidt Lyapunov spectra, one-step local exponents and the
Kaplan-Yorke dimension."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import DiagnosticsUnavailableError, InvalidInputError
from ..numerics import Rng
from ..reservoir import MAP, NetworkSpec, ReservoirParams, ReservoirRun
from ..signals import lorenz_field, lorenz_jacobian, map3d_jacobian

DEFAULT_SKIP = 1000
POWER_ITERATIONS = 20
POWER_TOL = 1e-8


@dataclass
class LyapunovReport:
    exponents: np.ndarray
    max_local: float
    d_ky: float
    j: int
    saturated: bool = False


class TangentSystem:
    """Tangent dynamics along a recorded trajectory.

    Subclasses implement :meth:`propagate`, the one-step tangent propagator
    applied to the columns of ``V`` for the step that starts at state ``x``
    with input ``s``. ``time_step`` converts per-step logs into rates.
    """

    time_step = 1.0
    dim: int

    def propagate(self, x, s, V) -> np.ndarray:
        raise NotImplementedError

    def propagator(self, x, s) -> np.ndarray:
        return self.propagate(x, s, np.eye(self.dim))


class LorenzSystem(TangentSystem):
    """Lorenz flow sampled by RK4; tangent vectors follow variational RK4."""

    dim = 3

    def __init__(self, c1=10.0, c2=28.0, c3=8.0 / 3.0, dt=0.02):
        self.c = (c1, c2, c3)
        self.time_step = dt

    def propagate(self, x, s, V):
        dt = self.time_step
        c = self.c
        h = 0.5 * dt
        k1 = lorenz_field(x, *c)
        x2 = x + h * k1
        k2 = lorenz_field(x2, *c)
        x3 = x + h * k2
        k3 = lorenz_field(x3, *c)
        x4 = x + dt * k3
        K1 = lorenz_jacobian(x, *c) @ V
        K2 = lorenz_jacobian(x2, *c) @ (V + h * K1)
        K3 = lorenz_jacobian(x3, *c) @ (V + h * K2)
        K4 = lorenz_jacobian(x4, *c) @ (V + dt * K3)
        return V + (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


class Map3dSystem(TangentSystem):
    dim = 3

    def propagate(self, x, s, V):
        return map3d_jacobian(x) @ V


class LinearMapSystem(TangentSystem):
    """Time-varying linear map; ``matrices[n]`` acts at step n (cycled)."""

    def __init__(self, matrices):
        self.matrices = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
        self.dim = self.matrices[0].shape[0]

    def propagate(self, x, s, V):
        return self.matrices[int(x) % len(self.matrices)] @ V


class ReservoirSystem(TangentSystem):
    """Conditional (input held fixed) tangent dynamics of a reservoir."""

    def __init__(self, net: NetworkSpec, params: ReservoirParams):
        self.net = net
        self.params = params
        self.dim = net.M
        self.time_step = params.time_step
        self._A = np.ascontiguousarray(net.A)
        self._W = np.ascontiguousarray(net.W)

    def propagate(self, x, s, V):
        p = self.params
        V = np.ascontiguousarray(np.asarray(V, dtype=float))
        x = np.ascontiguousarray(np.asarray(x, dtype=float))
        if p.kind == MAP:
            d = p.p1 + 2.0 * p.p2 * x + 3.0 * p.p3 * x * x
            return p.alpha * (d[:, None] * V + self._A @ V)
        d = _kernels.ode_stage_slopes(self._A, self._W, p.p1, p.p2, p.p3, p.alpha, p.dt, x, float(s))
        return _kernels.ode_tangent(self._A, p.alpha, p.dt, d, V)


def _initial_frame(dim: int, k: int, seed: int) -> np.ndarray:
    rng = Rng(seed)
    V = rng.uniform(-1.0, 1.0, dim * k).reshape(dim, k)
    Q, _ = _kernels.gram_schmidt(V)
    return np.ascontiguousarray(Q)


def _inputs(starts, s):
    if s is None or len(s) == 0:
        return np.zeros(starts.shape[0])
    s = np.asarray(s, dtype=float).ravel()
    if s.shape[0] < starts.shape[0]:
        raise InvalidInputError("input shorter than trajectory")
    return s


def _power_sigma(P: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
    prev = -1.0
    sig = 0.0
    for _ in range(POWER_ITERATIONS):
        w = P @ v
        u = P.T @ w
        sig = float(np.linalg.norm(w))
        un = np.linalg.norm(u)
        if un == 0.0:
            break
        v = u / un
        if prev > 0 and abs(sig - prev) <= POWER_TOL * sig:
            break
        prev = sig
    return max(sig, float(np.linalg.norm(P @ v))), v


def _sweep(system: TangentSystem, starts, s, k, skip, seed, want_local):
    starts = np.asarray(starts, dtype=float)
    if starts.ndim == 1:
        starts = starts[:, None]
    T = starts.shape[0]
    if T <= skip:
        raise InvalidInputError(f"trajectory of {T} steps is not longer than the {skip}-step skip")
    s = _inputs(starts, s)
    k = min(k, system.dim)
    Q = _initial_frame(system.dim, k, seed)
    if isinstance(system, ReservoirSystem):
        p = system.params
        log_sums, max_local, n_acc = _kernels.reservoir_lyapunov(
            system._A, p.p1, p.p2, p.p3, p.alpha, p.dt, p.kind != MAP, system._W,
            np.ascontiguousarray(starts), np.ascontiguousarray(s), Q, skip,
            POWER_ITERATIONS if want_local else 0, POWER_TOL,
        )
        return log_sums, max_local, n_acc
    log_sums = np.zeros(k)
    max_local = -np.inf
    v = Q[:, 0].copy()
    n_acc = 0
    for n in range(T):
        x = starts[n] if not isinstance(system, LinearMapSystem) else n
        V = system.propagate(x, s[n], Q)
        Q, norms = _kernels.gram_schmidt(np.ascontiguousarray(V, dtype=float))
        if n < skip:
            continue
        n_acc += 1
        log_sums += np.log(norms)
        if want_local:
            sig, v = _power_sigma(system.propagator(x, s[n]), v)
            if sig > 0:
                max_local = max(max_local, float(np.log(sig)))
    return log_sums, max_local, n_acc


def lyapunov_spectrum(system: TangentSystem, starts, s=None, k: int = 4,
                      skip: int = DEFAULT_SKIP, seed: int = 0) -> np.ndarray:
    """Largest ``k`` Lyapunov exponents, sorted descending.

    ``starts[n]`` is the state at which step ``n`` begins and ``s[n]`` the input
    held during it. Tangent vectors are re-orthonormalized by modified
    Gram-Schmidt after every step; the first ``skip`` steps only align them.
    Rates are per unit time for flows and per iterate for maps.
    """
    log_sums, _, n_acc = _sweep(system, starts, s, k, skip, seed, want_local=False)
    return np.sort(log_sums / (n_acc * system.time_step))[::-1]


def max_local_lyapunov(system: TangentSystem, starts, s=None, skip: int = DEFAULT_SKIP,
                       seed: int = 0) -> float:
    """Maximum over steps of ``ln(largest singular value of the step propagator) / dt``."""
    _, max_local, _ = _sweep(system, starts, s, 1, skip, seed, want_local=True)
    return float(max_local / system.time_step)


def kaplan_yorke(exponents) -> tuple[float, int]:
    """Kaplan-Yorke dimension and index ``j`` for exponents sorted descending.

    ``j`` is the largest count whose partial sum is positive. Zero when the
    leading exponent is not positive; equals ``len(exponents)`` when every
    partial sum is positive (see :func:`kaplan_yorke_saturated`).
    """
    lam = np.asarray(exponents, dtype=float).ravel()
    if lam.size == 0:
        raise InvalidInputError("need at least one exponent")
    if np.any(np.diff(lam) > 1e-12 * np.max(np.abs(lam))):
        raise InvalidInputError("exponents must be sorted in descending order")
    csum = np.cumsum(lam)
    positive = np.flatnonzero(csum > 0)
    if lam[0] <= 0 or positive.size == 0:
        return 0.0, 0
    j = int(positive[-1]) + 1
    if j == lam.size:
        return float(lam.size), j
    return float(j + csum[j - 1] / abs(lam[j])), j


def kaplan_yorke_saturated(exponents) -> bool:
    lam = np.asarray(exponents, dtype=float)
    return bool(lam.size and np.all(np.cumsum(lam) > 0))


def reservoir_lyapunov_report(net: NetworkSpec, params: ReservoirParams, run: ReservoirRun,
                              k: int = 4, skip: int = DEFAULT_SKIP, seed: int = 0,
                              max_local: bool = True) -> LyapunovReport:
    """Spectrum, max local exponent and D_KY for a stable reservoir run in one pass.

    The local exponent costs a power iteration per step; with ``max_local``
    off it is reported as ``nan``.
    """
    if not run.stable:
        raise DiagnosticsUnavailableError("reservoir run diverged; no Lyapunov spectrum")
    system = ReservoirSystem(net, params)
    log_sums, local, n_acc = _sweep(system, run.step_starts, run.input_used, k, skip, seed,
                                    want_local=max_local)
    exps = np.sort(log_sums / (n_acc * system.time_step))[::-1]
    d_ky, j = kaplan_yorke(exps)
    local = float(local / system.time_step) if max_local else float("nan")
    return LyapunovReport(exponents=exps, max_local=local,
                          d_ky=d_ky, j=j, saturated=kaplan_yorke_saturated(exps))
