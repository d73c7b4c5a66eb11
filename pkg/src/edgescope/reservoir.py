"""Random network construction and the polynomial ODE / map reservoirs."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DegenerateMatrixError, InvalidInputError
from .numerics import Rng, rescale_to_radius, spectral_radius

ODE = "ode"
MAP = "map"
DEFAULT_THRESHOLD = 1e6


@dataclass(frozen=True)
class NetworkSpec:
    """Coupling matrix ``A`` (rescaled to radius ``sigma``) and input vector ``W``.

    ``structure`` keeps the unscaled draw so that changing ``sigma`` only
    changes the overall scale of ``A``.
    """

    M: int
    A: np.ndarray
    W: np.ndarray
    sigma: float
    seed: int
    density: float
    structure: np.ndarray = field(repr=False)

    def with_sigma(self, sigma: float) -> "NetworkSpec":
        return replace(self, A=rescale_to_radius(self.structure, sigma), sigma=float(sigma))


@dataclass(frozen=True)
class ReservoirParams:
    kind: str
    p1: float
    p2: float
    p3: float
    alpha: float
    dt: float = 0.02

    def __post_init__(self):
        if self.kind not in (ODE, MAP):
            raise InvalidInputError(f"kind must be 'ode' or 'map', got {self.kind!r}")
        vals = (self.p1, self.p2, self.p3, self.alpha, self.dt)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInputError("reservoir parameters must be finite")
        if self.kind == ODE and not self.dt > 0:
            raise InvalidInputError("dt must be positive")

    @property
    def time_step(self) -> float:
        """Physical duration of one sample: dt for flows, 1 for maps."""
        return self.dt if self.kind == ODE else 1.0

    def with_value(self, name: str, value: float) -> "ReservoirParams":
        return replace(self, **{name: float(value)})


@dataclass
class ReservoirRun:
    """Node trajectories ``states[n] = r(n)`` with ``states[0] = r0``.

    Row ``n + 1`` is produced from row ``n`` with input ``s[n]`` held, so row n
    pairs with sample n of the training signal. Truncated at the first row
    that leaves the threshold if the run diverged.
    """

    states: np.ndarray
    stable: bool
    divergence_step: int | None
    input_used: np.ndarray = field(repr=False)
    r0: np.ndarray = field(repr=False)
    threshold: float = DEFAULT_THRESHOLD

    @property
    def step_starts(self) -> np.ndarray:
        """State at which step n (driven by ``input_used[n]``) begins."""
        return self.states

    def to_csv(self, path, dt: float = 1.0, n_nodes: int | None = 10) -> Path:
        path = Path(path)
        cols = self.states.shape[1] if n_nodes is None else min(n_nodes, self.states.shape[1])
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"r_{i + 1}" for i in range(cols)])
            for n, row in enumerate(self.states):
                writer.writerow([repr(n * dt)] + [repr(float(v)) for v in row[:cols]])
        return path


def build_network(seed: int, M: int = 100, sigma: float = 1.0, density: float = 0.5) -> NetworkSpec:
    """Half-density random coupling matrix with zero diagonal, rescaled to ``sigma``.

    ``floor(density * M**2)`` positions are drawn from all M*M entries (the
    diagonal included) and filled uniform in [-1, 1); the diagonal is then
    zeroed. ``W`` is uniform in [-1, 1).
    """
    if M < 2:
        raise InvalidInputError("M must be >= 2")
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    if not 0 < density <= 1:
        raise InvalidInputError("density must be in (0, 1]")
    base = Rng(seed)
    for attempt in range(64):
        rng = base if attempt == 0 else base.substream(attempt)
        n_sel = int(np.floor(density * M * M))
        idx = rng.choice(M * M, n_sel)
        vals = rng.uniform(-1.0, 1.0, n_sel)
        structure = np.zeros(M * M)
        structure[idx] = vals
        structure = structure.reshape(M, M)
        np.fill_diagonal(structure, 0.0)
        W = rng.uniform(-1.0, 1.0, M)
        if spectral_radius(structure) > 0:
            break
    else:
        raise DegenerateMatrixError("could not draw a matrix with nonzero spectral radius")
    A = rescale_to_radius(structure, sigma)
    return NetworkSpec(M=M, A=A, W=W, sigma=float(sigma), seed=int(seed), density=density, structure=structure)


def detect_divergence(states, threshold: float = DEFAULT_THRESHOLD) -> tuple[bool, int | None]:
    """(stable, first offending row) for a state array of shape (T, M) or (T,)."""
    states = np.asarray(states, dtype=float)
    if states.size == 0:
        return True, None
    rows = states.reshape(states.shape[0], -1)
    bad = ~np.isfinite(rows) | (np.abs(rows) > threshold)
    hit = np.flatnonzero(bad.any(axis=1))
    if hit.size == 0:
        return True, None
    return False, int(hit[0])


def _prepare(net: NetworkSpec, s, r0):
    s = np.ascontiguousarray(np.asarray(s, dtype=float).ravel())
    if r0 is None:
        r0 = np.zeros(net.M)
    r0 = np.ascontiguousarray(np.asarray(r0, dtype=float).ravel())
    if r0.shape[0] != net.M:
        raise InvalidInputError(f"r0 has length {r0.shape[0]}, expected {net.M}")
    return np.ascontiguousarray(net.A), np.ascontiguousarray(net.W), s, r0


def run_ode_reservoir(net: NetworkSpec, params: ReservoirParams, s, r0=None,
                      threshold: float = DEFAULT_THRESHOLD) -> ReservoirRun:
    """Integrate ``dr/dt = alpha [p1 r + p2 r^2 + p3 r^3 + A r + W s]`` by RK4.

    ``s`` is held constant within each step. The run stops at the first step
    whose state leaves ``[-threshold, threshold]`` or turns non-finite.
    """
    if params.kind != ODE:
        raise InvalidInputError("run_ode_reservoir needs kind='ode'")
    A, W, s, r0 = _prepare(net, s, r0)
    states, n_ok = _kernels.ode_run(A, W, params.p1, params.p2, params.p3, params.alpha,
                                    params.dt, s, r0, threshold)
    stable = n_ok == s.shape[0]
    return ReservoirRun(states=states, stable=stable, divergence_step=None if stable else int(n_ok),
                        input_used=s, r0=r0, threshold=threshold)


def run_map_reservoir(net: NetworkSpec, params: ReservoirParams, s, r0=None,
                      threshold: float = DEFAULT_THRESHOLD) -> ReservoirRun:
    """Iterate ``r(n+1) = alpha (p1 r + p2 r^2 + p3 r^3 + A r + W s(n))``."""
    if params.kind != MAP:
        raise InvalidInputError("run_map_reservoir needs kind='map'")
    A, W, s, r0 = _prepare(net, s, r0)
    states, n_ok = _kernels.map_run(A, W, params.p1, params.p2, params.p3, params.alpha,
                                    s, r0, threshold)
    stable = n_ok == s.shape[0]
    return ReservoirRun(states=states, stable=stable, divergence_step=None if stable else int(n_ok),
                        input_used=s, r0=r0, threshold=threshold)


def run_reservoir(net: NetworkSpec, params: ReservoirParams, s, r0=None,
                  threshold: float = DEFAULT_THRESHOLD) -> ReservoirRun:
    runner = run_ode_reservoir if params.kind == ODE else run_map_reservoir
    return runner(net, params, s, r0=r0, threshold=threshold)


def one_step_jacobian(net: NetworkSpec, params: ReservoirParams, r, s_value: float = 0.0) -> np.ndarray:
    """``alpha * (diag(p1 + 2 p2 r + 3 p3 r^2) + A)``.

    For maps this is the one-step Jacobian; for flows it is the Jacobian of
    the vector field (the input term has no state dependence).
    """
    r = np.asarray(r, dtype=float)
    slopes = params.p1 + 2.0 * params.p2 * r + 3.0 * params.p3 * r * r
    return params.alpha * (np.diag(slopes) + net.A)


def reservoir_field(net: NetworkSpec, params: ReservoirParams, r, s_value: float) -> np.ndarray:
    """Right-hand side of the ODE, or the map update."""
    r = np.asarray(r, dtype=float)
    return params.alpha * (params.p1 * r + params.p2 * r**2 + params.p3 * r**3
                           + net.A @ r + net.W * s_value)


def step_propagator(net: NetworkSpec, params: ReservoirParams, r, s_value: float) -> np.ndarray:
    """Full M x M tangent propagator of one sample step (variational RK4 for flows)."""
    r = np.ascontiguousarray(np.asarray(r, dtype=float))
    if params.kind == MAP:
        return one_step_jacobian(net, params, r, s_value)
    d = _kernels.ode_stage_slopes(np.ascontiguousarray(net.A), np.ascontiguousarray(net.W),
                                  params.p1, params.p2, params.p3, params.alpha, params.dt,
                                  r, float(s_value))
    return _kernels.ode_tangent(np.ascontiguousarray(net.A), params.alpha, params.dt, d, np.eye(net.M))
