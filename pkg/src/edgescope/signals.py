"""Driver systems (Lorenz flow, 3-D piecewise-linear map) and input normalization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConstantSignalError, DriverDivergenceError, InvalidInputError
from .numerics import Rng, rk4_step

LORENZ_DEFAULTS = dict(c1=10.0, c2=28.0, c3=8.0 / 3.0, dt=0.02)
MAP3D_MATRIX = np.array([[1.1, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass
class DriverTrajectory:
    """Full driver state plus the normalized input and raw training signal.

    ``input`` is ``(states[:, input_index] - input_shift) / input_scale``.
    """

    states: np.ndarray
    dt: float
    input_index: int
    target_index: int
    input: np.ndarray
    target: np.ndarray
    input_shift: float
    input_scale: float
    name: str = "driver"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.states.shape[0]

    def segment(self, start: int, stop: int, reuse_normalization: bool = False) -> "DriverTrajectory":
        """Rows ``[start, stop)``.

        By default the input is renormalized on that window. With
        ``reuse_normalization`` the parent's affine map is applied instead,
        which is what a continuation (test) segment needs: the readout was
        fitted against that exact transform of the driver.
        """
        states = self.states[start:stop]
        if reuse_normalization:
            shift, scale = self.input_shift, self.input_scale
            s = (states[:, self.input_index] - shift) / scale
        else:
            s, shift, scale = _standardize(states[:, self.input_index])
        return DriverTrajectory(
            states=states,
            dt=self.dt,
            input_index=self.input_index,
            target_index=self.target_index,
            input=s,
            target=self.target[start:stop],
            input_shift=shift,
            input_scale=scale,
            name=self.name,
            meta=dict(self.meta),
        )

    def split(self, n_train: int) -> tuple["DriverTrajectory", "DriverTrajectory"]:
        """Training rows ``[0, n_train)`` and the continuation after them.

        The input of both parts uses the affine map fitted on the training
        rows, so the test input is exactly what the trained readout expects.
        """
        if not 0 < n_train < len(self):
            raise InvalidInputError(f"n_train must be in (0, {len(self)})")
        train = self.segment(0, n_train)
        states = self.states[n_train:]
        test = replace(
            train,
            states=states,
            input=(states[:, self.input_index] - train.input_shift) / train.input_scale,
            target=self.target[n_train:],
            meta=dict(self.meta),
        )
        return train, test

    def to_csv(self, path) -> Path:
        path = Path(path)
        t = np.arange(len(self)) * self.dt
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x1", "x2", "x3", "s", "g"])
            for i in range(len(self)):
                row = [t[i], *self.states[i], self.input[i], self.target[i]]
                writer.writerow([repr(float(v)) for v in row])
        return path


def affine_normalization(raw) -> tuple[float, float]:
    """(mean, population std) of ``raw``."""
    raw = np.asarray(raw, dtype=float)
    mean = float(raw.mean())
    std = float(np.sqrt(np.mean((raw - mean) ** 2)))
    if not std > 0 or not np.isfinite(std):
        raise ConstantSignalError("signal has zero standard deviation")
    return mean, std


def _standardize(raw):
    raw = np.asarray(raw, dtype=float)
    shift, scale = affine_normalization(raw)
    out = (raw - shift) / scale
    # second pass removes the O(eps * |mean|/std) residue of the first
    resid = out.mean()
    return out - resid, shift + resid * scale, scale


def normalize_input(raw) -> np.ndarray:
    """Shift to zero mean and scale to unit (population) standard deviation."""
    return _standardize(raw)[0]


def lorenz_field(x, c1=10.0, c2=28.0, c3=8.0 / 3.0) -> np.ndarray:
    return np.array([c1 * (x[1] - x[0]), x[0] * (c2 - x[2]) - x[1], x[0] * x[1] - c3 * x[2]])


def lorenz_jacobian(x, c1=10.0, c2=28.0, c3=8.0 / 3.0) -> np.ndarray:
    return np.array(
        [
            [-c1, c1, 0.0],
            [c2 - x[2], -1.0, -x[0]],
            [x[1], x[0], -c3],
        ]
    )


def map3d_step(x) -> np.ndarray:
    y = np.array([np.mod(x[0], 1.0), x[1], x[2]])
    return MAP3D_MATRIX @ y


def map3d_jacobian(x=None) -> np.ndarray:
    # mod(., 1) has unit slope away from its jumps
    return MAP3D_MATRIX.copy()


def _package(states, dt, input_index, target_index, name, normalize_target, meta):
    s, shift, scale = _standardize(states[:, input_index])
    g = states[:, target_index].copy()
    if normalize_target:
        g = normalize_input(g)
    return DriverTrajectory(
        states=states,
        dt=dt,
        input_index=input_index,
        target_index=target_index,
        input=s,
        target=g,
        input_shift=shift,
        input_scale=scale,
        name=name,
        meta=meta,
    )


def lorenz_trajectory(
    n_steps: int,
    transient: int = 5000,
    seed: int | Rng = 0,
    c1: float = 10.0,
    c2: float = 28.0,
    c3: float = 8.0 / 3.0,
    dt: float = 0.02,
    normalize_target: bool = False,
    x0=None,
) -> DriverTrajectory:
    """Integrate the Lorenz system by RK4; input is x, target is z.

    Starts at (1, 1, 1) plus a seeded perturbation in [-0.1, 0.1)^3 unless
    ``x0`` is given, and discards ``transient`` steps.
    """
    if n_steps < 2000:
        raise InvalidInputError("n_steps must be >= 2000")
    if transient < 0:
        raise InvalidInputError("transient must be >= 0")
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    if x0 is None:
        x = np.ones(3) + rng.uniform(-0.1, 0.1, 3)
    else:
        x = np.asarray(x0, dtype=float).copy()

    def f(v, _t):
        return lorenz_field(v, c1, c2, c3)

    for _ in range(transient):
        x = rk4_step(f, x, 0.0, dt)
    states = np.empty((n_steps, 3))
    for i in range(n_steps):
        states[i] = x
        x = rk4_step(f, x, 0.0, dt)
    if not np.all(np.isfinite(states)):
        raise DriverDivergenceError("Lorenz trajectory became non-finite")
    meta = dict(system="lorenz", c1=c1, c2=c2, c3=c3, transient=transient)
    return _package(states, dt, 0, 2, "lorenz", normalize_target, meta)


def map3d_trajectory(
    n_steps: int,
    transient: int = 1000,
    seed: int | Rng = 0,
    normalize_target: bool = False,
    x0=None,
) -> DriverTrajectory:
    """Iterate the 3-D map ``x(n+1) = M y(n)``, ``y = (x1 mod 1, x2, x3)``.

    Input is x1, target is x3. Starts at a seeded uniform point in (0, 1)^3.
    """
    if n_steps < 2000:
        raise InvalidInputError("n_steps must be >= 2000")
    if transient < 0:
        raise InvalidInputError("transient must be >= 0")
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    x = rng.uniform(0.0, 1.0, 3) if x0 is None else np.asarray(x0, dtype=float).copy()
    for _ in range(transient):
        x = map3d_step(x)
    states = np.empty((n_steps, 3))
    for i in range(n_steps):
        states[i] = x
        x = map3d_step(x)
    meta = dict(system="map3d", transient=transient)
    return _package(states, 1.0, 0, 2, "map3d", normalize_target, meta)


def driver_trajectory(name: str, n_steps: int, seed: int | Rng = 0, **kwargs) -> DriverTrajectory:
    if name == "lorenz":
        return lorenz_trajectory(n_steps, seed=seed, **kwargs)
    if name == "map3d":
        return map3d_trajectory(n_steps, seed=seed, **kwargs)
    raise InvalidInputError(f"unknown driver {name!r}")
