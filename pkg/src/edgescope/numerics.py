"""Deterministic low-level kernels: seeded RNG, RK4, FFT magnitudes, ridge
regression and spectral-radius estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import (
    DegenerateMatrixError,
    InvalidInputError,
    RankDeficiencyError,
    TooShortError,
)

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> tuple[int, int]:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Rng:
    """xoshiro256** generator seeded through splitmix64.

    The stream depends only on the integer seed, so results are reproducible
    across platforms and numpy versions.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo 2**64.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _MASK64
        sm = self.seed
        state = []
        for _ in range(4):
            sm, out = _splitmix64(sm)
            state.append(out)
        self._s = state

    def __repr__(self):
        return f"Rng(seed={self.seed})"

    def copy(self) -> "Rng":
        other = Rng.__new__(Rng)
        other.seed = self.seed
        other._s = list(self._s)
        return other

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self, size: int | None = None):
        """Uniform doubles in [0, 1) built from the top 53 bits."""
        if size is None:
            return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
        out = np.empty(int(size))
        for i in range(out.size):
            out[i] = (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
        return out

    def uniform(self, lo: float, hi: float, size: int | None = None):
        u = self.random(size)
        x = lo + (hi - lo) * u
        # lo + (hi-lo)*u can round up to hi for u just below 1
        if size is None:
            return x if x < hi else np.nextafter(hi, lo)
        return np.where(x < hi, x, np.nextafter(hi, lo))

    def integers(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (unbiased)."""
        if n <= 0:
            raise InvalidInputError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of range(n)."""
        perm = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.integers(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def choice(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n), in draw order."""
        if k > n:
            raise InvalidInputError(f"cannot draw {k} distinct values from {n}")
        pool = np.arange(n)
        for i in range(k):
            j = i + self.integers(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k].copy()

    def substream(self, key: int) -> "Rng":
        """Independent generator derived from this seed and an integer key."""
        _, mixed = _splitmix64(self.seed ^ ((int(key) * 0xD1B54A32D192ED03) & _MASK64))
        return Rng(mixed)


def uniform_matrix(rng: Rng, rows: int, cols: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Matrix of i.i.d. uniform [lo, hi) draws filled in row-major order."""
    if rows < 1 or cols < 1:
        raise InvalidInputError("rows and cols must be >= 1")
    if not lo < hi:
        raise InvalidInputError("require lo < hi")
    return rng.uniform(lo, hi, rows * cols).reshape(rows, cols)


def _check_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    return A


def spectral_radius(A, n_squarings: int = 16) -> float:
    """Largest eigenvalue modulus via normalized repeated squaring.

    Uses Gelfand's formula ``rho = lim ||A^k||^(1/k)`` with ``k = 2**n``. The
    matrix is renormalized after every squaring and the log-scales are
    accumulated, so nothing overflows.
    """
    A = _check_square(A)
    B = A.copy()
    log_rho = 0.0
    weight = 1.0
    for _ in range(n_squarings):
        nrm = np.linalg.norm(B)
        if nrm == 0.0:
            return 0.0
        B /= nrm
        log_rho += weight * np.log(nrm)
        weight *= 0.5
        B = B @ B
    nrm = np.linalg.norm(B)
    if nrm == 0.0:
        return 0.0
    log_rho += weight * np.log(nrm)
    return float(np.exp(log_rho))


def rescale_to_radius(A, sigma_target: float) -> np.ndarray:
    """Return ``A * sigma_target / rho(A)``."""
    if not sigma_target > 0:
        raise InvalidInputError("sigma_target must be positive")
    A = _check_square(A)
    rho = spectral_radius(A)
    if rho == 0.0 or not np.isfinite(rho):
        raise DegenerateMatrixError("matrix has zero spectral radius")
    return A * (sigma_target / rho)


def ridge_solve(R, g, lambda_rel: float = 1e-8) -> np.ndarray:
    """Minimize ``||R c - g||^2 + lam ||c||^2`` with ``lam = lambda_rel * tr(R^T R) / M``.

    Solved through the normal equations with a Cholesky factorization.
    """
    R = np.asarray(R, dtype=float)
    g = np.asarray(g, dtype=float).ravel()
    if R.ndim != 2:
        raise InvalidInputError("R must be 2-D")
    T, M = R.shape
    if g.shape[0] != T:
        raise InvalidInputError(f"g has length {g.shape[0]}, expected {T}")
    if T < M:
        raise InvalidInputError(f"need at least as many rows as columns (T={T}, M={M})")
    if lambda_rel < 0:
        raise InvalidInputError("lambda_rel must be >= 0")
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(g))):
        raise InvalidInputError("R and g must be finite")
    gram = R.T @ R
    lam = lambda_rel * np.trace(gram) / M
    gram[np.diag_indices_from(gram)] += lam
    try:
        factor = cho_factor(gram, lower=False, check_finite=False)
    except LinAlgError as exc:
        raise RankDeficiencyError(
            "normal equations are not positive definite; use lambda_rel > 0"
        ) from exc
    if lam == 0.0:
        diag = np.abs(np.diag(factor[0]))
        if diag.min() ** 2 <= M * np.finfo(float).eps * diag.max() ** 2:
            raise RankDeficiencyError("normal equations are numerically singular; use lambda_rel > 0")
    return cho_solve(factor, R.T @ g, check_finite=False)


@dataclass(frozen=True)
class SpectrumMag:
    """One-sided magnitude spectrum on normalized frequencies in [0, 0.5]."""

    freqs: np.ndarray
    mags: np.ndarray

    @property
    def n_f(self) -> int:
        return int(self.freqs.size)


def fft_magnitude(x) -> SpectrumMag:
    """Mean-removed one-sided FFT magnitude of ``x`` truncated to a power of two."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 8:
        raise TooShortError(f"need at least 8 samples, got {x.size}")
    n = 1 << (int(x.size).bit_length() - 1)
    x = x[:n] - x[:n].mean()
    mags = np.abs(np.fft.rfft(x))
    freqs = np.arange(n // 2 + 1) / n
    return SpectrumMag(freqs=freqs, mags=mags)


def rk4_step(f: Callable[[np.ndarray, float], np.ndarray], state, t: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``dx/dt = f(x, t)``."""
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    x = np.asarray(state, dtype=float)
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
