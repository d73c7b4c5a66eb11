import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgescope.errors import DegenerateMatrixError, InvalidInputError, RankDeficiencyError, TooShortError
from edgescope.numerics import (
    Rng,
    fft_magnitude,
    rescale_to_radius,
    ridge_solve,
    rk4_step,
    spectral_radius,
    uniform_matrix,
)


def gauss_solve(A, b):
    """Plain Gaussian elimination with partial pivoting; oracle for the ridge solver."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = len(b)
    for k in range(n):
        p = k + np.argmax(np.abs(A[k:, k]))
        A[[k, p]] = A[[p, k]]
        b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            f = A[i, k] / A[k, k]
            A[i, k:] -= f * A[k, k:]
            b[i] -= f * b[k]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - A[i, i + 1:] @ x[i + 1:]) / A[i, i]
    return x


class TestRng:
    def test_same_seed_same_stream(self):
        assert np.array_equal(Rng(42).random(50), Rng(42).random(50))

    def test_different_seeds_differ(self):
        assert not np.array_equal(Rng(1).random(10), Rng(2).random(10))

    def test_uniform_stays_in_half_open_interval(self):
        x = Rng(3).uniform(-1.0, 1.0, 5000)
        assert x.min() >= -1.0 and x.max() < 1.0
        assert abs(x.mean()) < 0.05

    def test_choice_is_distinct(self):
        idx = Rng(5).choice(100, 60)
        assert len(set(idx.tolist())) == 60
        assert idx.min() >= 0 and idx.max() < 100

    def test_choice_too_many(self):
        with pytest.raises(InvalidInputError):
            Rng(0).choice(3, 4)

    def test_permutation(self):
        assert sorted(Rng(9).permutation(20).tolist()) == list(range(20))

    def test_substreams_independent_and_reproducible(self):
        a = Rng(7).substream(1).random(5)
        assert np.array_equal(a, Rng(7).substream(1).random(5))
        assert not np.array_equal(a, Rng(7).substream(2).random(5))

    def test_copy_continues_identically(self):
        r = Rng(11)
        r.random(3)
        c = r.copy()
        assert r.next_u64() == c.next_u64()

    def test_uniform_matrix_row_major(self):
        m = uniform_matrix(Rng(4), 2, 3)
        assert np.array_equal(m.ravel(), Rng(4).uniform(-1.0, 1.0, 6))


class TestSpectralRadius:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 40))
    def test_matches_eigenvalues(self, seed, n):
        A = np.random.default_rng(seed).uniform(-1, 1, (n, n))
        oracle = np.max(np.abs(np.linalg.eigvals(A)))
        assert spectral_radius(A) == pytest.approx(oracle, rel=1e-3)

    def test_network_sized_matrix(self):
        A = np.random.default_rng(0).uniform(-1, 1, (100, 100))
        A[np.random.default_rng(1).random((100, 100)) < 0.5] = 0.0
        assert spectral_radius(A) == pytest.approx(np.max(np.abs(np.linalg.eigvals(A))), rel=1e-3)

    def test_nilpotent_is_zero(self):
        assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0

    def test_rescale(self):
        A = np.random.default_rng(2).normal(size=(30, 30))
        B = rescale_to_radius(A, 0.5)
        assert np.max(np.abs(np.linalg.eigvals(B))) == pytest.approx(0.5, rel=1e-3)

    def test_rescale_zero_matrix(self):
        with pytest.raises(DegenerateMatrixError):
            rescale_to_radius(np.zeros((3, 3)), 1.0)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            spectral_radius(np.ones((2, 3)))


class TestRidge:
    def test_matches_gaussian_elimination(self):
        rng = np.random.default_rng(0)
        R = rng.normal(size=(200, 10))
        g = rng.normal(size=200)
        lam_rel = 1e-3
        lam = lam_rel * np.trace(R.T @ R) / 10
        oracle = gauss_solve(R.T @ R + lam * np.eye(10), R.T @ g)
        assert np.allclose(ridge_solve(R, g, lam_rel), oracle, rtol=0, atol=1e-10)

    def test_zero_lambda_is_least_squares(self):
        rng = np.random.default_rng(1)
        R = rng.normal(size=(50, 5))
        g = rng.normal(size=50)
        assert np.allclose(ridge_solve(R, g, 0.0), np.linalg.lstsq(R, g, rcond=None)[0], atol=1e-10)

    def test_rank_deficient_without_ridge(self):
        R = np.ones((20, 3))
        with pytest.raises(RankDeficiencyError):
            ridge_solve(R, np.arange(20.0), 0.0)

    def test_rank_deficient_with_ridge_is_fine(self):
        c = ridge_solve(np.ones((20, 3)), np.ones(20), 1e-6)
        assert np.all(np.isfinite(c))

    def test_shape_checks(self):
        with pytest.raises(InvalidInputError):
            ridge_solve(np.ones((3, 5)), np.ones(3))
        with pytest.raises(InvalidInputError):
            ridge_solve(np.ones((5, 2)), np.ones(4))
        with pytest.raises(InvalidInputError):
            ridge_solve(np.ones((5, 2)), np.ones(5), -1.0)


class TestFft:
    def test_matches_direct_dft(self):
        x = np.random.default_rng(3).normal(size=64)
        spec = fft_magnitude(x)
        y = x - x.mean()
        n = np.arange(64)
        direct = [abs(np.sum(y * np.exp(-2j * np.pi * k * n / 64))) for k in range(33)]
        assert np.allclose(spec.mags, direct, atol=1e-10)
        assert spec.freqs[-1] == 0.5 and spec.n_f == 33

    def test_truncates_to_power_of_two(self):
        assert fft_magnitude(np.random.default_rng(0).normal(size=100)).n_f == 33

    def test_pure_tone_peak(self):
        n = np.arange(256)
        spec = fft_magnitude(np.sin(2 * np.pi * 0.25 * n))
        assert spec.freqs[np.argmax(spec.mags)] == 0.25

    def test_mean_removed(self):
        assert fft_magnitude(np.full(16, 3.0)).mags.max() < 1e-12

    def test_too_short(self):
        with pytest.raises(TooShortError):
            fft_magnitude(np.ones(7))


class TestRk4:
    def test_exponential_decay(self):
        x = np.array([1.0])
        for _ in range(100):
            x = rk4_step(lambda v, t: -v, x, 0.0, 0.01)
        assert x[0] == pytest.approx(np.exp(-1.0), rel=1e-9)

    def test_fourth_order_convergence(self):
        def err(dt):
            x, t = np.array([1.0]), 0.0
            for _ in range(int(round(1.0 / dt))):
                x = rk4_step(lambda v, tt: np.cos(tt) * v, x, t, dt)
                t += dt
            return abs(x[0] - np.exp(np.sin(1.0)))

        ratio = err(0.1) / err(0.05)
        assert 12 < ratio < 20

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(InvalidInputError):
            rk4_step(lambda v, t: v, np.ones(1), 0.0, 0.0)


class TestWorkedExamples:
    def test_uniform_matrix_range_and_mean(self):
        assert np.all(np.abs(uniform_matrix(Rng(1), 2, 2)) <= 1.0)
        assert abs(Rng(1).uniform(-1.0, 1.0, 10_000).mean()) < 0.05

    @pytest.mark.parametrize(
        "A, rho",
        [(np.eye(5), 1.0), (np.diag([2.0, -3.0]), 3.0), (np.array([[0.0, -1.0], [1.0, 0.0]]), 1.0)],
    )
    def test_radius_examples(self, A, rho):
        assert spectral_radius(A) == pytest.approx(rho, rel=1e-3)

    def test_rescale_diagonal(self):
        assert np.allclose(rescale_to_radius(np.diag([2.0, -3.0]), 0.5), np.diag([1 / 3, -0.5]), rtol=2e-3)

    @pytest.mark.parametrize("sigma, tol", [(0.28512, 3e-4), (2.78752, 3e-3)])
    def test_rescale_to_figure_radii(self, sigma, tol):
        A = np.random.default_rng(8).uniform(-1, 1, (100, 100))
        assert abs(np.max(np.abs(np.linalg.eigvals(rescale_to_radius(A, sigma)))) - sigma) < tol

    def test_exact_representability(self):
        rng = np.random.default_rng(2)
        g = rng.normal(size=300)
        others = rng.normal(size=(300, 4))
        others -= np.outer(g, g @ others) / (g @ g)
        R = np.column_stack([g, others])
        c = ridge_solve(R, g, 1e-12)
        assert np.allclose(c, [1, 0, 0, 0, 0], atol=1e-6)
        assert np.linalg.norm(R @ c - g) / np.linalg.norm(g) < 1e-6

    def test_huge_ridge_shrinks_to_zero(self):
        rng = np.random.default_rng(3)
        R = rng.normal(size=(100, 5))
        assert np.linalg.norm(ridge_solve(R, rng.normal(size=100), 1e12)) < 1e-9

    def test_tone_at_sixteenth_bin(self):
        n = np.arange(256)
        spec = fft_magnitude(np.sin(2 * np.pi * 16 * n / 256))
        assert spec.freqs[np.argmax(spec.mags)] == 0.0625
        assert np.sum(spec.mags > 1e-6 * spec.mags.max()) == 1

    def test_parseval(self):
        x = np.random.default_rng(4).normal(size=64)
        y = x - x.mean()
        m = fft_magnitude(x).mags
        # one-sided sum: interior bins appear twice in the full spectrum
        full = m[0] ** 2 + m[-1] ** 2 + 2 * np.sum(m[1:-1] ** 2)
        assert full / 64 == pytest.approx(np.sum(y**2), rel=1e-9)

    def test_zero_field(self):
        x = np.array([1.0, -2.0])
        assert np.array_equal(rk4_step(lambda v, t: np.zeros_like(v), x, 0.0, 0.1), x)

    def test_single_step_decay(self):
        assert abs(rk4_step(lambda v, t: -v, np.array([1.0]), 0.0, 0.02)[0] - np.exp(-0.02)) < 1e-9

    def test_lorenz_attractor_bounds(self):
        from edgescope.signals import lorenz_trajectory

        tr = lorenz_trajectory(10_000, seed=0)
        assert np.abs(tr.states[:, 0]).max() < 25 and np.abs(tr.states[:, 2]).max() < 50
