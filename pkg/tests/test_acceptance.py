"""One test per acceptance criterion; the summary hook prints a line for each."""

import math
import time

import numpy as np
import pytest

from edgescope.diagnostics import (
    LorenzSystem,
    continuity_stat,
    kaplan_yorke,
    lyapunov_spectrum,
    ordinal_entropy,
    reservoir_lyapunov_report,
    spectral_difference,
    symbol_entropy,
)
from edgescope.experiment import check_record_invariants, default_jobs, run_sweep, write_records_csv
from edgescope.figures import (
    argmin_position,
    at_edge,
    dky_rise,
    entropy_rises,
    interior,
    preset,
    reproduce_figure,
    trend,
)
from edgescope.numerics import ridge_solve
from edgescope.readout import train_readout
from edgescope.reservoir import ReservoirParams, ReservoirRun, build_network, run_reservoir
from edgescope.signals import lorenz_trajectory

SEEDS = (0, 1, 2, 3, 4)
N_POINTS = 12


def record(acceptance, n, ok, detail):
    acceptance[n] = (bool(ok), detail)
    assert ok, detail


def majority_of(flags) -> bool:
    return sum(flags) >= 3


@pytest.fixture(scope="session")
def lorenz_long():
    tr = lorenz_trajectory(100_000, seed=0)
    t0 = time.perf_counter()
    lam = lyapunov_spectrum(LorenzSystem(dt=tr.dt), tr.states, k=3)
    return lam, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fig1(tmp_path_factory):
    t0 = time.perf_counter()
    res = reproduce_figure("fig1", tmp_path_factory.mktemp("fig1"), seeds=SEEDS, jobs=default_jobs(),
                           n_points=N_POINTS)
    return res, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fig2(tmp_path_factory):
    return reproduce_figure("fig2", tmp_path_factory.mktemp("fig2"), seeds=SEEDS, jobs=default_jobs(),
                            n_points=N_POINTS)


@pytest.fixture(scope="session")
def fig7(tmp_path_factory):
    return reproduce_figure("fig7", tmp_path_factory.mktemp("fig7"), seeds=SEEDS, jobs=default_jobs(),
                            n_points=N_POINTS)


def all_records(*results):
    return [r for res in results for per_seed in res.records.values() for recs in per_seed.values() for r in recs]


def test_c01_lorenz_kaplan_yorke(acceptance, lorenz_long):
    lam, elapsed = lorenz_long
    d_ky, _ = kaplan_yorke(lam)
    record(acceptance, 1, abs(d_ky - 2.06) <= 0.03 and elapsed < 30,
           f"D_KY={d_ky:.4f}, {elapsed:.1f} s")


def test_c02_lorenz_exponent_sum(acceptance, lorenz_long):
    total = float(np.sum(lorenz_long[0]))
    record(acceptance, 2, abs(total + 41 / 3) <= 0.15, f"sum={total:.4f}, expected {-41 / 3:.4f}")


def test_c03_linear_reservoir_oracle(acceptance):
    net = build_network(5, 10, 1.0)
    params = ReservoirParams("map", 0.5, 0.0, 0.0, 0.3)
    s = np.random.default_rng(0).normal(size=6000)
    run = run_reservoir(net, params, s)
    lam = reservoir_lyapunov_report(net, params, run, k=4, skip=500).exponents
    oracle = np.sort(np.log(np.abs(np.linalg.eigvals(0.3 * (0.5 * np.eye(10) + net.A)))))[::-1][:4]
    err = float(np.max(np.abs(lam - oracle)))
    record(acceptance, 3, err <= 1e-2, f"max |diff|={err:.2e}")


def test_c04_ridge_oracle(acceptance):
    rng = np.random.default_rng(42)
    R = rng.normal(size=(200, 10))
    g = rng.normal(size=200)
    lam = 1e-3 * np.trace(R.T @ R) / 10
    direct = np.linalg.solve(R.T @ R + lam * np.eye(10), R.T @ g)
    err = float(np.max(np.abs(ridge_solve(R, g, 1e-3) - direct)))
    states = rng.normal(size=(1200, 10))
    run = ReservoirRun(states=states, stable=True, divergence_step=None, input_used=np.zeros(1200), r0=states[0])
    _, delta_rc = train_readout(run, states[:, 7], 1e-12, discard=200, fit=1000)
    record(acceptance, 4, err <= 1e-10 and delta_rc < 1e-6, f"max |diff|={err:.1e}, delta_rc={delta_rc:.1e}")


@pytest.mark.slow
def test_c05_entropy_properties(acceptance, fig1, fig2):
    h_one = ordinal_entropy(np.cumsum(np.ones((200, 4)), axis=0)).H
    h_eight = symbol_entropy(np.tile(np.arange(8), 500)).H
    recs = [r for r in all_records(fig1[0], fig2) if r.stable and not math.isnan(r.H)]
    bounded = all(r.H <= math.log(r.n_symbols) + 1e-12 for r in recs)
    ok = h_one == 0.0 and abs(h_eight - math.log(8)) <= 1e-12 and bounded and recs
    record(acceptance, 5, ok, f"H_one={h_one}, |H_eight-ln 8|={abs(h_eight - math.log(8)):.1e}, "
                              f"{len(recs)} records bounded={bounded}")


def test_c06_continuity_calibration(acceptance):
    X = lorenz_trajectory(5000, seed=11).states
    psi_id = continuity_stat(X, X, seed=1).psi
    psi_sh = continuity_stat(X, X[np.random.default_rng(4).permutation(len(X))], seed=1).psi
    record(acceptance, 6, psi_id >= 0.95 and psi_sh <= 0.2, f"identity={psi_id:.3f}, shuffled={psi_sh:.3f}")


def test_c07_spectral_oracle(acceptance):
    n = np.arange(256)
    g = np.sin(2 * np.pi * 0.25 * n)
    r = 0.5 * np.sin(2 * np.pi * 0.0625 * n)
    basis = np.exp(-2j * np.pi * np.outer(np.arange(129), n) / 256)
    G, Rm, f = np.abs(basis @ (g - g.mean())), np.abs(basis @ (r - r.mean())), np.arange(129) / 256
    oracle = np.sum(G * f) / np.sum(G) - np.sum((G - Rm) * f) / np.sum(G - Rm)
    two_tone = spectral_difference(g, np.column_stack([r, r]), min_length=256).delta_f
    same = spectral_difference(g, np.column_stack([g, g]), min_length=256)
    sign = spectral_difference(g, 2.0 * np.sin(2 * np.pi * 0.05 * n)[:, None], min_length=256).delta_f
    ok = abs(two_tone - oracle) <= 1e-10 and same.delta_f == 0.0 and same.guard_hits == 2 and sign > 0
    record(acceptance, 7, ok, f"|two_tone-oracle|={abs(two_tone - oracle):.1e}, guard={same.delta_f}, "
                              f"sign delta_f={sign:.4f}")


@pytest.mark.slow
def test_c08_fig1_reproduction(acceptance, fig1):
    res, elapsed = fig1
    r = res.records["fig1"]
    flags = [at_edge(r[s]) and entropy_rises(r[s]) for s in SEEDS]
    pos = ", ".join(f"{argmin_position(r[s]):.2f}" for s in SEEDS)
    record(acceptance, 8, majority_of(flags) and elapsed < 600,
           f"{sum(flags)}/5 seeds, argmin positions {pos}, {elapsed:.0f} s")


@pytest.mark.slow
def test_c09_fig2_reproduction(acceptance, fig1, fig2):
    a, b = fig1[0].records["fig1"], fig2.records["fig2"]
    flags = [interior(b[s]) and dky_rise(a[s], b[s]) for s in SEEDS]
    pos = ", ".join(f"{argmin_position(b[s]):.2f}" for s in SEEDS)
    record(acceptance, 9, majority_of(flags), f"{sum(flags)}/5 seeds, argmin positions {pos}")


@pytest.mark.slow
def test_c10_map_reservoir_reproduction(acceptance, fig7):
    m, lz = fig7.records["map"], fig7.records["lorenz"]
    interior_map = [interior(m[s]) for s in SEEDS]
    rising = [trend(m[s], "delta_f") > 0 for s in SEEDS]
    edge_lz = [at_edge(lz[s]) for s in SEEDS]
    edges = []
    for s in SEEDS:
        em, el = fig7.ranges["map"][s].bracket, fig7.ranges["lorenz"][s].bracket
        edges.append(abs(em.edge - el.edge) > max(em.tolerance, el.tolerance))
    parts = {"map interior argmin": interior_map, "delta_f rising": rising, "lorenz edge argmin": edge_lz,
             "edges differ": edges}
    ok = all(majority_of(v) for v in parts.values())
    record(acceptance, 10, ok, "; ".join(f"{k} {sum(v)}/5" for k, v in parts.items()))


@pytest.mark.slow
def test_c11_invariant_gate(acceptance, fig1, fig2, fig7, tmp_path):
    recs = all_records(fig1[0], fig2, fig7)
    bad = [(r.seed, r.param_value, check_record_invariants(r)) for r in recs if check_record_invariants(r)]
    # full rerun, edge search included, against the CSV written by the fixture
    cfg = preset("fig7", SEEDS, N_POINTS).sweeps["lorenz"]
    again = write_records_csv(run_sweep(cfg, default_jobs()), tmp_path / "again.csv").read_bytes()
    stored = next(p for p in fig7.files if p.name == "fig7_lorenz.csv").read_bytes()
    identical = again == stored
    record(acceptance, 11, not bad and identical,
           f"{len(recs)} records, {len(bad)} violations, reruns identical={identical}")
