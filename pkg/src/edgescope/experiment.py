"""Single-parameter sweeps, edge-of-stability search and per-point diagnostics."""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .diagnostics.continuity import continuity_pair
from .diagnostics.entropy import ordinal_entropy
from .diagnostics.lyapunov import (
    DEFAULT_SKIP,
    LorenzSystem,
    Map3dSystem,
    ReservoirSystem,
    kaplan_yorke,
    lyapunov_spectrum,
    reservoir_lyapunov_report,
)
from .diagnostics.spectral import spectral_difference
from .errors import (
    CannotTrainError,
    ConfigError,
    DegenerateTargetError,
    InvalidInputError,
    NoEdgeFoundError,
    RankDeficiencyError,
    StabilityOrderError,
)
from .numerics import Rng
from .readout import evaluate_readout, train_readout
from .reservoir import DEFAULT_THRESHOLD, MAP, ODE, NetworkSpec, ReservoirParams, build_network, run_reservoir
from .signals import DriverTrajectory, driver_trajectory

log = logging.getLogger(__name__)

DRIVERS = ("lorenz", "map3d")
SWEEPABLE = ("p1", "alpha")
DIAGNOSTICS = ("lyapunov", "max_local", "entropy", "continuity", "spectral")

# substream keys; each seed feeds independent streams for these consumers
_KEY_DRIVER = 1
_KEY_LYAP = 2
_KEY_CONT = 3


@dataclass(frozen=True)
class AutoRange:
    """Rules for locating the sweep range when no explicit grid is given.

    The ladder starts at ``start`` (moved further onto the stable side until
    stable) and climbs with a doubling step until the first unstable value;
    bisection then narrows the edge to ``tolerance``. The lower bound is the
    closest value below the edge whose leading exponent satisfies
    ``lambda_1 <= min(lower_lambda, lower_factor * lambda_1(edge))``.
    """

    start: float
    step: float
    tolerance: float
    lower_factor: float = 2.0
    lower_lambda: float = -0.5
    max_doublings: int = 12
    lower_refine: int = 6
    floor: float | None = None


DEFAULT_AUTO = {
    "p1": AutoRange(start=-10.0, step=0.25, tolerance=0.005),
    "alpha": AutoRange(start=0.02, step=0.02, tolerance=0.0005, floor=0.005),
}


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce a sweep.

    ``grid`` is ``(min, max, n_points)``; ``None`` selects auto-ranging with
    ``n_points`` samples per seed between the lower bound and the last
    stable value below the edge.
    """

    driver: str = "lorenz"
    reservoir_kind: str = ODE
    p1: float = -3.0
    p2: float = 0.0
    p3: float = 0.0
    alpha: float = 1.0
    sigma: float = 1.0
    dt: float = 0.02
    n_nodes: int = 100
    density: float = 0.5
    swept: str = "p1"
    grid: tuple | None = None
    n_points: int = 12
    seeds: tuple = (0, 1, 2, 3, 4)
    transient: int | None = None
    discard: int = 1000
    fit: int = 10000
    test: int = 10000
    diagnostics: frozenset = frozenset(DIAGNOSTICS)
    threshold: float = DEFAULT_THRESHOLD
    lambda_rel: float = 1e-8
    use_bias: bool = False
    normalize_target: bool = False
    eps_fraction: float = 0.2
    n_ref: int = 100
    theiler: int = 10
    delta_shrink: float = 0.5
    entropy_window: int = 4
    lyap_k: int = 4
    lyap_skip: int = DEFAULT_SKIP
    auto: AutoRange | None = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "diagnostics", frozenset(self.diagnostics))
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(self.grid))
        validate_sweep_config(self)

    @property
    def auto_range(self) -> AutoRange:
        return self.auto if self.auto is not None else DEFAULT_AUTO[self.swept]

    def params_at(self, value: float) -> ReservoirParams:
        base = ReservoirParams(self.reservoir_kind, self.p1, self.p2, self.p3, self.alpha, self.dt)
        return base.with_value(self.swept, value)

    def grid_values(self) -> np.ndarray:
        if self.grid is None:
            raise ConfigError("auto-ranged sweep has no fixed grid", key="grid")
        lo, hi, n = self.grid
        return np.linspace(lo, hi, int(n)) if n > 1 else np.array([lo], dtype=float)[: int(n)]


def validate_sweep_config(cfg: SweepConfig) -> None:
    """Raise :class:`ConfigError` naming the first offending key."""
    if cfg.driver not in DRIVERS:
        raise ConfigError(f"driver must be one of {DRIVERS}", key="driver")
    if cfg.reservoir_kind not in (ODE, MAP):
        raise ConfigError("reservoir_kind must be 'ode' or 'map'", key="reservoir_kind")
    if cfg.swept not in SWEEPABLE:
        raise ConfigError(f"swept must be one of {SWEEPABLE}", key="swept")
    for key in ("p1", "p2", "p3", "alpha", "sigma", "dt", "threshold", "lambda_rel", "eps_fraction"):
        if not math.isfinite(getattr(cfg, key)):
            raise ConfigError(f"{key} must be finite", key=key)
    if not cfg.sigma > 0:
        raise ConfigError("sigma must be positive", key="sigma")
    if not cfg.dt > 0:
        raise ConfigError("dt must be positive", key="dt")
    if cfg.n_nodes < 2:
        raise ConfigError("n_nodes must be >= 2", key="n_nodes")
    if not 0 < cfg.density <= 1:
        raise ConfigError("density must be in (0, 1]", key="density")
    if not cfg.threshold > 0:
        raise ConfigError("threshold must be positive", key="threshold")
    if cfg.lambda_rel < 0:
        raise ConfigError("lambda_rel must be >= 0", key="lambda_rel")
    if cfg.discard < 0 or cfg.fit < 512 or cfg.test < 512:
        raise ConfigError("need discard >= 0 and fit, test >= 512", key="fit")
    if cfg.discard + min(cfg.fit, cfg.test) < 2000:
        raise ConfigError("discard + fit must be at least 2000 samples", key="fit")
    if cfg.lyap_skip >= cfg.discard + cfg.fit:
        raise ConfigError("lyap_skip must be shorter than the training run", key="lyap_skip")
    if not 1 <= cfg.lyap_k <= cfg.n_nodes:
        raise ConfigError("lyap_k must be in [1, n_nodes]", key="lyap_k")
    if cfg.entropy_window < 2:
        raise ConfigError("entropy_window must be >= 2", key="entropy_window")
    if not 0 < cfg.delta_shrink < 1:
        raise ConfigError("delta_shrink must be in (0, 1)", key="delta_shrink")
    if not cfg.eps_fraction > 0:
        raise ConfigError("eps_fraction must be positive", key="eps_fraction")
    if cfg.n_ref < 1 or cfg.theiler < 0:
        raise ConfigError("n_ref must be >= 1 and theiler >= 0", key="n_ref")
    if cfg.n_points < 0:
        raise ConfigError("n_points must be >= 0", key="n_points")
    if not cfg.seeds:
        raise ConfigError("at least one seed is required", key="seeds")
    if len(set(cfg.seeds)) != len(cfg.seeds):
        raise ConfigError("seeds must be distinct", key="seeds")
    unknown = cfg.diagnostics - set(DIAGNOSTICS)
    if unknown:
        raise ConfigError(f"unknown diagnostics {sorted(unknown)}", key="diagnostics")
    if cfg.grid is not None:
        if len(cfg.grid) != 3:
            raise ConfigError("grid must be (min, max, n_points)", key="grid")
        lo, hi, n = cfg.grid
        if int(n) != n or n < 0:
            raise ConfigError("grid n_points must be a non-negative integer", key="grid")
        if n > 1 and not hi > lo:
            raise ConfigError("grid must be strictly increasing (max > min)", key="grid")
    if cfg.swept == "alpha" and cfg.reservoir_kind == ODE and cfg.grid is not None and cfg.grid[0] <= 0:
        raise ConfigError("alpha grid must be positive for ODE reservoirs", key="grid")
    if cfg.auto is not None:
        if not cfg.auto.step > 0 or not cfg.auto.tolerance > 0:
            raise ConfigError("auto step and tolerance must be positive", key="auto")


@dataclass
class SweepRecord:
    seed: int
    param_value: float
    stable: bool
    delta_rc: float = math.inf
    delta_tx: float = math.inf
    lambda_1: float = math.nan
    lambda_2: float = math.nan
    lambda_3: float = math.nan
    lambda_4: float = math.nan
    max_local: float = math.nan
    d_ky: float = math.nan
    ky_index: float = math.nan
    H: float = math.nan
    n_symbols: float = math.nan
    psi_fwd: float = math.nan
    psi_rev: float = math.nan
    delta_f: float = math.nan
    delta_f_prose: float = math.nan


RECORD_COLUMNS = tuple(f.name for f in fields(SweepRecord))


@dataclass
class SeedContext:
    """Per-seed inputs shared by every point of a sweep."""

    seed: int
    net: NetworkSpec
    train: DriverTrajectory
    test: DriverTrajectory
    driver_exponents: np.ndarray | None = None


@dataclass
class EdgeBracket:
    """Bisection result: ``stable`` is the last stable probe, ``unstable`` the first unstable one."""

    stable: float
    unstable: float
    tolerance: float
    n_probes: int = 0

    @property
    def edge(self) -> float:
        return 0.5 * (self.stable + self.unstable)


@dataclass
class SweepRange:
    """Auto-ranging outcome for one seed."""

    seed: int
    lower: float
    bracket: EdgeBracket
    lambda_edge: float
    lambda_lower: float
    lower_rule_met: bool

    @property
    def upper(self) -> float:
        return self.bracket.stable

    def grid(self, n_points: int) -> np.ndarray:
        if n_points <= 0:
            return np.empty(0)
        if n_points == 1:
            return np.array([self.upper])
        return np.linspace(self.lower, self.upper, n_points)


# ---------------------------------------------------------------- per seed

def _driver_system(cfg: SweepConfig, driver: DriverTrajectory):
    if cfg.driver == "lorenz":
        m = driver.meta
        return LorenzSystem(m.get("c1", 10.0), m.get("c2", 28.0), m.get("c3", 8.0 / 3.0), driver.dt)
    return Map3dSystem()


def build_context(cfg: SweepConfig, seed: int, network: NetworkSpec | None = None) -> SeedContext:
    """Network, training driver and its continuation for one seed."""
    net = network if network is not None else build_network(seed, cfg.n_nodes, cfg.sigma, cfg.density)
    n_train = cfg.discard + cfg.fit
    n_total = n_train + cfg.discard + cfg.test
    kwargs = dict(normalize_target=cfg.normalize_target)
    if cfg.transient is not None:
        kwargs["transient"] = cfg.transient
    if cfg.driver == "lorenz":
        kwargs["dt"] = cfg.dt
    full = driver_trajectory(cfg.driver, n_total, seed=Rng(seed).substream(_KEY_DRIVER), **kwargs)
    train, test = full.split(n_train)
    exps = None
    if "lyapunov" in cfg.diagnostics:
        exps = lyapunov_spectrum(_driver_system(cfg, train), train.states, k=3, skip=cfg.lyap_skip,
                                 seed=_lyap_seed(seed))
    return SeedContext(seed=seed, net=net, train=train, test=test, driver_exponents=exps)


def _lyap_seed(seed: int) -> int:
    return Rng(seed).substream(_KEY_LYAP).seed


def _runs(ctx: SeedContext, cfg: SweepConfig, value: float):
    params = cfg.params_at(value)
    run = run_reservoir(ctx.net, params, ctx.train.input, threshold=cfg.threshold)
    run_test = None
    if run.stable:
        run_test = run_reservoir(ctx.net, params, ctx.test.input, threshold=cfg.threshold)
    return params, run, run_test


def is_stable(ctx: SeedContext, cfg: SweepConfig, value: float) -> bool:
    """Full stability classification: both the training and the test run stay bounded."""
    _, run, run_test = _runs(ctx, cfg, value)
    return bool(run.stable and run_test is not None and run_test.stable)


def leading_exponent(ctx: SeedContext, cfg: SweepConfig, value: float) -> float:
    """lambda_1 of the training run; ``nan`` if it diverged."""
    params, run, _ = _runs(ctx, cfg, value)
    if not run.stable:
        return math.nan
    system = ReservoirSystem(ctx.net, params)
    return float(lyapunov_spectrum(system, run.step_starts, run.input_used, k=1,
                                   skip=cfg.lyap_skip, seed=_lyap_seed(ctx.seed))[0])


def joint_kaplan_yorke(driver_exps, reservoir_exps, driver_dt: float, time_step: float):
    """Kaplan-Yorke dimension of driver and reservoir exponents pooled in reservoir time units."""
    pooled = np.concatenate([np.asarray(driver_exps) * (driver_dt / time_step), reservoir_exps])
    return kaplan_yorke(np.sort(pooled)[::-1])


def evaluate_point(ctx: SeedContext, cfg: SweepConfig, value: float) -> SweepRecord:
    """One sweep point: run, train, test and compute the enabled diagnostics.

    Instability of either run yields a record flagged unstable with infinite
    errors; it is never an exception.
    """
    rec = SweepRecord(seed=ctx.seed, param_value=float(value), stable=False)
    params, run, run_test = _runs(ctx, cfg, value)
    if not (run.stable and run_test is not None and run_test.stable):
        return rec
    try:
        model, d_rc = train_readout(run, ctx.train.target, cfg.lambda_rel, cfg.discard, cfg.fit, cfg.use_bias)
    except (CannotTrainError, RankDeficiencyError, DegenerateTargetError) as exc:
        log.warning("seed %d value %g: readout failed (%s)", ctx.seed, value, exc)
        return rec
    fit_rows = slice(cfg.discard, cfg.discard + cfg.fit)
    rec.stable = True
    rec.delta_rc = float(d_rc)
    test_model = replace(model, fit=cfg.test)
    rec.delta_tx = float(evaluate_readout(test_model, run_test, ctx.test.target))
    diag = cfg.diagnostics
    if "lyapunov" in diag or "max_local" in diag:
        rep = reservoir_lyapunov_report(ctx.net, params, run, k=cfg.lyap_k, skip=cfg.lyap_skip,
                                        seed=_lyap_seed(ctx.seed), max_local="max_local" in diag)
        for i, lam in enumerate(rep.exponents[:4]):
            setattr(rec, f"lambda_{i + 1}", float(lam))
        if "max_local" in diag:
            rec.max_local = rep.max_local
        if ctx.driver_exponents is not None:
            d_ky, j = joint_kaplan_yorke(ctx.driver_exponents, rep.exponents, ctx.train.dt,
                                         params.time_step)
            rec.d_ky, rec.ky_index = float(d_ky), float(j)
    states = run.states[fit_rows]
    if "entropy" in diag:
        ent = ordinal_entropy(states, cfg.entropy_window)
        rec.H, rec.n_symbols = ent.H, float(ent.n_symbols)
    if "continuity" in diag:
        fwd, rev = continuity_pair(ctx.train.states[fit_rows], states, eps_fraction=cfg.eps_fraction,
                                   n_ref=cfg.n_ref, theiler=cfg.theiler, delta_shrink=cfg.delta_shrink,
                                   seed=Rng(ctx.seed).substream(_KEY_CONT).seed)
        rec.psi_fwd, rec.psi_rev = fwd.psi, rev.psi
    if "spectral" in diag:
        g = ctx.train.target[fit_rows]
        rec.delta_f = spectral_difference(g, states).delta_f
        rec.delta_f_prose = spectral_difference(g, states, prose_variant=True).delta_f
    return rec


# ---------------------------------------------------------------- edge search

def bisect_edge(stable_fn: Callable[[float], bool], lo: float, hi: float, tolerance: float) -> EdgeBracket:
    """Shrink ``[lo, hi]`` (``lo`` stable, ``hi`` unstable) until ``hi - lo <= tolerance``."""
    if not tolerance > 0:
        raise InvalidInputError("tolerance must be positive")
    n = 0
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        n += 1
        if stable_fn(mid):
            lo = mid
        else:
            hi = mid
    return EdgeBracket(stable=lo, unstable=hi, tolerance=tolerance, n_probes=n)


def bracket_from_grid(values: Sequence[float], stable: Sequence[bool]) -> tuple[float, float]:
    """Largest stable and smallest unstable grid value, checking that stability is one-sided."""
    values = np.asarray(values, dtype=float)
    stable = np.asarray(stable, dtype=bool)
    if stable.all() or not stable.any():
        kind = "stable" if stable.all() else "unstable"
        raise NoEdgeFoundError(f"every grid point is {kind}; widen the grid to span the edge")
    lo = float(values[stable].max())
    hi = float(values[~stable].min())
    if lo > hi:
        raise StabilityOrderError(f"stable point {lo:g} lies above unstable point {hi:g}")
    return lo, hi


def _ladder(stable_fn, auto: AutoRange, positive: bool) -> tuple[float, float, int]:
    """Climb from ``auto.start`` with a doubling step to the first unstable value."""
    x = auto.start
    probes = 1
    down = auto.step
    while not stable_fn(x):
        if probes > auto.max_doublings:
            raise NoEdgeFoundError(f"no stable value found below {auto.start:g}; lower the auto start")
        x = x * 0.5 if positive else x - down
        down *= 2.0
        probes += 1
    step = auto.step
    for _ in range(auto.max_doublings + 1):
        probes += 1
        nxt = x + step
        if not stable_fn(nxt):
            return x, nxt, probes
        x = nxt
        step *= 2.0
    raise NoEdgeFoundError(f"still stable at {x:g}; raise the auto step or start")


def find_edge(cfg: SweepConfig, tolerance: float | None = None, seed: int | None = None,
              network: NetworkSpec | None = None, stable_fn: Callable[[float], bool] | None = None) -> float:
    """Edge of stability in the swept parameter for one seed (default: the first).

    With an explicit grid the bracket is the largest stable / smallest
    unstable grid value; otherwise the auto ladder supplies it. Every probe is
    a full stability-classified run unless ``stable_fn`` overrides it.
    """
    return locate_edge(cfg, tolerance, seed, network, stable_fn).edge


def locate_edge(cfg: SweepConfig, tolerance: float | None = None, seed: int | None = None,
                network: NetworkSpec | None = None, stable_fn: Callable[[float], bool] | None = None,
                ctx: SeedContext | None = None) -> EdgeBracket:
    auto = cfg.auto_range
    tol = auto.tolerance if tolerance is None else float(tolerance)
    if stable_fn is None:
        if ctx is None:
            light = replace(cfg, diagnostics=frozenset())
            ctx = build_context(light, cfg.seeds[0] if seed is None else seed, network)
        stable_fn = lambda v: is_stable(ctx, cfg, v)  # noqa: E731
    if cfg.grid is not None:
        values = cfg.grid_values()
        lo, hi = bracket_from_grid(values, [stable_fn(v) for v in values])
        probes = len(values)
    else:
        lo, hi, probes = _ladder(stable_fn, auto, positive=cfg.swept == "alpha")
    br = bisect_edge(stable_fn, lo, hi, tol)
    br.n_probes += probes
    return br


def auto_range(cfg: SweepConfig, ctx: SeedContext) -> SweepRange:
    """Edge bracket plus a lower bound set by the contraction rule in :class:`AutoRange`."""
    auto = cfg.auto_range
    br = locate_edge(cfg, ctx=ctx)
    lam_edge = leading_exponent(ctx, cfg, br.stable)
    target = min(auto.lower_lambda, auto.lower_factor * lam_edge)
    floor = auto.floor if auto.floor is not None else -math.inf

    def ok(v):
        if not is_stable(ctx, cfg, v):
            return False, math.nan
        lam = leading_exponent(ctx, cfg, v)
        return lam <= target, lam

    near = br.stable
    dist = auto.step
    far, lam_far, met = None, math.nan, False
    for _ in range(auto.max_doublings + 1):
        cand = max(br.stable - dist, floor)
        met, lam_far = ok(cand)
        if met or cand == floor:
            far = cand
            break
        near = cand
        dist *= 2.0
    if far is None:
        far = cand
    if met:
        for _ in range(auto.lower_refine):
            mid = 0.5 * (near + far)
            good, lam = ok(mid)
            if good:
                far, lam_far = mid, lam
            else:
                near = mid
    return SweepRange(seed=ctx.seed, lower=float(far), bracket=br, lambda_edge=float(lam_edge),
                      lambda_lower=float(lam_far), lower_rule_met=bool(met))


# ---------------------------------------------------------------- sweeps

def _point_task(args):
    ctx, cfg, value = args
    return evaluate_point(ctx, cfg, value)


def _range_task(args):
    ctx, cfg = args
    return auto_range(cfg, ctx)


def _context_task(args):
    cfg, seed = args
    return build_context(cfg, seed)


def _pmap(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def build_contexts(cfg: SweepConfig, jobs: int = 1) -> dict[int, SeedContext]:
    ctxs = _pmap(_context_task, [(cfg, s) for s in cfg.seeds], jobs)
    return {c.seed: c for c in ctxs}


def resolve_ranges(cfg: SweepConfig, jobs: int = 1,
                   contexts: dict[int, SeedContext] | None = None) -> dict[int, SweepRange]:
    """Auto range per seed (edge by bisection, contraction-based lower bound)."""
    contexts = contexts or build_contexts(cfg, jobs)
    ranges = _pmap(_range_task, [(contexts[s], cfg) for s in cfg.seeds], jobs)
    return {r.seed: r for r in ranges}


def run_sweep(cfg: SweepConfig, jobs: int = 1, ranges: dict[int, SweepRange] | None = None,
              contexts: dict[int, SeedContext] | None = None) -> list[SweepRecord]:
    """Evaluate every (seed, grid value) pair; records come back ordered by (seed, value).

    Points are independent, so ``jobs > 1`` farms them out to worker
    processes and the ordered merge equals the sequential result.
    """
    if cfg.grid is not None and cfg.grid_values().size == 0:
        return []
    if cfg.grid is None and cfg.n_points == 0:
        return []
    contexts = contexts or build_contexts(cfg, jobs)
    if cfg.grid is None and ranges is None:
        ranges = resolve_ranges(cfg, jobs, contexts)
    tasks = []
    for seed in sorted(cfg.seeds):
        values = cfg.grid_values() if cfg.grid is not None else ranges[seed].grid(cfg.n_points)
        tasks.extend((contexts[seed], cfg, float(v)) for v in values)
    records = _pmap(_point_task, tasks, jobs)
    records.sort(key=lambda r: (r.seed, r.param_value))
    return records


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_records_csv(records: Iterable[SweepRecord], path) -> Path:
    """RFC-4180 CSV with one column per record field; floats via ``repr`` for exact reruns."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            d = asdict(rec)
            writer.writerow([format_value(d[c]) for c in RECORD_COLUMNS])
    return path


def read_records_csv(path) -> list[SweepRecord]:
    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for f in fields(SweepRecord):
                raw = row[f.name]
                if f.name == "seed":
                    kw[f.name] = int(raw)
                elif f.name == "stable":
                    kw[f.name] = raw == "true"
                else:
                    kw[f.name] = float(raw)
            out.append(SweepRecord(**kw))
    return out


def records_by_seed(records: Iterable[SweepRecord]) -> dict[int, list[SweepRecord]]:
    out: dict[int, list[SweepRecord]] = {}
    for r in records:
        out.setdefault(r.seed, []).append(r)
    return out


def check_record_invariants(rec: SweepRecord) -> list[str]:
    """Violated invariants of one stable record (empty when it is consistent)."""
    if not rec.stable:
        bad = []
        if not (math.isinf(rec.delta_rc) and math.isinf(rec.delta_tx)):
            bad.append("unstable record without infinite error sentinels")
        return bad
    bad = []
    if not (rec.delta_rc >= 0 and rec.delta_tx >= 0 and math.isfinite(rec.delta_rc)
            and math.isfinite(rec.delta_tx)):
        bad.append("errors must be finite and non-negative")
    if not math.isnan(rec.max_local) and not math.isnan(rec.lambda_1):
        if rec.max_local < rec.lambda_1:
            bad.append("max_local < lambda_1")
    if not math.isnan(rec.d_ky):
        if not rec.ky_index <= rec.d_ky <= rec.ky_index + 1:
            bad.append("d_ky outside [j, j+1]")
    for name in ("psi_fwd", "psi_rev"):
        v = getattr(rec, name)
        if not math.isnan(v) and not 0.0 <= v <= 1.0:
            bad.append(f"{name} outside [0, 1]")
    if not math.isnan(rec.H) and rec.H > math.log(rec.n_symbols) + 1e-12:
        bad.append("H > ln(n_symbols)")
    return bad


def reproduce_figure(fig: str, out_dir, **kwargs):
    """Run a figure preset and write its artifacts (see :mod:`edgescope.figures`)."""
    from .figures import reproduce_figure as _reproduce

    return _reproduce(fig, out_dir, **kwargs)
