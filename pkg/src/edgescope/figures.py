"""Preset sweeps for the eight figures, their SVG panels and claim verdicts."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.stats import spearmanr

from .errors import InvalidInputError
from .experiment import (
    SweepConfig,
    SweepRange,
    SweepRecord,
    build_contexts,
    records_by_seed,
    resolve_ranges,
    run_sweep,
    write_records_csv,
)

log = logging.getLogger(__name__)

EDGE_TAIL = 0.85
INTERIOR = 0.70

FIG1_SET = dict(p2=-0.871984, p3=0.52492, sigma=0.28512, alpha=5.53275)
FIG2_SET = dict(p2=-1.03594, p3=0.9308149, sigma=2.78752, alpha=2.72261)
MAP_SET = dict(reservoir_kind="map", p1=0.5, p2=0.5, p3=0.5, sigma=0.5, alpha=0.1, swept="alpha")

FIGURES = tuple(f"fig{i}" for i in range(1, 9))


def ode_config(param_set: dict, **kw) -> SweepConfig:
    return SweepConfig(driver="lorenz", reservoir_kind="ode", swept="p1", **param_set, **kw)


def map_config(driver: str, **kw) -> SweepConfig:
    return SweepConfig(driver=driver, **MAP_SET, **kw)


# ---------------------------------------------------------------- verdict surrogates

def _stable(recs):
    return [r for r in recs if r.stable]


def argmin_position(recs: list[SweepRecord], column: str = "delta_tx") -> float:
    """Relative position in ``[0, 1]`` of the minimizing value within the stable range."""
    st = _stable(recs)
    if len(st) < 2:
        return math.nan
    v = np.array([r.param_value for r in st])
    e = np.array([getattr(r, column) for r in st])
    span = v.max() - v.min()
    return float((v[int(np.argmin(e))] - v.min()) / span) if span > 0 else math.nan


def at_edge(recs) -> bool:
    return argmin_position(recs) >= EDGE_TAIL


def interior(recs) -> bool:
    return argmin_position(recs) < INTERIOR


def trend(recs, column: str) -> float:
    """Spearman rho of ``column`` against the swept value over stable records."""
    st = [r for r in _stable(recs) if math.isfinite(getattr(r, column))]
    if len(st) < 3:
        return math.nan
    rho = spearmanr([r.param_value for r in st], [getattr(r, column) for r in st])[0]
    return float(rho)


def entropy_rises(recs) -> bool:
    """H at the last stable point exceeds H at the first grid point."""
    st = _stable(recs)
    return len(st) >= 2 and st[-1].H > recs[0].H


def local_before_global(recs) -> bool:
    """Some stable point has a positive max local exponent while lambda_1 < 0."""
    return any(r.max_local > 0 > r.lambda_1 for r in _stable(recs))


def dky_rise(recs_a, recs_b) -> bool:
    """Set B's D_KY exceeds set A's maximum at some matched relative position.

    Both sweeps use the same number of grid points, so index i is the same
    relative position in each.
    """
    best_a = max((r.d_ky for r in _stable(recs_a)), default=math.nan)
    pairs = [(a, b) for a, b in zip(recs_a, recs_b) if b.stable]
    return any(b.d_ky > best_a for _, b in pairs)


@dataclass
class SeedResult:
    passed: bool
    detail: str


@dataclass
class ClaimVerdict:
    claim: str
    description: str
    per_seed: dict[int, SeedResult] = field(default_factory=dict)

    @property
    def n_pass(self) -> int:
        return sum(r.passed for r in self.per_seed.values())

    @property
    def passed(self) -> bool:
        return self.n_pass * 2 > len(self.per_seed)


def majority(claim: str, description: str, seeds, fn: Callable[[int], tuple[bool, str]]) -> ClaimVerdict:
    v = ClaimVerdict(claim, description)
    for s in seeds:
        ok, detail = fn(s)
        v.per_seed[s] = SeedResult(bool(ok), detail)
    return v


# ---------------------------------------------------------------- presets

@dataclass
class Panel:
    name: str
    label: str
    columns: tuple
    sweeps: tuple


@dataclass
class FigurePreset:
    fig: str
    title: str
    sweeps: dict
    panels: list
    claims: Callable


def _fmt(x) -> str:
    return f"{x:.6g}"


def _claims_fig1(res, seeds):
    r = res["fig1"]
    return [
        majority("edge_argmin", "argmin delta_tx in the last 15% of the stable p1 range", seeds,
                 lambda s: (at_edge(r[s]), f"position={_fmt(argmin_position(r[s]))}")),
        majority("entropy_rises", "H at the last stable point exceeds H at the first grid point", seeds,
                 lambda s: (entropy_rises(r[s]), f"H_first={_fmt(r[s][0].H)};H_last={_fmt(_stable(r[s])[-1].H)}")),
        majority("local_before_global", "max local exponent positive while lambda_1 < 0", seeds,
                 lambda s: (local_before_global(r[s]), f"max_local_last={_fmt(_stable(r[s])[-1].max_local)}")),
    ]


def _claims_fig2(res, seeds):
    r = res["fig2"]
    return [
        majority("interior_argmin", "argmin delta_tx below the 70th percentile of the stable p1 range", seeds,
                 lambda s: (interior(r[s]), f"position={_fmt(argmin_position(r[s]))}")),
        majority("local_before_global", "max local exponent positive while lambda_1 < 0", seeds,
                 lambda s: (local_before_global(r[s]), f"max_local_last={_fmt(_stable(r[s])[-1].max_local)}")),
    ]


def _claims_fig3(res, seeds):
    a, b = res["fig1set"], res["fig2set"]

    def one(s):
        ma = max(x.d_ky for x in _stable(a[s]))
        mb = max(x.d_ky for x in _stable(b[s]))
        return dky_rise(a[s], b[s]), f"max_dky_fig1set={_fmt(ma)};max_dky_fig2set={_fmt(mb)}"

    return [majority("dky_larger_rise", "fig-2 set D_KY rises above the fig-1 set maximum", seeds, one)]


def _claims_fig4(res, seeds):
    a, b = res["fig1set"], res["fig2set"]

    def up(s):
        rf, rr = trend(a[s], "psi_fwd"), trend(a[s], "psi_rev")
        return rf > 0 and rr > 0, f"rho_fwd={_fmt(rf)};rho_rev={_fmt(rr)}"

    def down(s):
        rf, rr = trend(b[s], "psi_fwd"), trend(b[s], "psi_rev")
        return rf < 0 and rr < 0, f"rho_fwd={_fmt(rf)};rho_rev={_fmt(rr)}"

    return [majority("fig1set_psi_increasing", "fig-1 set: both continuity statistics increase with p1", seeds, up),
            majority("fig2set_psi_decreasing", "fig-2 set: both continuity statistics decrease with p1", seeds, down)]


def _claims_fig5(res, seeds):
    r = res["map"]
    return [
        majority("interior_argmin", "argmin delta_tx below the 70th percentile of the stable alpha range", seeds,
                 lambda s: (interior(r[s]), f"position={_fmt(argmin_position(r[s]))}")),
        majority("local_before_global", "max local exponent positive while lambda_1 < 0", seeds,
                 lambda s: (local_before_global(r[s]), f"max_local_last={_fmt(_stable(r[s])[-1].max_local)}")),
    ]


def _claims_fig6(res, seeds):
    r = res["map"]

    def up(s):
        rf, rr = trend(r[s], "psi_fwd"), trend(r[s], "psi_rev")
        return rf > 0 and rr > 0, f"rho_fwd={_fmt(rf)};rho_rev={_fmt(rr)}"

    return [majority("psi_increasing", "both continuity statistics increase toward the edge", seeds, up)]


def _claims_fig7(res, seeds, ranges):
    m, lz = res["map"], res["lorenz"]

    def inc(s):
        rho, rho_p = trend(m[s], "delta_f"), trend(m[s], "delta_f_prose")
        return rho > 0, f"rho={_fmt(rho)};rho_prose_variant={_fmt(rho_p)}"

    def larger(s):
        a = max(r.delta_f for r in _stable(m[s]))
        b = max(r.delta_f for r in _stable(lz[s]))
        return a > b, f"max_map={_fmt(a)};max_lorenz={_fmt(b)}"

    def edges(s):
        em, el = ranges["map"][s].bracket, ranges["lorenz"][s].bracket
        tol = max(em.tolerance, el.tolerance)
        return abs(em.edge - el.edge) > tol, f"edge_map={_fmt(em.edge)};edge_lorenz={_fmt(el.edge)};tol={_fmt(tol)}"

    return [majority("delta_f_increasing", "map-driven delta_f increases over the stable alpha range", seeds, inc),
            majority("map_delta_f_larger", "map-driven delta_f reaches larger values than Lorenz-driven", seeds, larger),
            majority("edges_differ", "map-driven and Lorenz-driven edges differ by more than the tolerance", seeds, edges)]


def _claims_fig8(res, seeds):
    r = res["lorenz"]
    return [majority("edge_argmin", "argmin delta_tx in the last 15% of the stable alpha range", seeds,
                     lambda s: (at_edge(r[s]), f"position={_fmt(argmin_position(r[s]))}"))]


def preset(fig: str, seeds=(0, 1, 2, 3, 4), n_points: int = 12) -> FigurePreset:
    """Sweep configurations, panels and claims for one figure."""
    kw = dict(seeds=tuple(seeds), n_points=n_points)
    lyap = {"lyapunov", "max_local", "entropy"}
    if fig == "fig1":
        return FigurePreset(fig, "ODE reservoir, Lorenz drive, edge set",
                            {"fig1": ode_config(FIG1_SET, diagnostics=lyap, **kw)},
                            [Panel("delta_tx", "testing error", ("delta_tx",), ("fig1",)),
                             Panel("lyapunov", "exponent", ("lambda_1", "max_local"), ("fig1",)),
                             Panel("entropy", "H (nats)", ("H",), ("fig1",))],
                            lambda res, s, rg: _claims_fig1(res, s))
    if fig == "fig2":
        return FigurePreset(fig, "ODE reservoir, Lorenz drive, non-edge set",
                            {"fig2": ode_config(FIG2_SET, diagnostics=lyap, **kw)},
                            [Panel("delta_tx", "testing error", ("delta_tx",), ("fig2",)),
                             Panel("lyapunov", "exponent", ("lambda_1", "max_local"), ("fig2",)),
                             Panel("entropy", "H (nats)", ("H",), ("fig2",))],
                            lambda res, s, rg: _claims_fig2(res, s))
    if fig == "fig3":
        return FigurePreset(fig, "Kaplan-Yorke dimension for both ODE parameter sets",
                            {"fig1set": ode_config(FIG1_SET, diagnostics={"lyapunov"}, **kw),
                             "fig2set": ode_config(FIG2_SET, diagnostics={"lyapunov"}, **kw)},
                            [Panel("d_ky", "D_KY", ("d_ky",), ("fig1set", "fig2set"))],
                            lambda res, s, rg: _claims_fig3(res, s))
    if fig == "fig4":
        return FigurePreset(fig, "continuity statistics for both ODE parameter sets",
                            {"fig1set": ode_config(FIG1_SET, diagnostics={"continuity"}, **kw),
                             "fig2set": ode_config(FIG2_SET, diagnostics={"continuity"}, **kw)},
                            [Panel("psi_fwd", "forward psi", ("psi_fwd",), ("fig1set", "fig2set")),
                             Panel("psi_rev", "reverse psi", ("psi_rev",), ("fig1set", "fig2set"))],
                            lambda res, s, rg: _claims_fig4(res, s))
    if fig == "fig5":
        return FigurePreset(fig, "map reservoir, 3-D map drive",
                            {"map": map_config("map3d", diagnostics=lyap, **kw)},
                            [Panel("delta_tx", "testing error", ("delta_tx",), ("map",)),
                             Panel("lyapunov", "exponent", ("lambda_1", "max_local"), ("map",)),
                             Panel("entropy", "H (nats)", ("H",), ("map",))],
                            lambda res, s, rg: _claims_fig5(res, s))
    if fig == "fig6":
        return FigurePreset(fig, "continuity statistics, map reservoir, 3-D map drive",
                            {"map": map_config("map3d", diagnostics={"continuity"}, **kw)},
                            [Panel("psi_fwd", "forward psi", ("psi_fwd",), ("map",)),
                             Panel("psi_rev", "reverse psi", ("psi_rev",), ("map",))],
                            lambda res, s, rg: _claims_fig6(res, s))
    if fig == "fig7":
        return FigurePreset(fig, "spectral difference, map reservoir, both drives",
                            {"map": map_config("map3d", diagnostics={"spectral"}, **kw),
                             "lorenz": map_config("lorenz", diagnostics={"spectral"}, **kw)},
                            [Panel("delta_f", "delta_f", ("delta_f",), ("map", "lorenz")),
                             Panel("delta_f_prose", "delta_f (prose variant)", ("delta_f_prose",),
                                   ("map", "lorenz"))],
                            _claims_fig7)
    if fig == "fig8":
        return FigurePreset(fig, "map reservoir, Lorenz drive",
                            {"lorenz": map_config("lorenz", diagnostics=frozenset(), **kw)},
                            [Panel("delta_tx", "testing error", ("delta_tx",), ("lorenz",))],
                            lambda res, s, rg: _claims_fig8(res, s))
    raise InvalidInputError(f"unknown figure {fig!r}; choose one of {', '.join(FIGURES)}")


# ---------------------------------------------------------------- output

def plot_panel(panel: Panel, results: dict, path: Path, swept: str) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "edgescope", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        styles = ["-", "--", ":", "-."]
        for si, label in enumerate(panel.sweeps):
            for seed, recs in sorted(results[label].items()):
                st = _stable(recs)
                x = [r.param_value for r in st]
                for ci, col in enumerate(panel.columns):
                    y = [getattr(r, col) for r in st]
                    name = f"{label} {col} seed {seed}" if len(panel.sweeps) > 1 or len(panel.columns) > 1 \
                        else f"seed {seed}"
                    ax.plot(x, y, styles[(si + ci) % len(styles)], color=f"C{seed % 10}", lw=1, label=name)
        ax.set_xlabel(swept)
        ax.set_ylabel(panel.label)
        ax.legend(fontsize=5, ncol=2)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def write_verdict(path: Path, fig: str, verdicts: list, ranges: dict) -> Path:
    lines = [f"figure={fig}", f"overall={'pass' if all(v.passed for v in verdicts) else 'fail'}",
             "range_source=auto (figure axis endpoints are not recoverable; see README)",
             f"edge_tail_fraction={EDGE_TAIL}", f"interior_fraction={INTERIOR}", "seed_policy=majority"]
    for v in verdicts:
        key = f"claim.{v.claim}"
        lines.append(f"{key}={'pass' if v.passed else 'fail'}")
        lines.append(f"{key}.description={v.description}")
        lines.append(f"{key}.seeds_passed={v.n_pass}/{len(v.per_seed)}")
        for seed, res in sorted(v.per_seed.items()):
            lines.append(f"{key}.seed.{seed}={'pass' if res.passed else 'fail'};{res.detail}")
    for label, per_seed in ranges.items():
        for seed, rg in sorted(per_seed.items()):
            lines.append(f"range.{label}.seed.{seed}=lower={_fmt(rg.lower)};upper={_fmt(rg.upper)};"
                         f"edge={_fmt(rg.bracket.edge)};lambda_edge={_fmt(rg.lambda_edge)};"
                         f"lambda_lower={_fmt(rg.lambda_lower)};lower_rule_met={str(rg.lower_rule_met).lower()}")
    path.write_text("\n".join(lines) + "\n")
    return path


@dataclass
class FigureResult:
    fig: str
    records: dict
    ranges: dict
    verdicts: list
    files: list

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def reproduce_figure(fig: str, out_dir, seeds=(0, 1, 2, 3, 4), jobs: int = 1, n_points: int = 12,
                     overrides: dict | None = None) -> FigureResult:
    """Run a figure's preset sweeps and write CSV, one SVG per panel and a verdict file.

    ``overrides`` replaces fields of every preset sweep (for example
    ``threshold`` or ``lambda_rel``).
    """
    p = preset(fig, seeds, n_points)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results, ranges, files = {}, {}, []
    for label, cfg in p.sweeps.items():
        if overrides:
            cfg = replace(cfg, **overrides)
        log.info("%s: sweeping %s (%s)", fig, label, cfg.swept)
        ctxs = build_contexts(cfg, jobs)
        ranges[label] = resolve_ranges(cfg, jobs, ctxs)
        recs = run_sweep(cfg, jobs, ranges=ranges[label], contexts=ctxs)
        results[label] = records_by_seed(recs)
        files.append(write_records_csv(recs, out / f"{fig}_{label}.csv"))
    swept = next(iter(p.sweeps.values())).swept
    for panel in p.panels:
        files.append(plot_panel(panel, results, out / f"{fig}_{panel.name}.svg", swept))
    verdicts = p.claims(results, list(seeds), ranges)
    files.append(write_verdict(out / f"{fig}_verdict.txt", fig, verdicts, ranges))
    return FigureResult(fig, results, ranges, verdicts, files)
