"""``edgescope`` command line: simulate, sweep, edge, reproduce, validate-config."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .config import RunConfig, load_config, with_seed, write_resolved
from .errors import ConfigError, EdgescopeError, InvalidInputError
from .experiment import (
    build_context,
    build_contexts,
    default_jobs,
    evaluate_point,
    format_value,
    locate_edge,
    resolve_ranges,
    run_sweep,
    write_records_csv,
)
from .figures import FIGURES, reproduce_figure
from .reservoir import run_reservoir

log = logging.getLogger("edgescope")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
OUT_ENV = "EDGESCOPE_OUT"
DEFAULT_OUT = "edgescope-out"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the validation code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, config_required: bool = False):
    p.add_argument("--config", required=config_required, help="TOML or JSON run configuration")
    p.add_argument("--seed", type=int, help="base seed; network seeds are seed, seed+1, ...")
    p.add_argument("--out", help=f"output directory (falls back to ${OUT_ENV}, then ./{DEFAULT_OUT})")
    p.add_argument("--jobs", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--threshold", type=float, help="divergence threshold on |r_i|")
    p.add_argument("--lambda-rel", dest="lambda_rel", type=float, help="relative ridge parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgescope", description="Polynomial reservoir computers at the edge of stability.")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("simulate", help="one run at the configured parameters plus all diagnostics")
    _common(p)
    p = sub.add_parser("sweep", help="single-parameter sweep from a config file")
    _common(p, config_required=True)
    p = sub.add_parser("edge", help="locate the edge of stability by bisection")
    _common(p, config_required=True)
    p.add_argument("--tolerance", type=float, help="bisection tolerance")
    p = sub.add_parser("reproduce", help="run a figure preset and write CSV, SVG and verdict files")
    p.add_argument("figure", choices=FIGURES)
    _common(p)
    p.add_argument("--n-seeds", dest="n_seeds", type=int, default=5, help="network seeds (default 5)")
    p.add_argument("--n-points", dest="n_points", type=int, default=12, help="grid points per seed")
    p = sub.add_parser("validate-config", help="check a config file and print the resolved settings")
    p.add_argument("path", nargs="?", help="config file (or use --config)")
    p.add_argument("--config", dest="config_flag")
    return parser


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    out = args.out or (cfg.out if cfg is not None else None) or os.environ.get(OUT_ENV) or DEFAULT_OUT
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg = with_seed(cfg, args.seed)
    sweep_kw = {}
    if args.threshold is not None:
        sweep_kw["threshold"] = args.threshold
    if args.lambda_rel is not None:
        sweep_kw["lambda_rel"] = args.lambda_rel
    if sweep_kw:
        cfg = replace(cfg, sweep=replace(cfg.sweep, **sweep_kw))
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1", key="jobs")
        cfg = replace(cfg, jobs=args.jobs)
    return cfg


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return _apply_flags(cfg, args)


def _jobs(cfg: RunConfig) -> int:
    return cfg.jobs if cfg.jobs is not None else default_jobs()


def _write_kv(path: Path, items) -> Path:
    path.write_text("".join(f"{k}={v}\n" for k, v in items))
    return path


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    sweep = cfg.sweep
    seed = sweep.seeds[0]
    value = getattr(sweep, sweep.swept)
    ctx = build_context(sweep, seed)
    rec = evaluate_point(ctx, sweep, value)
    run = run_reservoir(ctx.net, sweep.params_at(value), ctx.train.input, threshold=sweep.threshold)
    run.to_csv(out / "simulate_states.csv", dt=sweep.params_at(value).time_step)
    ctx.train.to_csv(out / "simulate_driver.csv")
    _write_kv(out / "simulate_report.txt", [(k, format_value(v)) for k, v in asdict(rec).items()])
    write_resolved(cfg, out, {"command": "simulate", "out": str(out)})
    log.info("simulate: stable=%s delta_tx=%s", rec.stable, rec.delta_tx)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    jobs = _jobs(cfg)
    write_resolved(cfg, out, {"command": "sweep", "out": str(out)})
    contexts = build_contexts(cfg.sweep, jobs)
    ranges = None
    if cfg.sweep.grid is None:
        ranges = resolve_ranges(cfg.sweep, jobs, contexts)
        _write_kv(out / "sweep_ranges.txt",
                  [(f"seed.{s}", f"lower={format_value(r.lower)};upper={format_value(r.upper)};"
                                 f"edge={format_value(r.bracket.edge)};lower_rule_met={str(r.lower_rule_met).lower()}")
                   for s, r in sorted(ranges.items())])
    records = run_sweep(cfg.sweep, jobs, ranges=ranges, contexts=contexts)
    write_records_csv(records, out / "sweep.csv")
    log.info("sweep: %d records written to %s", len(records), out / "sweep.csv")
    return EXIT_OK


def cmd_edge(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    tol = args.tolerance if args.tolerance is not None else cfg.tolerance
    if tol is not None and not tol > 0:
        raise ConfigError("tolerance must be positive", key="tolerance")
    write_resolved(cfg, out, {"command": "edge", "out": str(out)})
    items = []
    for seed in cfg.sweep.seeds:
        br = locate_edge(cfg.sweep, tol, seed=seed)
        items += [(f"edge.seed.{seed}", format_value(br.edge)),
                  (f"stable.seed.{seed}", format_value(br.stable)),
                  (f"unstable.seed.{seed}", format_value(br.unstable))]
        log.info("edge: seed %d -> %s = %.6g", seed, cfg.sweep.swept, br.edge)
    items.append(("tolerance", format_value(tol if tol is not None else cfg.sweep.auto_range.tolerance)))
    _write_kv(out / "edge.txt", items)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    if args.n_seeds < 1 or args.n_points < 2:
        raise ConfigError("need --n-seeds >= 1 and --n-points >= 2", key="n_points")
    seed = args.seed if args.seed is not None else cfg.seed
    seeds = tuple(seed + i for i in range(args.n_seeds))
    overrides = {}
    if args.threshold is not None:
        overrides["threshold"] = args.threshold
    if args.lambda_rel is not None:
        overrides["lambda_rel"] = args.lambda_rel
    res = reproduce_figure(args.figure, out, seeds=seeds, jobs=_jobs(cfg), n_points=args.n_points,
                           overrides=overrides or None)
    write_resolved(replace(cfg, seed=seed, n_seeds=args.n_seeds), out,
                   {"command": "reproduce", "figure": args.figure, "out": str(out),
                    "seeds": list(seeds), "n_points": args.n_points, "overrides": overrides})
    log.info("%s: overall %s", args.figure, "pass" if res.passed else "fail")
    return EXIT_OK


def cmd_validate(args) -> int:
    path = args.path or args.config_flag
    if not path:
        raise ConfigError("no config file given")
    cfg = load_config(path)
    for k, v in sorted(cfg.resolved().items()):
        print(f"{k}={v}")
    print("config ok")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "edge": cmd_edge,
            "reproduce": cmd_reproduce, "validate-config": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        key = f" (key: {exc.key})" if exc.key else ""
        print(f"edgescope: invalid configuration{key}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvalidInputError as exc:
        print(f"edgescope: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EdgescopeError as exc:
        print(f"edgescope: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"edgescope: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
