"""Run configuration: TOML or JSON files validated into a :class:`RunConfig`."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError
from .experiment import DEFAULT_AUTO, AutoRange, SweepConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_N_SEEDS = 5

_SWEEP_FIELDS = {f.name: f for f in fields(SweepConfig)}
_AUTO_FIELDS = {f.name: f for f in fields(AutoRange)}
_RUN_KEYS = {"seed", "n_seeds", "out", "jobs", "tolerance"}

_INT_KEYS = {"n_nodes", "n_points", "transient", "discard", "fit", "test", "n_ref", "theiler",
             "entropy_window", "lyap_k", "lyap_skip", "max_doublings", "lower_refine", "seed", "n_seeds", "jobs"}
_BOOL_KEYS = {"use_bias", "normalize_target"}
_STR_KEYS = {"driver", "reservoir_kind", "swept", "out"}
# may be null (JSON) so that a resolved-config echo loads back unchanged
_OPTIONAL_KEYS = {"transient", "floor", "out", "jobs", "tolerance"}


@dataclass
class RunConfig:
    """Sweep settings plus run plumbing (output directory, seeds, parallelism)."""

    sweep: SweepConfig = field(default_factory=SweepConfig)
    seed: int = 0
    n_seeds: int = DEFAULT_N_SEEDS
    out: str | None = None
    jobs: int | None = None
    tolerance: float | None = None

    def resolved(self) -> dict:
        """Every effective setting, defaults included, as plain JSON-able data."""
        d = asdict(self.sweep)
        d["diagnostics"] = sorted(self.sweep.diagnostics)
        d["seeds"] = list(self.sweep.seeds)
        d["grid"] = list(self.sweep.grid) if self.sweep.grid is not None else None
        d["auto"] = asdict(self.sweep.auto_range)
        d.update(seed=self.seed, n_seeds=self.n_seeds, out=self.out, jobs=self.jobs,
                 tolerance=self.tolerance if self.tolerance is not None else self.sweep.auto_range.tolerance)
        return d


def _coerce(key: str, value):
    if value is None and key in _OPTIONAL_KEYS:
        return None
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false", key=key)
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string", key=key)
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer", key=key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number", key=key)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite", key=key)
    return value


def _parse_auto(table, swept: str) -> AutoRange:
    if not isinstance(table, dict):
        raise ConfigError("auto must be a table", key="auto")
    kw = {}
    for k, v in table.items():
        if k not in _AUTO_FIELDS:
            raise ConfigError(f"unknown key 'auto.{k}'", key=f"auto.{k}")
        kw[k] = _coerce(k, v)
    base = DEFAULT_AUTO.get(swept, DEFAULT_AUTO["p1"])
    try:
        auto = replace(base, **kw)
    except TypeError as exc:
        raise ConfigError(str(exc), key="auto") from exc
    for k in ("step", "tolerance"):
        if not getattr(auto, k) > 0:
            raise ConfigError(f"auto.{k} must be positive", key=f"auto.{k}")
    return auto


def config_from_mapping(data: dict) -> RunConfig:
    """Validate a parsed mapping; unknown keys and bad values raise :class:`ConfigError`."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table/object at top level")
    sweep_kw, run_kw = {}, {}
    auto_table = None
    for key, value in data.items():
        if key == "auto":
            auto_table = value
        elif key == "grid":
            if value is None:
                continue
            if not isinstance(value, list) or len(value) != 3:
                raise ConfigError("grid must be [min, max, n_points]", key="grid")
            lo, hi = _coerce("grid", value[0]), _coerce("grid", value[1])
            if isinstance(value[2], bool) or not isinstance(value[2], int):
                raise ConfigError("grid n_points must be an integer", key="grid")
            sweep_kw["grid"] = (lo, hi, value[2])
        elif key == "seeds":
            if not isinstance(value, list) or not all(isinstance(s, int) and not isinstance(s, bool) for s in value):
                raise ConfigError("seeds must be a list of integers", key="seeds")
            sweep_kw["seeds"] = tuple(value)
        elif key == "diagnostics":
            if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
                raise ConfigError("diagnostics must be a list of names", key="diagnostics")
            sweep_kw["diagnostics"] = frozenset(value)
        elif key in _RUN_KEYS:
            run_kw[key] = _coerce(key, value)
        elif key in _SWEEP_FIELDS:
            sweep_kw[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown key '{key}'", key=key)
    if auto_table is not None:
        sweep_kw["auto"] = _parse_auto(auto_table, sweep_kw.get("swept", "p1"))
    n_seeds = run_kw.get("n_seeds", DEFAULT_N_SEEDS)
    if n_seeds < 1:
        raise ConfigError("n_seeds must be >= 1", key="n_seeds")
    if run_kw.get("jobs") is not None and run_kw["jobs"] < 1:
        raise ConfigError("jobs must be >= 1", key="jobs")
    if run_kw.get("tolerance") is not None and not run_kw["tolerance"] > 0:
        raise ConfigError("tolerance must be positive", key="tolerance")
    seed = run_kw.get("seed", 0)
    if "seeds" not in sweep_kw:
        sweep_kw["seeds"] = tuple(seed + i for i in range(n_seeds))
    for k in ("sigma", "n_nodes", "dt"):
        # name the key before the generic validator sees it
        if k in sweep_kw and not sweep_kw[k] > 0:
            raise ConfigError(f"{k} must be positive", key=k)
    sweep = SweepConfig(**sweep_kw)
    return RunConfig(sweep=sweep, **run_kw)


def with_seed(cfg: RunConfig, seed: int) -> RunConfig:
    """Re-derive every network seed from a single base seed."""
    n = len(cfg.sweep.seeds)
    return replace(cfg, seed=seed, sweep=replace(cfg.sweep, seeds=tuple(seed + i for i in range(n))))


def load_config(path) -> RunConfig:
    """Read a ``.toml`` or ``.json`` file (by suffix; other suffixes try TOML then JSON)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    suffix = path.suffix.lower()
    try:
        if suffix == ".json":
            data = json.loads(text)
        elif suffix == ".toml":
            data = tomllib.loads(text)
        else:
            try:
                data = tomllib.loads(text)
            except tomllib.TOMLDecodeError:
                data = json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_mapping(data)


def write_resolved(cfg: RunConfig, out_dir, extra: dict | None = None) -> Path:
    """Echo the effective configuration as ``resolved-config.json`` for provenance."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = cfg.resolved()
    if extra:
        data.update(extra)
    path = out / "resolved-config.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path
