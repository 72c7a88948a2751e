"""Experiment configuration: strict JSON parsing, defaults, overrides.

A config document has the sections ``problem``, ``grids``, ``datum``,
``coefficient`` (all required) and ``noise``, ``recovery``, ``output``
(optional).  Unknown keys are errors.  Defaults::

    problem:     m = 1, symbol = null, q = null (datum center)
    grids:       levels = null (n_steps/4, n_steps/2, n_steps)
    datum:       center = origin, radius = 1, width = 1, amplitude = 1,
                 wavenumbers = null, phase = "sin", margin = null,
                 components = []
    noise:       sigma_rel = 0, seed = 0
    recovery:    method = "central", window = 9, degree = 3,
                 h2_floor_rel = 1e-8, h2_floor = null, c_min = 0,
                 traces = null
    output:      dir = "out"
"""
from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from .core import ClosedForm, SpaceGrid, TimeGrid
from .errors import ConfigError

PROBLEM_KINDS = ("heat", "wave", "general_first", "general_second")
DATUM_KINDS = ("bump", "gaussian", "mode", "sum")


@dataclass(frozen=True)
class ProblemConfig:
    kind: str
    m: int = 1
    symbol: Optional[str] = None
    q: Optional[tuple] = None


@dataclass(frozen=True)
class GridsConfig:
    dim: int
    half_width: float
    points_per_dim: int
    t_end: float
    n_steps: int
    levels: Optional[tuple] = None

    @property
    def space(self) -> SpaceGrid:
        return SpaceGrid(self.dim, self.half_width, self.points_per_dim)

    @property
    def time(self) -> TimeGrid:
        return TimeGrid(self.t_end, self.n_steps)


@dataclass(frozen=True)
class DatumConfig:
    kind: str = "bump"
    center: Optional[tuple] = None
    radius: float = 1.0
    width: float = 1.0
    amplitude: float = 1.0
    wavenumbers: Optional[tuple] = None
    phase: str = "sin"
    margin: Optional[float] = None
    components: tuple = ()


@dataclass(frozen=True)
class NoiseConfig:
    sigma_rel: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class RecoveryConfig:
    method: str = "central"
    window: int = 9
    degree: int = 3
    h2_floor_rel: float = 1e-8
    h2_floor: Optional[float] = None
    c_min: float = 0.0
    traces: Optional[str] = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemConfig
    grids: GridsConfig
    datum: DatumConfig
    coefficient: ClosedForm
    noise: NoiseConfig = NoiseConfig()
    recovery: RecoveryConfig = RecoveryConfig()
    output: OutputConfig = OutputConfig()

    def replace(self, **sections) -> "ExperimentConfig":
        d = config_to_dict(self)
        for name, values in sections.items():
            d[name] = {**d.get(name, {}), **values}
        return config_from_dict(d)


_SECTIONS = {"problem": ProblemConfig, "grids": GridsConfig, "datum": DatumConfig,
             "noise": NoiseConfig, "recovery": RecoveryConfig, "output": OutputConfig}
_REQUIRED = ("problem", "grids", "datum", "coefficient")


def _vector(value, where):
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{where}: expected a list of numbers", where)
    return tuple(float(v) for v in value)


def _section(cls, raw, where):
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object", where)
    names = {f.name for f in fields(cls)}
    for key in raw:
        if key not in names:
            raise ConfigError(f"{where}: unknown key {key!r}", f"{where}.{key}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}", where) from None


def _check_number(value, where, integer=False, positive=False, nonneg=False):
    ok_type = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok_type:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{where} must be {kind}", where)
    name = where.rsplit(".", 1)[-1]
    if positive and not value > 0:
        raise ConfigError(f"{name} must be positive", where)
    if nonneg and not value >= 0:
        raise ConfigError(f"{name} must be nonnegative", where)


def _datum(raw, where, nested=False) -> DatumConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object", where)
    raw = dict(raw)
    comps = raw.pop("components", [])
    d = _section(DatumConfig, raw, where)
    if d.kind not in DATUM_KINDS:
        raise ConfigError(f"{where}.kind must be one of {DATUM_KINDS}", f"{where}.kind")
    if d.kind == "sum":
        if nested:
            raise ConfigError(f"{where}: nested sums are not allowed", where)
        if not comps:
            raise ConfigError(f"{where}.components must be a nonempty list",
                              f"{where}.components")
    elif comps:
        raise ConfigError(f"{where}.components is only valid for kind 'sum'",
                          f"{where}.components")
    for key in ("radius", "width"):
        _check_number(getattr(d, key), f"{where}.{key}", positive=True)
    _check_number(d.amplitude, f"{where}.amplitude")
    if d.margin is not None:
        _check_number(d.margin, f"{where}.margin", nonneg=True)
    if d.phase not in ("sin", "cos"):
        raise ConfigError(f"{where}.phase must be 'sin' or 'cos'", f"{where}.phase")
    parts = tuple(_datum(c, f"{where}.components[{i}]", nested=True)
                  for i, c in enumerate(comps or []))
    return DatumConfig(d.kind, _vector(d.center, f"{where}.center"), float(d.radius),
                       float(d.width), float(d.amplitude),
                       _vector(d.wavenumbers, f"{where}.wavenumbers"), d.phase,
                       None if d.margin is None else float(d.margin), parts)


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Validate a parsed document and build the config, filling defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for key in doc:
        if key not in _SECTIONS and key != "coefficient":
            raise ConfigError(f"unknown key {key!r}", key)
    for key in _REQUIRED:
        if key not in doc:
            raise ConfigError(f"missing section {key!r}", key)

    p = _section(ProblemConfig, doc["problem"], "problem")
    if p.kind not in PROBLEM_KINDS:
        raise ConfigError(f"problem.kind must be one of {PROBLEM_KINDS}", "problem.kind")
    _check_number(p.m, "problem.m", integer=True, positive=True)
    if p.kind.startswith("general") and not p.symbol:
        raise ConfigError("problem.symbol is required for general problems", "problem.symbol")
    if p.symbol is not None and not isinstance(p.symbol, str):
        raise ConfigError("problem.symbol must be a string", "problem.symbol")
    p = ProblemConfig(p.kind, p.m, p.symbol, _vector(p.q, "problem.q"))

    g = _section(GridsConfig, doc["grids"], "grids")
    _check_number(g.dim, "grids.dim", integer=True, positive=True)
    _check_number(g.half_width, "grids.half_width", positive=True)
    _check_number(g.points_per_dim, "grids.points_per_dim", integer=True, positive=True)
    _check_number(g.t_end, "grids.t_end", positive=True)
    _check_number(g.n_steps, "grids.n_steps", integer=True, positive=True)
    levels = None
    if g.levels is not None:
        if not isinstance(g.levels, (list, tuple)):
            raise ConfigError("grids.levels must be a list of integers", "grids.levels")
        for i, lv in enumerate(g.levels):
            _check_number(lv, f"grids.levels[{i}]", integer=True, positive=True)
        levels = tuple(g.levels)
    g = GridsConfig(g.dim, float(g.half_width), g.points_per_dim, float(g.t_end),
                    g.n_steps, levels)
    try:
        space = g.space
        g.time
    except ConfigError as exc:
        raise ConfigError(f"grids.{exc.field}: {exc}", f"grids.{exc.field}") from None

    datum = _datum(doc["datum"], "datum")
    coef_raw = doc["coefficient"]
    if not isinstance(coef_raw, dict) or "family" not in coef_raw:
        raise ConfigError("coefficient: expected an object with a 'family'", "coefficient")
    params = {k: v for k, v in coef_raw.items() if k != "family"}
    for k, v in params.items():
        _check_number(v, f"coefficient.{k}")
    try:
        coef = ClosedForm(coef_raw["family"], {k: float(v) for k, v in params.items()})
    except ConfigError as exc:
        raise ConfigError(f"coefficient.{exc.field}: {exc}", f"coefficient.{exc.field}") from None

    noise = _section(NoiseConfig, doc.get("noise", {}), "noise")
    _check_number(noise.sigma_rel, "noise.sigma_rel", nonneg=True)
    if not noise.sigma_rel < 0.1:
        raise ConfigError("noise.sigma_rel must be below 0.1", "noise.sigma_rel")
    _check_number(noise.seed, "noise.seed", integer=True, nonneg=True)
    noise = NoiseConfig(float(noise.sigma_rel), noise.seed)

    rec = _section(RecoveryConfig, doc.get("recovery", {}), "recovery")
    if rec.method not in ("central", "local_poly"):
        raise ConfigError("recovery.method must be 'central' or 'local_poly'", "recovery.method")
    _check_number(rec.window, "recovery.window", integer=True, positive=True)
    _check_number(rec.degree, "recovery.degree", integer=True, positive=True)
    _check_number(rec.h2_floor_rel, "recovery.h2_floor_rel", positive=True)
    if rec.h2_floor is not None:
        _check_number(rec.h2_floor, "recovery.h2_floor", positive=True)
    _check_number(rec.c_min, "recovery.c_min", nonneg=True)
    if rec.traces is not None and not isinstance(rec.traces, str):
        raise ConfigError("recovery.traces must be a path string", "recovery.traces")
    rec = RecoveryConfig(rec.method, rec.window, rec.degree, float(rec.h2_floor_rel),
                         None if rec.h2_floor is None else float(rec.h2_floor),
                         float(rec.c_min), rec.traces)

    out = _section(OutputConfig, doc.get("output", {}), "output")
    if not isinstance(out.dir, str):
        raise ConfigError("output.dir must be a path string", "output.dir")

    cfg = ExperimentConfig(p, g, datum, coef, noise, rec, out)
    _check_geometry(cfg, space)
    return cfg


def _check_geometry(cfg: ExperimentConfig, space: SpaceGrid):
    dim = space.dim
    for where, vec in (("problem.q", cfg.problem.q), ("datum.center", cfg.datum.center)):
        if vec is not None and len(vec) != dim:
            raise ConfigError(f"{where} must have {dim} components", where)
    for i, c in enumerate(cfg.datum.components):
        if c.center is not None and len(c.center) != dim:
            raise ConfigError(f"datum.components[{i}].center must have {dim} components",
                              f"datum.components[{i}].center")


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Effective config as a JSON-ready document (defaults filled in)."""
    out = {}
    for name in ("problem", "grids", "datum", "noise", "recovery", "output"):
        out[name] = _plain(asdict(getattr(cfg, name)))
    comps = out["datum"].pop("components")
    if comps:
        out["datum"]["components"] = [
            {k: v for k, v in c.items() if k != "components"} for c in comps]
    out["coefficient"] = cfg.coefficient.to_dict()
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``key.path=value`` strings onto a raw document (values are JSON)."""
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value", item)
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object", key)
        node[parts[-1]] = _parse_value(text)
    return doc


def load_config(path, overrides=()) -> ExperimentConfig:
    """Read, override and validate a JSON config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", "config")
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}", "config") from None
    return config_from_dict(apply_overrides(doc, overrides))


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)


def levels_for(cfg: ExperimentConfig) -> list:
    if cfg.grids.levels:
        return list(cfg.grids.levels)
    n = cfg.grids.n_steps
    if n % 4:
        raise ConfigError("default levels need n_steps divisible by 4", "grids.n_steps")
    return [n // 4, n // 2, n]


__all__ = ["ExperimentConfig", "ProblemConfig", "GridsConfig", "DatumConfig",
           "NoiseConfig", "RecoveryConfig", "OutputConfig", "config_from_dict",
           "config_to_dict", "apply_overrides", "load_config", "dump_config",
           "levels_for"]
