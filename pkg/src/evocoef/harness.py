"""Manufactured-truth experiments: paired forward problems, traces, recovery.

An experiment solves both Cauchy problems of a pair with the true
coefficient, observes them at ``q``, optionally perturbs the traces,
recovers the coefficient with the ratio formula and scores it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_to_dict
from .core import (CoefficientFn, Field, TimeGrid, Trace, apply_polyharmonic,
                   bump_datum, gaussian_datum, gaussian_support_radius,
                   mode_datum, trace_at)
from .errors import ConfigError
from .recovery import (DifferentiationSpec, DiagnosticsReport, RecoveryResult,
                       recover, validate_hypotheses)
from .spectral import (MultiplierSymbol, solve_general_first,
                       solve_general_second, solve_heat, solve_wave,
                       symbol_from_id)

# problem kind -> (coefficient kind, time order, recovery mode, theorem)
PROBLEM_TABLE = {
    "heat": ("alpha", 1, "heat_alpha", "thm22"),
    "wave": ("phi", 2, "wave_phi", "thm31"),
    "general_first": ("psi", 1, "general_psi", "thm41"),
    "general_second": ("lambda", 2, "general_lambda", "thm31"),
}

ORDER_FLOOR = 1e-12


@dataclass(eq=False)
class CauchyProblem:
    """One forward problem of a pair; ``position``/``velocity`` are initial data."""

    kind: str
    coefficient: CoefficientFn
    time: TimeGrid
    position: Optional[Field] = None
    velocity: Optional[Field] = None
    m: int = 1
    symbol: Optional[MultiplierSymbol] = None
    c_min: float = 0.0

    def solve(self):
        if self.kind == "heat":
            return solve_heat(self.position, self.coefficient, self.m, self.time)
        if self.kind == "general_first":
            return solve_general_first(self.position, self.coefficient, self.symbol,
                                       self.time)
        if self.kind == "wave":
            zero = Field(np.zeros(self.velocity.grid.shape), self.velocity.grid)
            return solve_wave(zero, self.velocity, self.coefficient, self.time, self.c_min)
        return solve_general_second(self.velocity, self.coefficient, self.symbol,
                                    self.time, self.c_min)


def make_datum(cfg: ExperimentConfig) -> Field:
    grid = cfg.grids.space
    d = cfg.datum
    parts = d.components if d.kind == "sum" else (d,)
    total = np.zeros(grid.shape)
    for part in parts:
        center = part.center if part.center is not None else (0.0,) * grid.dim
        if part.kind == "bump":
            f = bump_datum(grid, center, part.radius, part.amplitude, part.margin)
        elif part.kind == "gaussian":
            f = gaussian_datum(grid, center, part.width, part.amplitude, part.margin)
        elif part.kind == "mode":
            if part.wavenumbers is None:
                raise ConfigError("datum.wavenumbers is required for kind 'mode'",
                                  "datum.wavenumbers")
            f = mode_datum(grid, part.wavenumbers, part.amplitude, part.phase)
        else:
            raise ConfigError(f"datum kind {part.kind!r} cannot be nested", "datum.kind")
        total = total + f.values
    return Field(total, grid)


def _observation(cfg: ExperimentConfig):
    grid = cfg.grids.space
    d = cfg.datum
    q = cfg.problem.q
    if q is None:
        first = d.components[0] if d.kind == "sum" else d
        q = first.center if first.center is not None else (0.0,) * grid.dim
    point = grid.observation_point(q)
    # q must sit inside the support of at least one component
    parts = d.components if d.kind == "sum" else (d,)
    qv = np.asarray(point.q)
    inside = False
    for part in parts:
        if part.kind == "mode":
            inside = True
            continue
        c = np.asarray(part.center if part.center is not None else (0.0,) * grid.dim)
        reach = part.radius if part.kind == "bump" else gaussian_support_radius(part.width)
        inside |= float(np.linalg.norm(qv - c)) < reach
    if not inside:
        raise ConfigError("observation point lies outside the datum support", "problem.q")
    return point


def truth_coefficient(cfg: ExperimentConfig, tg: Optional[TimeGrid] = None) -> CoefficientFn:
    kind = PROBLEM_TABLE[cfg.problem.kind][0]
    return CoefficientFn.from_closed_form(cfg.coefficient, tg or cfg.grids.time, kind)


def build_pair(cfg: ExperimentConfig):
    """The two forward problems whose traces give ``h1`` and ``h2``.

    heat: ``v(0) = -(-Delta)^m u0``; wave: ``w_t(0) = Delta u1``;
    general first order: ``v(0) = L_x[u0]``; general second order:
    ``v_t(0) = L_x[u1]``.  Second-order pairs start from rest.
    """
    kind = cfg.problem.kind
    tg = cfg.grids.time
    coef = truth_coefficient(cfg, tg)
    datum = make_datum(cfg)
    c_min = cfg.recovery.c_min
    if kind == "heat":
        m = cfg.problem.m
        second = -apply_polyharmonic(datum, m)
        return (CauchyProblem(kind, coef, tg, position=datum, m=m),
                CauchyProblem(kind, coef, tg, position=second, m=m))
    if kind == "wave":
        second = -apply_polyharmonic(datum, 1)
        return (CauchyProblem(kind, coef, tg, velocity=datum, c_min=c_min),
                CauchyProblem(kind, coef, tg, velocity=second, c_min=c_min))
    stability = "dissipative" if kind == "general_first" else "oscillatory"
    sym = symbol_from_id(cfg.problem.symbol, stability)
    second = sym.apply(datum)
    if kind == "general_first":
        return (CauchyProblem(kind, coef, tg, position=datum, symbol=sym),
                CauchyProblem(kind, coef, tg, position=second, symbol=sym))
    return (CauchyProblem(kind, coef, tg, velocity=datum, symbol=sym, c_min=c_min),
            CauchyProblem(kind, coef, tg, velocity=second, symbol=sym, c_min=c_min))


def add_noise(h: Trace, sigma_rel: float, seed: int, stream: int = 0) -> Trace:
    """``h + sigma_rel * max|h| * g`` with standard normal ``g`` per node.

    Node ``k`` uses the Philox outputs ``2k`` and ``2k+1`` under the key
    ``(seed, stream)``, so each perturbation depends only on
    ``(seed, stream, k)``.  ``sigma_rel == 0`` returns ``h`` unchanged.
    """
    if sigma_rel < 0:
        raise ConfigError("sigma_rel must be nonnegative", "sigma_rel")
    if sigma_rel == 0:
        return h
    n = len(h)
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    raw = bitgen.random_raw(2 * n).reshape(n, 2)
    u = ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0 ** -53
    g = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    scale = sigma_rel * np.max(np.abs(h.values))
    return Trace(h.values + scale * g, h.grid, h.label)


def error_metrics(recovered: CoefficientFn, truth: CoefficientFn, valid) -> dict:
    """``max_rel = max|r - t| / max|t|`` and ``l2_rel`` over the valid nodes."""
    if recovered.grid != truth.grid:
        raise ConfigError("recovered and true coefficient live on different grids", "grid")
    valid = np.asarray(valid)
    idx = np.flatnonzero(valid) if valid.dtype == bool else valid.astype(int)
    if idx.size == 0:
        raise ConfigError("empty valid range", "valid")
    r = recovered.samples[idx]
    t = truth.samples[idx]
    eps = np.finfo(float).eps
    max_rel = float(np.max(np.abs(r - t)) / max(np.max(np.abs(t)), eps))
    denom = float(np.sum(t * t))
    l2_rel = float(np.sqrt(np.sum((r - t) ** 2) / max(denom, eps)))
    return {"max_rel": max_rel, "l2_rel": l2_rel}


def diff_spec(cfg: ExperimentConfig) -> DifferentiationSpec:
    order = PROBLEM_TABLE[cfg.problem.kind][1]
    rc = cfg.recovery
    return DifferentiationSpec(rc.method, order, rc.window, rc.degree)


def recover_from_traces(cfg: ExperimentConfig, h1: Trace, h2: Trace):
    """Ratio recovery and hypothesis report using the config's settings."""
    _, order, mode, theorem = PROBLEM_TABLE[cfg.problem.kind]
    rc = cfg.recovery
    floor = rc.h2_floor
    if floor is None:
        floor = rc.h2_floor_rel * float(np.max(np.abs(h2.values)))
    result = recover(h1, h2, order, diff_spec(cfg), floor, rc.c_min, mode)
    return result, validate_hypotheses(result, theorem)


@dataclass(eq=False)
class ExperimentReport:
    times: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    truth: np.ndarray
    recovered: np.ndarray
    valid: np.ndarray
    metrics: dict
    diagnostics: DiagnosticsReport
    result: RecoveryResult
    config: dict
    seed: int
    version: str = __version__
    convergence: list = field(default_factory=list)

    @property
    def max_rel(self) -> float:
        return self.metrics["max_rel"]

    def to_dict(self) -> dict:
        d = self.result.diagnostics
        return {
            "metrics": self.metrics,
            "diagnostics": {
                **self.diagnostics.to_dict(),
                "min_abs_h2": d.min_abs_h2,
                "positivity_bound": d.positivity_bound,
                "lipschitz_estimate": d.lipschitz_estimate,
                "h2_floor": d.h2_floor,
                "valid_interval": list(self.result.valid_interval),
                "valid_count": int(np.count_nonzero(self.valid)),
                "warnings": list(d.warnings),
            },
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "convergence": self.convergence,
        }


def generate_traces(cfg: ExperimentConfig):
    """Clean traces ``(h1, h2)`` of the configured pair at the observation point."""
    q = _observation(cfg)
    first, second = build_pair(cfg)
    h1 = trace_at(first.solve(), q)
    h2 = trace_at(second.solve(), q)
    return h1, Trace(h2.values, h2.grid, "h2")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Forward-solve, observe, perturb, recover and score one configuration.

    Noise is added to both traces with independent streams.  Hypothesis
    failures are reported in the diagnostics; only an empty valid set
    raises.
    """
    h1, h2 = generate_traces(cfg)
    nz = cfg.noise
    h1 = add_noise(h1, nz.sigma_rel, nz.seed, stream=1)
    h2 = add_noise(h2, nz.sigma_rel, nz.seed, stream=2)
    result, report = recover_from_traces(cfg, h1, h2)
    truth = truth_coefficient(cfg)
    metrics = error_metrics(result.coefficient, truth, result.valid)
    return ExperimentReport(h1.grid.nodes, h1.values, h2.values, truth.samples,
                            result.coefficient.samples, result.valid, metrics, report,
                            result, config_to_dict(cfg), nz.seed)


@dataclass(frozen=True)
class ConvergenceRow:
    n_steps: int
    dt: float
    error: float
    order: Optional[float]

    def to_dict(self) -> dict:
        return {"n_steps": self.n_steps, "dt": self.dt, "error": self.error,
                "order": self.order}


def convergence_study(cfg: ExperimentConfig, levels) -> list:
    """Max relative error of clean, centrally differentiated runs per level.

    ``order`` is ``log2(e_prev / e)``; it is None on the first row and
    whenever either error is below 1e-12 (roundoff floor).
    """
    levels = [int(v) for v in levels]
    if len(levels) < 3 or any(b != 2 * a for a, b in zip(levels, levels[1:])):
        raise ConfigError("need at least 3 levels, each double the previous", "levels")
    rows = []
    prev = None
    for n in levels:
        run = cfg.replace(grids={"n_steps": n, "levels": None},
                          noise={"sigma_rel": 0.0}, recovery={"method": "central"})
        err = run_experiment(run).max_rel
        order = None
        if prev is not None and prev > ORDER_FLOOR and err > ORDER_FLOOR:
            order = math.log2(prev / err)
        rows.append(ConvergenceRow(n, cfg.grids.t_end / n, err, order))
        prev = err
    return rows
