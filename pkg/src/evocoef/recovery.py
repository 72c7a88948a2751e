"""Ratio recovery of a time coefficient from two point traces.

For a pair of traces ``h1``, ``h2`` observed at the same point, the
coefficient is ``h1'/h2`` (first order in time) or ``h1''/h2`` (second
order).  This module differentiates the sampled trace, forms the ratio on
the nodes where ``h2`` is safely away from zero, and reports how well the
samples satisfy the hypotheses behind the formula.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import savgol_filter

from .core import CoefficientFn, Trace
from .errors import ConfigError, HypothesisError

DEFAULT_FLOOR_FACTOR = 1e-8

MODES = {"heat_alpha": ("alpha", 1), "wave_phi": ("phi", 2),
         "general_psi": ("psi", 1), "general_lambda": ("lambda", 2)}


@dataclass(frozen=True)
class DifferentiationSpec:
    """How to differentiate a sampled trace.

    ``method="central"`` uses second-order centered stencils inside and
    second-order one-sided stencils at the two end nodes.
    ``method="local_poly"`` fits a degree-``degree`` least-squares polynomial
    over ``window`` nodes (shifted inward near the ends) and differentiates
    the fit.
    """

    method: str = "central"
    order: int = 1
    window: int = 9
    degree: int = 3

    def __post_init__(self):
        if self.method not in ("central", "local_poly"):
            raise ConfigError("method must be 'central' or 'local_poly'", "method")
        if self.order not in (1, 2):
            raise ConfigError("derivative order must be 1 or 2", "order")
        if self.method == "local_poly":
            if not 2 <= self.degree <= 4:
                raise ConfigError("degree must lie in [2, 4]", "degree")
            if self.window % 2 == 0 or self.window < self.degree + 2:
                raise ConfigError("window must be odd and at least degree + 2", "window")

    def with_order(self, order: int) -> "DifferentiationSpec":
        return DifferentiationSpec(self.method, order, self.window, self.degree)


def differentiate(h: Trace, spec: DifferentiationSpec) -> Trace:
    """First or second time derivative of ``h`` at every node."""
    y = h.values
    n = y.size - 1
    dt = h.grid.dt
    if spec.method == "local_poly":
        if spec.window > n / 4:
            raise ConfigError(f"window {spec.window} exceeds n_steps/4 = {n / 4:g}",
                              "window")
        if y.size < 2 * spec.window + 1:
            raise ConfigError("trace too short for the window", "window")
        d = savgol_filter(y, spec.window, spec.degree, deriv=spec.order,
                          delta=dt, mode="interp")
        return Trace(d, h.grid, "derived")
    if y.size < 5:
        raise ConfigError("central differences need at least 5 nodes", "values")
    d = np.empty_like(y)
    if spec.order == 1:
        d[1:-1] = (y[2:] - y[:-2]) / (2.0 * dt)
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt)
        d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * dt)
    else:
        dt2 = dt * dt
        d[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / dt2
        d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / dt2
        d[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / dt2
    return Trace(d, h.grid, "derived")


@dataclass
class Diagnostics:
    min_abs_h2: float
    positivity_bound: float
    lipschitz_estimate: float
    h2_floor: float
    flagged: list = field(default_factory=list)
    sign_changes: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass(eq=False)
class RecoveryResult:
    coefficient: CoefficientFn
    valid: np.ndarray
    diagnostics: Diagnostics
    mode: str
    h2: np.ndarray
    c_min: float = 0.0

    @property
    def valid_interval(self) -> tuple:
        """First and last valid node (the valid set may have holes)."""
        idx = np.flatnonzero(self.valid)
        return int(idx[0]), int(idx[-1])

    @property
    def valid_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.valid)


def _sign_changes(h2: np.ndarray, start: int) -> list:
    s = np.sign(h2)
    k = np.flatnonzero(s[start:-1] * s[start + 1:] < 0) + start
    return [int(i) for i in k]


def recover(h1: Trace, h2: Trace, order: int, diff: Optional[DifferentiationSpec] = None,
            h2_floor: Optional[float] = None, c_min: float = 0.0,
            mode: Optional[str] = None) -> RecoveryResult:
    """Coefficient ``h1^(order) / h2`` on nodes with ``|h2| >= h2_floor``.

    ``h2_floor`` defaults to ``1e-8 * max|h2|``.  For ``order == 2`` the
    node ``t = 0`` is never valid (the hypotheses are stated on ``(0, T]``).
    Raises :class:`HypothesisError` when no node survives.
    """
    if h1.grid != h2.grid:
        raise ConfigError("traces must share a time grid", "grid")
    if order not in (1, 2):
        raise ConfigError("order must be 1 or 2", "order")
    if mode is None:
        mode = "heat_alpha" if order == 1 else "wave_phi"
    if mode not in MODES or MODES[mode][1] != order:
        raise ConfigError(f"mode {mode!r} does not match order {order}", "mode")
    diff = (diff or DifferentiationSpec()).with_order(order)
    y2 = h2.values
    delta = DEFAULT_FLOOR_FACTOR * np.max(np.abs(y2)) if h2_floor is None else float(h2_floor)
    if not delta > 0:
        raise HypothesisError("hypothesis h2 != 0 violated everywhere",
                              range(order - 1, y2.size))
    start = 1 if order == 2 else 0
    d1 = differentiate(h1, diff).values
    small = np.abs(y2) < delta
    valid = ~small
    valid[:start] = False
    ratio = np.full(y2.size, np.nan)
    ratio[valid] = d1[valid] / y2[valid]
    flagged = [int(k) for k in np.flatnonzero(small[start:]) + start]
    if not valid.any():
        raise HypothesisError("hypothesis h2 != 0 violated everywhere", flagged)
    vidx = np.flatnonzero(valid)
    vals = ratio[vidx]
    lip = 0.0
    if vidx.size > 1:
        consecutive = np.diff(vidx) == 1
        if consecutive.any():
            slopes = np.abs(np.diff(vals))[consecutive] / h1.grid.dt
            lip = float(np.max(slopes))
    diag = Diagnostics(min_abs_h2=float(np.min(np.abs(y2[vidx]))),
                       positivity_bound=float(np.min(vals)),
                       lipschitz_estimate=lip,
                       h2_floor=delta,
                       flagged=flagged,
                       sign_changes=_sign_changes(y2, start))
    if diag.positivity_bound < c_min:
        msg = (f"recovered coefficient drops to {diag.positivity_bound:.6g} "
               f"< C = {c_min:g}")
        diag.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    kind = MODES[mode][0]
    coef = CoefficientFn(ratio, h1.grid, kind)
    return RecoveryResult(coef, valid, diag, mode, y2.copy(), c_min)


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    value: Optional[float] = None
    witness: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "witness": list(self.witness), "note": self.note}


@dataclass
class DiagnosticsReport:
    theorem: str
    items: list

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def item(self, name: str) -> HypothesisCheck:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    @property
    def hard_failure(self) -> bool:
        """True when ``h2`` vanishes or changes sign inside the interval.

        For second-order pairs a run of small ``|h2|`` right after ``t = 0``
        does not count (``h2(0) = 0`` there by construction).
        """
        return not (self.item("h2_nonvanishing").passed and self.item("h2_sign").passed)

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "passed": self.passed,
                "items": [it.to_dict() for it in self.items]}


THEOREMS = ("thm22", "thm31", "thm41")


def validate_hypotheses(r: RecoveryResult, theorem: str) -> DiagnosticsReport:
    """Check the hypotheses of the selected recovery theorem on the samples.

    ``thm22`` is the first-order polyharmonic case, ``thm31`` the wave case
    (also used for second-order general operators), ``thm41`` the general
    first-order case.  Never raises; every failure names its nodes.
    """
    if theorem not in THEOREMS:
        raise ConfigError(f"unknown theorem {theorem!r}", "theorem")
    d = r.diagnostics
    note = f"|h2| >= {d.h2_floor:.3e} at every node"
    interior = list(d.flagged)
    if MODES[r.mode][1] == 2:
        # second-order pairs start from rest, so h2(0) = 0 and a leading run
        # of small |h2| is structural; only later dips count as failures
        k = 1
        while interior and interior[0] == k:
            interior.pop(0)
            k += 1
        if k > 1:
            note += f" after the leading run 1..{k - 1}"
    items = [
        HypothesisCheck("h2_nonvanishing", not interior,
                        d.min_abs_h2, list(d.flagged), note),
        HypothesisCheck("h2_sign", not d.sign_changes, None, list(d.sign_changes),
                        "h2 keeps one sign between consecutive nodes"),
    ]
    vidx = r.valid_nodes
    vals = r.coefficient.samples[vidx]
    if theorem in ("thm22", "thm31"):
        bad = vidx[~(vals > 0) | (vals < r.c_min)]
        if theorem == "thm31":
            name, note = "positivity", f"coefficient >= C > 0 with C = {d.positivity_bound:.6g}"
        else:
            name = "petrovskii"
            note = ("interpreted as positivity of alpha for the polyharmonic "
                    f"symbol; min alpha = {d.positivity_bound:.6g}")
        items.append(HypothesisCheck(name, bad.size == 0, d.positivity_bound,
                                     [int(k) for k in bad], note))
    if theorem == "thm31":
        items.append(HypothesisCheck("lipschitz", bool(np.isfinite(d.lipschitz_estimate)),
                                     d.lipschitz_estimate, [],
                                     "finite-difference estimate only; not a proof"))
    return DiagnosticsReport(theorem, items)
