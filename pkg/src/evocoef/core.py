"""Grids, coefficient functions, fields, traces and shared numerics.

Space is a periodic box ``[-L, L)^n`` sampled on ``N`` points per axis;
the node ``j`` of an axis sits at ``-L + j*h`` with ``h = 2L/N``, so the
origin is always a node.  Time is the uniform grid ``t_k = k*T/n_steps``.

Spectral conventions follow :func:`numpy.fft.fftn` on those node arrays,
with angular frequencies ``xi = (pi/L) * k``, ``k = -N/2 .. N/2-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError

COEFFICIENT_KINDS = ("alpha", "phi", "psi", "lambda")
TRACE_LABELS = ("h1", "h2", "derived")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform discretization of ``[0, t_end]`` with ``n_steps`` intervals."""

    t_end: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError("t_end must be positive", "t_end")
        if int(self.n_steps) != self.n_steps or self.n_steps <= 0:
            raise ConfigError("n_steps must be positive", "n_steps")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "t_end", float(self.t_end))

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_steps + 1)

    def __len__(self):
        return self.n_steps + 1


@dataclass(frozen=True)
class SpaceGrid:
    """Periodic box ``[-half_width, half_width)^dim`` with an even point count."""

    dim: int
    half_width: float
    points_per_dim: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigError("dim must be 1, 2 or 3", "dim")
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise ConfigError("half_width must be positive", "half_width")
        n = self.points_per_dim
        if int(n) != n or n <= 0 or n % 2:
            raise ConfigError("points_per_dim must be a positive even integer",
                              "points_per_dim")
        object.__setattr__(self, "points_per_dim", int(n))
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_dim

    @property
    def shape(self) -> tuple:
        return (self.points_per_dim,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_dim ** self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return -self.half_width + self.spacing * np.arange(self.points_per_dim)

    @cached_property
    def coords(self) -> tuple:
        """Node coordinates, one ``shape``-sized array per dimension."""
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies along one axis, in FFT order."""
        k = np.fft.fftfreq(self.points_per_dim, 1.0 / self.points_per_dim)
        return (np.pi / self.half_width) * k

    @cached_property
    def wavevector(self) -> tuple:
        return tuple(np.meshgrid(*([self.frequencies] * self.dim), indexing="ij"))

    @cached_property
    def xi_squared(self) -> np.ndarray:
        """``|xi|^2`` on the full frequency lattice."""
        out = np.zeros(self.shape)
        for xi in self.wavevector:
            out = out + xi * xi
        return out

    def node_index(self, q: Sequence[float]) -> tuple:
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if q.shape != (self.dim,):
            raise ConfigError(f"point must have {self.dim} components", "q")
        j = (q + self.half_width) / self.spacing
        jr = np.rint(j)
        if np.any(np.abs(j - jr) > 1e-9) or np.any(jr < 0) \
                or np.any(jr >= self.points_per_dim):
            raise ConfigError(f"point {q.tolist()} is not a grid node", "q")
        return tuple(int(v) for v in jr)

    def observation_point(self, q: Sequence[float]) -> "ObservationPoint":
        idx = self.node_index(q)
        if any(i < 1 for i in idx):
            raise ConfigError("observation point must be at least one cell "
                              "inside the box", "q")
        q = tuple(float(self.axis[i]) for i in idx)
        return ObservationPoint(q=q, node_index=idx)


@dataclass(frozen=True)
class ObservationPoint:
    q: tuple
    node_index: tuple


# ---------------------------------------------------------------------------
# coefficients

_FAMILIES = {
    # name: parameter names
    "constant": ("c",),
    "affine": ("a", "b"),
    "sinusoidal": ("a", "b", "omega"),
    "cosine": ("a", "b", "omega"),
    "exponential": ("a", "b", "c"),
}


@dataclass(frozen=True)
class ClosedForm:
    """Analytic coefficient family with an exact antiderivative.

    ============  ======================  ==============================
    family        value                   antiderivative from 0
    ============  ======================  ==============================
    constant      c                       c t
    affine        a + b t                 a t + b t^2/2
    sinusoidal    a + b sin(w t)          a t + b (1 - cos(w t))/w
    cosine        a + b cos(w t)          a t + b sin(w t)/w
    exponential   a + b exp(-c t)         a t + b (1 - exp(-c t))/c
    ============  ======================  ==============================
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown coefficient family {self.family!r}",
                              "family")
        names = _FAMILIES[self.family]
        extra = set(self.params) - set(names)
        if extra:
            raise ConfigError(f"unknown parameter {sorted(extra)[0]!r} for "
                              f"family {self.family!r}", sorted(extra)[0])
        missing = [n for n in names if n not in self.params]
        if missing:
            raise ConfigError(f"missing parameter {missing[0]!r} for family "
                              f"{self.family!r}", missing[0])
        for n in names:
            if not np.isfinite(float(self.params[n])):
                raise ConfigError(f"parameter {n!r} must be finite", n)
        if self.family in ("sinusoidal", "cosine") and self.params["omega"] == 0:
            raise ConfigError("omega must be nonzero", "omega")
        if self.family == "exponential" and self.params["c"] == 0:
            raise ConfigError("c must be nonzero", "c")

    def __call__(self, t):
        p = self.params
        t = np.asarray(t, dtype=float)
        if self.family == "constant":
            return np.full_like(t, float(p["c"]))
        if self.family == "affine":
            return p["a"] + p["b"] * t
        if self.family == "sinusoidal":
            return p["a"] + p["b"] * np.sin(p["omega"] * t)
        if self.family == "cosine":
            return p["a"] + p["b"] * np.cos(p["omega"] * t)
        return p["a"] + p["b"] * np.exp(-p["c"] * t)

    def antiderivative(self, t):
        p = self.params
        t = np.asarray(t, dtype=float)
        if self.family == "constant":
            return p["c"] * t
        if self.family == "affine":
            return p["a"] * t + 0.5 * p["b"] * t * t
        if self.family == "sinusoidal":
            w = p["omega"]
            return p["a"] * t + p["b"] * (1.0 - np.cos(w * t)) / w
        if self.family == "cosine":
            w = p["omega"]
            return p["a"] * t + p["b"] * np.sin(w * t) / w
        c = p["c"]
        return p["a"] * t - p["b"] * np.expm1(-c * t) / c

    def to_dict(self) -> dict:
        return {"family": self.family, **{k: self.params[k] for k in _FAMILIES[self.family]}}


@dataclass(frozen=True, eq=False)
class CoefficientFn:
    """A time coefficient sampled on a :class:`TimeGrid`.

    ``closed_form`` is optional; when present it is used for off-grid
    evaluation and for exact antiderivatives.  Samples may be NaN only for
    recovered coefficients, outside their valid nodes.
    """

    samples: np.ndarray
    grid: TimeGrid
    kind: str = "alpha"
    closed_form: Optional[ClosedForm] = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (len(self.grid),):
            raise ConfigError("coefficient samples must match the time grid",
                              "samples")
        if self.kind not in COEFFICIENT_KINDS:
            raise ConfigError(f"unknown coefficient kind {self.kind!r}", "kind")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_closed_form(cls, form: ClosedForm, grid: TimeGrid, kind="alpha"):
        return cls(form(grid.nodes), grid, kind, form)

    @cached_property
    def _spline(self):
        return CubicSpline(self.grid.nodes, self.samples)

    def __call__(self, t):
        """Evaluate off-grid: exact for closed forms, cubic spline otherwise."""
        if self.closed_form is not None:
            return self.closed_form(t)
        return self._spline(t)

    def lower_bound(self) -> float:
        return float(np.min(self.samples))


def _cumulative_simpson(y: np.ndarray, dt: float) -> np.ndarray:
    """Running integral from node 0; odd prefixes end with one trapezoid panel."""
    n = y.size - 1
    out = np.zeros(y.size)
    if n == 0:
        return out
    pairs = (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2]) * (dt / 3.0)
    even = np.concatenate(([0.0], np.cumsum(pairs)))
    out[0::2] = even
    # node 2j+1 = Simpson up to 2j plus trapezoid on [t_2j, t_2j+1]
    odd_idx = np.arange(1, n + 1, 2)
    out[odd_idx] = even[(odd_idx - 1) // 2] + 0.5 * dt * (y[odd_idx - 1] + y[odd_idx])
    return out


def antiderivative(coeff: CoefficientFn, grid: Optional[TimeGrid] = None) -> CoefficientFn:
    """Running integral ``int_0^t coeff(s) ds`` at every node of ``grid``.

    Uses the closed form when available, composite Simpson otherwise.
    For ``kind == "alpha"`` the result must be positive for ``t > 0``.
    """
    grid = coeff.grid if grid is None else grid
    if coeff.closed_form is not None:
        vals = np.asarray(coeff.closed_form.antiderivative(grid.nodes), dtype=float)
        vals[0] = 0.0
    else:
        if grid != coeff.grid:
            raise ConfigError("sampled coefficient lives on a different grid", "grid")
        if not np.all(np.isfinite(coeff.samples)):
            raise ConfigError("coefficient samples must be finite", "samples")
        vals = _cumulative_simpson(coeff.samples, grid.dt)
    if coeff.kind == "alpha" and np.any(vals[1:] <= 0):
        k = int(np.argmax(vals[1:] <= 0)) + 1
        raise ConfigError(f"antiderivative of alpha is not positive at node {k} "
                          f"(t={grid.nodes[k]:g})", "alpha")
    return CoefficientFn(vals, grid, coeff.kind)


# ---------------------------------------------------------------------------
# fields and traces

@dataclass(frozen=True, eq=False)
class Field:
    values: np.ndarray
    grid: SpaceGrid

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ConfigError(f"field shape {v.shape} does not match grid "
                              f"{self.grid.shape}", "values")
        if not np.all(np.isfinite(v)):
            raise ConfigError("field values must be finite", "values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def at(self, q: ObservationPoint) -> float:
        return float(self.values[q.node_index])

    def __add__(self, other):
        return Field(self.values + other.values, self.grid)

    def __sub__(self, other):
        return Field(self.values - other.values, self.grid)

    def __mul__(self, c):
        return Field(c * self.values, self.grid)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(-self.values, self.grid)


@dataclass(frozen=True, eq=False)
class Trace:
    values: np.ndarray
    grid: TimeGrid
    label: str = "derived"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise ConfigError("trace length must equal n_steps + 1", "values")
        if not np.all(np.isfinite(v)):
            raise ConfigError("trace values must be finite", "values")
        if self.label not in TRACE_LABELS:
            raise ConfigError(f"unknown trace label {self.label!r}", "label")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


# ---------------------------------------------------------------------------
# spatial operators

IMAG_RESIDUE_TOL = 1e-12


def real_inverse(spec: np.ndarray, scale: Optional[float] = None) -> np.ndarray:
    """Inverse FFT that drops an imaginary part known to be roundoff.

    ``scale`` bounds the magnitude the transform could produce from the
    data it was computed from; by default ``sum|spec| / size``.  The
    imaginary residue relative to it must stay below 1e-12.
    """
    out = np.fft.ifftn(spec)
    if scale is None:
        scale = np.sum(np.abs(spec)) / spec.size
    scale = max(scale, np.finfo(float).tiny)
    resid = np.max(np.abs(out.imag)) / scale if out.size else 0.0
    if resid > IMAG_RESIDUE_TOL:
        raise ValueError(f"imaginary residue {resid:.3e} exceeds {IMAG_RESIDUE_TOL}")
    return out.real


def apply_symbol(f: Field, symbol_values: np.ndarray) -> Field:
    """Multiply ``f`` by a real, even symbol in frequency space."""
    fh = np.fft.fftn(f.values)
    # roundoff in fh is amplified by up to max|symbol|
    scale = np.max(np.abs(symbol_values)) * np.sum(np.abs(fh)) / fh.size
    return Field(real_inverse(fh * symbol_values, scale), f.grid)


def apply_polyharmonic(f: Field, m: int) -> Field:
    """``(-Delta)^m f`` as the Fourier multiplier ``|xi|^(2m)``."""
    if int(m) != m or m < 1:
        raise ConfigError("m must be a positive integer", "m")
    return apply_symbol(f, f.grid.xi_squared ** int(m))


def trace_at(sol, q: ObservationPoint) -> Trace:
    """Time series of ``sol`` at the node ``q``.

    ``sol`` is any solution object exposing ``space`` and
    ``values_at(node_index)`` (see :class:`evocoef.spectral.SpacetimeSolution`).
    """
    if not isinstance(q, ObservationPoint):
        raise ConfigError("trace_at needs an ObservationPoint", "q")
    idx = sol.space.node_index(q.q)
    if idx != tuple(q.node_index):
        raise ConfigError("observation point is not a node of this grid", "q")
    return Trace(sol.values_at(idx), sol.time, "h1")


# ---------------------------------------------------------------------------
# initial data

def _distance(grid: SpaceGrid, center) -> np.ndarray:
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (grid.dim,):
        raise ConfigError(f"center must have {grid.dim} components", "center")
    r2 = np.zeros(grid.shape)
    for x, c in zip(grid.coords, center):
        r2 = r2 + (x - c) ** 2
    return np.sqrt(r2)


def check_support(grid: SpaceGrid, center, radius, margin=None):
    """Reject a ball that sits closer than ``margin`` to the box boundary."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if margin is None:
        margin = max(radius, grid.half_width / 4)
    gap = grid.half_width - (np.abs(center) + radius)
    # the box is [-L, L): the last node is L - h
    if np.any(gap < margin):
        raise ConfigError(f"support of radius {radius:g} around {center.tolist()} "
                          f"is within {margin:g} of the box boundary", "radius")


def bump_datum(grid: SpaceGrid, center, radius: float, amplitude: float = 1.0,
               margin: Optional[float] = None) -> Field:
    """Smooth compactly supported bump ``A exp(-r^2/(R^2 - r^2))`` for ``r < R``.

    ``margin`` is the minimal gap between the support and the boundary,
    by default ``max(R, L/4)``.
    """
    if not radius > 0:
        raise ConfigError("radius must be positive", "radius")
    check_support(grid, center, radius, margin)
    r = _distance(grid, center)
    out = np.zeros(grid.shape)
    inside = r < radius
    r2 = r[inside] ** 2
    out[inside] = amplitude * np.exp(-r2 / (radius * radius - r2))
    return Field(out, grid)


def gaussian_support_radius(width: float) -> float:
    return float(np.sqrt(4.0 * width * 30.0))


def gaussian_datum(grid: SpaceGrid, center, width: float, amplitude: float = 1.0,
                   margin: Optional[float] = None) -> Field:
    """``A exp(-|x-c|^2/(4 width))``, the heat kernel profile at time ``width``.

    The numerical support (value below ``exp(-30) A``) must stay ``margin``
    (default L/4) away from the boundary.
    """
    if not width > 0:
        raise ConfigError("width must be positive", "width")
    check_support(grid, center, gaussian_support_radius(width),
                  grid.half_width / 4 if margin is None else margin)
    r = _distance(grid, center)
    return Field(amplitude * np.exp(-r * r / (4.0 * width)), grid)


def mode_datum(grid: SpaceGrid, wavenumbers, amplitude: float = 1.0,
               phase: str = "sin") -> Field:
    """Single real Fourier mode ``A sin(xi.x)`` or ``A cos(xi.x)``.

    ``wavenumbers`` are integers ``k`` with ``xi = (pi/L) k``.
    """
    k = np.atleast_1d(np.asarray(wavenumbers, dtype=float))
    if k.shape != (grid.dim,) or np.any(k != np.rint(k)):
        raise ConfigError("wavenumbers must be integers, one per dimension",
                          "wavenumbers")
    arg = np.zeros(grid.shape)
    for x, kj in zip(grid.coords, k):
        arg = arg + (np.pi / grid.half_width) * kj * x
    if phase == "sin":
        return Field(amplitude * np.sin(arg), grid)
    if phase == "cos":
        return Field(amplitude * np.cos(arg), grid)
    raise ConfigError("phase must be 'sin' or 'cos'", "phase")
