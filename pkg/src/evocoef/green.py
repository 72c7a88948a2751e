"""Polyharmonic heat kernel and the Poisson-integral solution path.

The kernel of ``u_t + alpha(t) (-Delta)^m u = 0`` is radial.  With
``rho = |x| alpha_1^(-1/(2m))`` it reduces to one radial integral

    E = (2 pi)^(-n/2) alpha_1^(-n/(2m)) rho^(1-n/2)
        * int_0^inf exp(-r^(2m)) r^(n/2) J_{(n-2)/2}(r rho) dr,

evaluated with composite Gauss-Legendre panels whose width never exceeds
half an oscillation period ``pi/rho``.  The factor ``rho^(1-n/2)`` is
folded into the Bessel term, which keeps ``rho = 0`` regular.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, log
from typing import Optional

import numpy as np

from .bessel import bessel_j
from .core import (CoefficientFn, Field, ObservationPoint, TimeGrid, Trace,
                   antiderivative)
from .errors import ConfigError, QuadratureError

_CHUNK = 64


@dataclass(frozen=True)
class KernelQuery:
    t: float
    x: tuple
    alpha1: float
    m: int
    n: int

    def __post_init__(self):
        if not self.t > 0:
            raise ConfigError("kernel queries need t > 0", "t")
        if not self.alpha1 > 0:
            raise ConfigError("alpha1 must be positive", "alpha1")
        if self.n not in (1, 2, 3):
            raise ConfigError("dimension must be 1, 2 or 3", "n")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError("m must be a positive integer", "m")
        x = tuple(float(v) for v in np.atleast_1d(self.x))
        if len(x) != self.n:
            raise ConfigError(f"x must have {self.n} components", "x")
        object.__setattr__(self, "x", x)

    @property
    def rho(self) -> float:
        return float(np.sqrt(sum(v * v for v in self.x))) * self.alpha1 ** (-1.0 / (2 * self.m))


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial quadrature settings.

    ``truncation_radius`` of None picks ``(ln(1/tol))^(1/(2m)) + 2``.
    ``points_per_panel`` Gauss-Legendre nodes are used on every panel.
    """

    truncation_radius: Optional[float] = None
    points_per_panel: int = 16
    tol: float = 1e-13
    max_panel_width: float = 0.5

    def __post_init__(self):
        if self.points_per_panel < 8:
            raise ConfigError("points_per_panel must be at least 8", "points_per_panel")
        if not 0 < self.tol < 1:
            raise ConfigError("tol must lie in (0, 1)", "tol")

    def radius(self, m: int) -> float:
        if self.truncation_radius is not None:
            return float(self.truncation_radius)
        return log(1.0 / self.tol) ** (1.0 / (2 * m)) + 2.0


def _bessel_term(r, rho, n):
    """``rho^(1-n/2) r^(n/2) J_{(n-2)/2}(r rho)``, regular at ``rho = 0``."""
    nu = (n - 2) / 2.0
    if rho == 0:
        return (0.5 * r) ** nu / gamma(nu + 1.0) * r ** (n / 2.0)
    return rho ** (1.0 - n / 2.0) * r ** (n / 2.0) * bessel_j(nu, r * rho)


def _radial_integrals(rho: np.ndarray, m: int, n: int, spec: QuadratureSpec) -> np.ndarray:
    R = spec.radius(m)
    tail = np.exp(-R ** (2 * m)) * max(R, 1.0) ** n
    if tail > spec.tol:
        raise QuadratureError(f"truncation radius {R:g} leaves an estimated tail of "
                              f"{tail:.2e} > tol = {spec.tol:.1e}")
    gx, gw = np.polynomial.legendre.leggauss(spec.points_per_panel)
    out = np.empty(rho.size)
    order = np.argsort(rho)
    for start in range(0, rho.size, _CHUNK):
        idx = order[start:start + _CHUNK]
        rmax = rho[idx[-1]]
        width = spec.max_panel_width
        if rmax > 1.0:
            width = min(width, np.pi / rmax)
        npan = int(np.ceil(R / width))
        left = width * np.arange(npan)
        r = (left[:, None] + 0.5 * width * (gx[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * width * gw, npan)
        env = np.exp(-r ** (2 * m)) * w
        for i in idx:
            out[i] = np.dot(env, _bessel_term(r, float(rho[i]), n))
    return out


def kernel_radial(radius, alpha1: float, m: int, n: int,
                  spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """Kernel values at distances ``radius`` (array) for a single ``alpha1``."""
    spec = spec or QuadratureSpec()
    if not alpha1 > 0:
        raise ConfigError("alpha1 must be positive", "alpha1")
    radius = np.asarray(radius, dtype=float)
    rho = radius.ravel() * alpha1 ** (-1.0 / (2 * m))
    ints = _radial_integrals(rho, m, n, spec)
    pref = (2 * np.pi) ** (-n / 2.0) * alpha1 ** (-n / (2.0 * m))
    return (pref * ints).reshape(radius.shape)


def eval_kernel(query: KernelQuery, spec: Optional[QuadratureSpec] = None) -> float:
    """Polyharmonic heat kernel ``E_{alpha_1}(t, x)``; depends on ``|x|`` only."""
    r = float(np.sqrt(sum(v * v for v in query.x)))
    return float(kernel_radial(np.array([r]), query.alpha1, query.m, query.n, spec)[0])


def kernel_at_origin(alpha1: float, m: int, n: int) -> float:
    """Closed form of the kernel at ``x = 0``."""
    sphere = 2 * np.pi ** (n / 2.0) / gamma(n / 2.0)
    return (2 * np.pi) ** (-n) * sphere * gamma(n / (2.0 * m)) / (2 * m) * alpha1 ** (-n / (2.0 * m))


def poisson_solve(u0: Field, q: ObservationPoint, alpha: CoefficientFn, m: int,
                  tg: TimeGrid, spec: Optional[QuadratureSpec] = None,
                  margin: Optional[float] = None, label: str = "h1") -> Trace:
    """Trace at ``q`` of the Poisson integral ``int E(t, q - y) u0(y) dy``.

    Trapezoid (uniform) weights over the grid cells; the entry at ``t = 0``
    is ``u0(q)``.  ``u0`` must vanish within ``margin`` (default L/4) of the
    box boundary.
    """
    grid = u0.grid
    L = grid.half_width
    margin = L / 4 if margin is None else margin
    near_edge = np.zeros(grid.shape, dtype=bool)
    for x in grid.coords:
        near_edge |= np.abs(x) > L - margin
    if np.any(u0.values[near_edge] != 0):
        raise ConfigError("initial datum is not supported inside the box margin", "u0")
    alpha1 = antiderivative(alpha, tg).samples
    support = np.nonzero(u0.values)
    vals = u0.values[support]
    out = np.zeros(len(tg))
    out[0] = u0.at(q)
    if vals.size == 0:
        return Trace(out, tg, label)
    # squared integer offsets give exact, symmetric distance groups
    s = np.zeros(vals.size, dtype=np.int64)
    for d, j in enumerate(q.node_index):
        s = s + (support[d] - j) ** 2
    groups, inv = np.unique(s, return_inverse=True)
    weight = np.bincount(inv, weights=vals) * grid.spacing ** grid.dim
    dist = np.sqrt(groups.astype(float)) * grid.spacing
    for k in range(1, len(tg)):
        out[k] = np.dot(kernel_radial(dist, float(alpha1[k]), m, grid.dim, spec), weight)
    return Trace(out, tg, label)
