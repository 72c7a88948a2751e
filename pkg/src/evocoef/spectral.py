"""Forward Cauchy solvers on the periodic box, one scalar problem per mode.

Every solver here reduces the PDE to scalar equations in the Fourier
coefficients.  Modes that share a symbol value obey the same scalar
equation, so the time dependence is computed once per distinct symbol
value ("group") and stored as real propagators:

    u_hat(t_k, xi) = u0_hat(xi) * P[k, g(xi)] + u1_hat(xi) * S[k, g(xi)]

This keeps long time series cheap in memory while any slice can still be
rebuilt exactly by one inverse FFT.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (CoefficientFn, Field, SpaceGrid, TimeGrid, antiderivative,
                   real_inverse)
from .errors import ConfigError, StabilityError

OVERFLOW_GUARD = 50.0
STABILITY_THRESHOLD = 0.5


@dataclass(frozen=True)
class MultiplierSymbol:
    """Real symbol ``p(xi)`` of a constant-coefficient operator ``L_x``.

    ``rule`` maps a :class:`SpaceGrid` to the symbol on its frequency
    lattice.  ``stability`` is ``"dissipative"`` for first-order-in-time use
    and ``"oscillatory"`` for second-order use (requires ``p <= 0``).
    """

    name: str
    rule: Callable[[SpaceGrid], np.ndarray]
    stability: str = "dissipative"

    def __post_init__(self):
        if self.stability not in ("dissipative", "oscillatory"):
            raise ConfigError("stability must be 'dissipative' or 'oscillatory'",
                              "stability")

    def evaluate(self, grid: SpaceGrid) -> np.ndarray:
        p = np.asarray(self.rule(grid), dtype=float)
        if p.shape != grid.shape:
            p = np.broadcast_to(p, grid.shape).copy()
        if not np.all(np.isfinite(p)):
            raise ConfigError(f"symbol {self.name!r} is not finite on the grid",
                              "symbol")
        return p

    def apply(self, f: Field) -> Field:
        """``L_x[f]`` computed spectrally."""
        from .core import apply_symbol
        return apply_symbol(f, self.evaluate(f.grid))

    def as_oscillatory(self) -> "MultiplierSymbol":
        return MultiplierSymbol(self.name, self.rule, "oscillatory")

    @classmethod
    def polyharmonic(cls, m: int, stability="dissipative"):
        """``-|xi|^(2m)``, the symbol of ``-(-Delta)^m``."""
        m = int(m)
        if m < 1:
            raise ConfigError("m must be a positive integer", "m")
        return cls(f"polyharmonic:{m}", lambda g: -(g.xi_squared ** m), stability)

    @classmethod
    def radial_polynomial(cls, coeffs, stability="dissipative"):
        """``sum_j coeffs[j] |xi|^(2j)``."""
        coeffs = [float(c) for c in coeffs]

        def rule(g):
            out = np.zeros(g.shape)
            for j, c in enumerate(coeffs):
                if c:
                    out = out + c * g.xi_squared ** j
            return out
        return cls("radial:" + ",".join(repr(c) for c in coeffs), rule, stability)

    @classmethod
    def zero(cls, stability="dissipative"):
        return cls("zero", lambda g: np.zeros(g.shape), stability)


def symbol_from_id(ident: str, stability="dissipative") -> MultiplierSymbol:
    """Parse a symbol id.

    Accepted: ``laplacian`` (``-|xi|^2``), ``laplacian-bilaplacian``
    (``-|xi|^2 - |xi|^4``), ``polyharmonic:<m>``, ``radial:c0,c1,...``
    and ``zero``.
    """
    ident = ident.strip()
    if ident == "laplacian":
        return MultiplierSymbol.polyharmonic(1, stability)
    if ident == "laplacian-bilaplacian":
        return MultiplierSymbol.radial_polynomial([0.0, -1.0, -1.0], stability)
    if ident == "zero":
        return MultiplierSymbol.zero(stability)
    if ident.startswith("polyharmonic:"):
        try:
            m = int(ident.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad symbol id {ident!r}", "symbol") from None
        return MultiplierSymbol.polyharmonic(m, stability)
    if ident.startswith("radial:"):
        try:
            coeffs = [float(c) for c in ident.split(":", 1)[1].split(",")]
        except ValueError:
            raise ConfigError(f"bad symbol id {ident!r}", "symbol") from None
        return MultiplierSymbol.radial_polynomial(coeffs, stability)
    raise ConfigError(f"unknown symbol id {ident!r}", "symbol")


@dataclass(frozen=True, eq=False)
class SpacetimeSolution:
    """Time-indexed solution stored as grouped spectral propagators."""

    space: SpaceGrid
    time: TimeGrid
    equation: str
    position_hat: np.ndarray
    velocity_hat: Optional[np.ndarray]
    groups: np.ndarray
    prop_position: np.ndarray
    prop_velocity: Optional[np.ndarray] = None
    dprop_position: Optional[np.ndarray] = None
    dprop_velocity: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.time)

    def spectral(self, k: int) -> np.ndarray:
        out = self.position_hat * self.prop_position[k][self.groups]
        if self.velocity_hat is not None:
            out = out + self.velocity_hat * self.prop_velocity[k][self.groups]
        return out

    def spectral_rate(self, k: int) -> np.ndarray:
        """Time derivative of the spectral state (second-order equations only)."""
        if self.dprop_position is None:
            raise ValueError(f"{self.equation} solutions carry no time derivative")
        out = self.position_hat * self.dprop_position[k][self.groups]
        if self.velocity_hat is not None:
            out = out + self.velocity_hat * self.dprop_velocity[k][self.groups]
        return out

    def slice(self, k: int) -> Field:
        return Field(real_inverse(self.spectral(k)), self.space)

    @property
    def slices(self) -> np.ndarray:
        """All slices as one array; only sensible for small problems."""
        return np.stack([self.slice(k).values for k in range(len(self))])

    def values_at(self, node_index) -> np.ndarray:
        """Time series at one node, summed group by group in a fixed order."""
        n = self.space.points_per_dim
        r = np.zeros(self.space.shape, dtype=np.int64)
        for d, j in enumerate(node_index):
            kd = np.arange(n).reshape([-1 if i == d else 1 for i in range(self.space.dim)])
            r = r + kd * int(j)
        phase = np.exp(2j * np.pi * (r % n) / n)
        ng = self.prop_position.shape[1]
        flat = self.groups.ravel()

        def weights(hat):
            w = (hat * phase).real.ravel() / self.space.size
            return np.bincount(flat, weights=w, minlength=ng)

        out = self.prop_position @ weights(self.position_hat)
        if self.velocity_hat is not None:
            out = out + self.prop_velocity @ weights(self.velocity_hat)
        return out


def _group(symbol_values: np.ndarray):
    vals, inv = np.unique(symbol_values, return_inverse=True)
    return vals, inv.reshape(symbol_values.shape)


def _first_order(u0: Field, psi1: np.ndarray, sym_values: np.ndarray,
                 tg: TimeGrid, equation: str) -> SpacetimeSolution:
    vals, groups = _group(sym_values)
    expo = np.outer(psi1, vals)
    if np.any(expo > OVERFLOW_GUARD):
        k, g = np.unravel_index(np.argmax(expo), expo.shape)
        raise ConfigError(f"p(xi)*Psi1(t) = {expo[k, g]:.3g} > {OVERFLOW_GUARD} "
                          f"at t={tg.nodes[k]:g}: configuration is not dissipative",
                          "symbol")
    prop = np.exp(expo)
    return SpacetimeSolution(u0.grid, tg, equation, np.fft.fftn(u0.values), None,
                             groups, prop)


def solve_heat(u0: Field, alpha: CoefficientFn, m: int, tg: TimeGrid) -> SpacetimeSolution:
    """Solve ``u_t + alpha(t) (-Delta)^m u = 0`` with ``u(0) = u0``.

    Each mode is multiplied by ``exp(-|xi|^(2m) alpha_1(t))``, which is exact
    in time; the only time error is that of ``alpha_1``.
    """
    alpha1 = antiderivative(alpha, tg)
    sym = MultiplierSymbol.polyharmonic(m)
    return _first_order(u0, alpha1.samples, sym.evaluate(u0.grid), tg, f"heat({int(m)})")


def solve_general_first(u0: Field, psi: CoefficientFn, sym: MultiplierSymbol,
                        tg: TimeGrid) -> SpacetimeSolution:
    """Solve ``u_t - Psi(t) L_x u = 0`` for a multiplier operator ``L_x``."""
    psi1 = antiderivative(psi, tg)
    return _first_order(u0, psi1.samples, sym.evaluate(u0.grid), tg,
                        f"general_first({sym.name})")


def _rk4_fundamental(vals: np.ndarray, coef: CoefficientFn, tg: TimeGrid,
                     with_position: bool):
    """RK4 for ``y'' = c(t) p y`` per group value ``p``.

    Returns position and rate histories of the fundamental solutions with
    data (1, 0) and (0, 1); the (1, 0) pair is skipped when not needed.
    """
    dt = tg.dt
    t = tg.nodes
    c0 = np.asarray(coef(t), dtype=float)
    cm = np.asarray(coef(t[:-1] + 0.5 * dt), dtype=float)
    ng = vals.size
    nsol = 2 if with_position else 1
    y = np.zeros((nsol, ng))
    v = np.zeros((nsol, ng))
    v[-1] = 1.0
    if with_position:
        y[0] = 1.0
    ys = np.empty((tg.n_steps + 1, nsol, ng))
    vs = np.empty_like(ys)
    ys[0], vs[0] = y, v
    h2 = 0.5 * dt
    for k in range(tg.n_steps):
        a0 = c0[k] * vals
        am = cm[k] * vals
        a1 = c0[k + 1] * vals
        k1y, k1v = v, a0 * y
        y2 = y + h2 * k1y
        k2y, k2v = v + h2 * k1v, am * y2
        y3 = y + h2 * k2y
        k3y, k3v = v + h2 * k2v, am * y3
        y4 = y + dt * k3y
        k4y, k4v = v + dt * k3v, a1 * y4
        y = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        ys[k + 1], vs[k + 1] = y, v
    return ys, vs


def _second_order(u0: Optional[Field], u1: Field, coef: CoefficientFn,
                  sym_values: np.ndarray, tg: TimeGrid, equation: str,
                  c_min: float, stability_threshold: float) -> SpacetimeSolution:
    if np.any(sym_values > 0):
        raise ConfigError("second-order solver needs p(xi) <= 0 on the grid", "symbol")
    cmin_seen = coef.lower_bound()
    if not (cmin_seen > 0 and cmin_seen >= c_min):
        raise ConfigError(f"coefficient minimum {cmin_seen:.6g} is below "
                          f"C_min = {c_min:g} (must be positive)", coef.kind)
    cmax = max(float(np.max(coef.samples)),
               float(np.max(coef(tg.nodes[:-1] + 0.5 * tg.dt))))
    cfl = tg.dt * np.sqrt(np.max(-sym_values) * cmax)
    if cfl > stability_threshold:
        raise StabilityError(f"dt*sqrt(max|p|*max coef) = {cfl:.3g} exceeds "
                             f"{stability_threshold:g}; increase n_steps")
    vals, groups = _group(sym_values)
    with_pos = u0 is not None
    ys, vs = _rk4_fundamental(vals, coef, tg, with_pos)
    u1_hat = np.fft.fftn(u1.values)
    if with_pos:
        return SpacetimeSolution(u1.grid, tg, equation, np.fft.fftn(u0.values), u1_hat,
                                 groups, ys[:, 0], ys[:, 1], vs[:, 0], vs[:, 1])
    return SpacetimeSolution(u1.grid, tg, equation, u1_hat, None, groups,
                             ys[:, 0], None, vs[:, 0], None)


def solve_wave(u0: Field, u1: Field, phi: CoefficientFn, tg: TimeGrid,
               c_min: float = 0.0,
               stability_threshold: float = STABILITY_THRESHOLD) -> SpacetimeSolution:
    """Solve ``u_tt - Phi(t) Delta u = 0`` with position ``u0``, velocity ``u1``.

    Classical RK4 per mode with ``Phi`` evaluated at stage times (closed
    form when available, cubic spline of the samples otherwise).
    """
    sym = MultiplierSymbol.polyharmonic(1, "oscillatory")
    zero_pos = not np.any(u0.values)
    return _second_order(None if zero_pos else u0, u1, phi, sym.evaluate(u1.grid), tg,
                         "wave", c_min, stability_threshold)


def solve_general_second(u1: Field, lam: CoefficientFn, sym: MultiplierSymbol,
                         tg: TimeGrid, c_min: float = 0.0,
                         stability_threshold: float = STABILITY_THRESHOLD) -> SpacetimeSolution:
    """Solve ``u_tt - Lambda(t) L_x u = 0``, ``u(0) = 0``, ``u_t(0) = u1``."""
    return _second_order(None, u1, lam, sym.evaluate(u1.grid), tg,
                         f"general_second({sym.name})", c_min, stability_threshold)


def mode_energy(sol: SpacetimeSolution, k: int, phi_value: float) -> float:
    """``sum |u'_hat|^2 + phi |xi|^2 |u_hat|^2`` at node ``k`` (wave, constant Phi)."""
    u = sol.spectral(k)
    du = sol.spectral_rate(k)
    return float(np.sum(np.abs(du) ** 2 + phi_value * sol.space.xi_squared * np.abs(u) ** 2))
