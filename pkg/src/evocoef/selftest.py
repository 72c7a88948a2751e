"""Fast sanity checks built from the closed-form examples of each module."""
import numpy as np

from .bessel import bessel_j
from .core import (ClosedForm, CoefficientFn, Field, SpaceGrid, TimeGrid, Trace,
                   antiderivative, apply_polyharmonic, bump_datum, mode_datum)
from .errors import HypothesisError
from .green import KernelQuery, eval_kernel
from .harness import add_noise, error_metrics
from .recovery import DifferentiationSpec, differentiate, recover, validate_hypotheses
from .spectral import (MultiplierSymbol, solve_general_first, solve_general_second,
                       solve_heat, solve_wave)

_T = TimeGrid(1.0, 64)
_G = SpaceGrid(1, np.pi, 32)


def _const(c, kind="alpha", grid=_T):
    return CoefficientFn.from_closed_form(ClosedForm("constant", {"c": c}), grid, kind)


def check_antiderivative_constant():
    a1 = antiderivative(_const(1.0))
    return np.allclose(a1.samples, _T.nodes, rtol=0, atol=1e-15)


def check_antiderivative_cosine():
    cos = CoefficientFn.from_closed_form(
        ClosedForm("cosine", {"a": 0.0, "b": 1.0, "omega": 1.0}), _T, "psi")
    return np.allclose(antiderivative(cos).samples, np.sin(_T.nodes), rtol=0, atol=1e-15)


def check_polyharmonic_eigenfunction():
    g = SpaceGrid(2, np.pi, 32)
    x, y = g.coords
    f = Field(np.sin(x) * np.cos(y), g)
    return np.allclose(apply_polyharmonic(f, 2).values, 4 * f.values, atol=1e-10)


def check_polyharmonic_constant():
    return np.allclose(apply_polyharmonic(Field(np.full(_G.shape, 3.0), _G), 1).values, 0)


def check_bump_center():
    g = SpaceGrid(1, 8.0, 64)
    b = bump_datum(g, [0.0], 1.0, 2.5)
    return b.values[32] == 2.5 and np.all(b.values[np.abs(g.axis) >= 1.0] == 0)


def check_heat_single_mode():
    u0 = mode_datum(_G, [2], phase="cos")
    sol = solve_heat(u0, _const(1.0), 1, _T)
    return np.allclose(sol.slice(_T.n_steps).values, np.exp(-4.0) * u0.values, atol=1e-13)


def check_general_zero_symbol():
    u0 = mode_datum(_G, [3])
    sol = solve_general_first(u0, _const(1.0, "psi"), MultiplierSymbol.zero(), _T)
    return np.allclose(sol.slice(_T.n_steps).values, u0.values, atol=1e-14)


def check_wave_zero_data():
    z = Field(np.zeros(_G.shape), _G)
    sol = solve_wave(z, z, _const(1.0, "phi"), _T)
    return not np.any(sol.slice(_T.n_steps).values)


def check_general_second_zero_velocity():
    z = Field(np.zeros(_G.shape), _G)
    sym = MultiplierSymbol.polyharmonic(1, "oscillatory")
    sol = solve_general_second(z, _const(2.0, "lambda"), sym, _T)
    return not np.any(sol.slice(_T.n_steps).values)


def check_bessel_values():
    return bessel_j(0, 0.0) == 1.0 and abs(bessel_j(0.5, np.pi)) < 1e-15


def check_kernel_gaussian():
    q = KernelQuery(t=1.0, x=(0.7,), alpha1=0.5, m=1, n=1)
    exact = (4 * np.pi * 0.5) ** -0.5 * np.exp(-0.49 / 2.0)
    return abs(eval_kernel(q) / exact - 1) < 1e-8


def check_differentiate_quadratic():
    h = Trace(_T.nodes ** 2, _T, "h1")
    d1 = differentiate(h, DifferentiationSpec(order=1)).values
    d2 = differentiate(h, DifferentiationSpec(order=2)).values
    return np.allclose(d1, 2 * _T.nodes, atol=1e-11) and np.allclose(d2, 2.0, atol=1e-8)


def check_recover_identity():
    h1 = Trace(np.sin(_T.nodes), _T, "h1")
    h2 = Trace(np.cos(_T.nodes), _T, "h2")
    r = recover(h1, h2, 1, h2_floor=0.1)
    return np.max(np.abs(r.coefficient.samples - 1)) < 1e-3 and \
        validate_hypotheses(r, "thm22").passed


def check_recover_degenerate():
    h = Trace(np.zeros(len(_T)), _T, "h2")
    try:
        recover(Trace(np.ones(len(_T)), _T, "h1"), h, 1)
    except HypothesisError:
        return True
    return False


def check_noise_zero():
    h = Trace(np.cos(_T.nodes), _T, "h1")
    return add_noise(h, 0.0, 7) is h


def check_error_metrics():
    t = _const(2.0)
    r = CoefficientFn(1.1 * t.samples, _T, "alpha")
    m = error_metrics(r, t, np.ones(len(_T), bool))
    return abs(m["max_rel"] - 0.1) < 1e-12 and abs(m["l2_rel"] - 0.1) < 1e-12


CHECKS = [(name[6:], fn) for name, fn in sorted(globals().items())
          if name.startswith("check_") and callable(fn)]


def run_selftest():
    """Run every check; returns ``(passed, failed_names)``."""
    passed, failed = 0, []
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception:  # a crash counts as a failure
            ok = False
        if ok:
            passed += 1
        else:
            failed.append(name)
    return passed, failed
