import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evocoef import (ConfigError, Field, KernelQuery, QuadratureError, QuadratureSpec, SpaceGrid,
                     TimeGrid, bump_datum, eval_kernel, poisson_solve, solve_heat, trace_at)
from evocoef.green import kernel_at_origin, kernel_radial

from conftest import closed
from oracles import gaussian_kernel, origin_value, tensor_kernel


def K(x, alpha1, m, n=None):
    x = tuple(np.atleast_1d(x))
    return eval_kernel(KernelQuery(t=1.0, x=x, alpha1=alpha1, m=m, n=n or len(x)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gaussian_m1(n):
    r = np.linspace(0, 4, 9)
    for a1 in (0.3, 1.0, 2.5):
        got = kernel_radial(r, a1, 1, n)
        assert np.allclose(got, gaussian_kernel(r, a1, n), rtol=1e-8, atol=0)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (2, 2), (3, 3)])
def test_origin(m, n):
    a1 = 0.8
    assert K((0.0,) * n, a1, m) == pytest.approx(origin_value(a1, m, n), rel=1e-12)
    assert kernel_at_origin(a1, m, n) == pytest.approx(origin_value(a1, m, n), rel=1e-14)
    assert K((0.0,) * n, a1, m) == pytest.approx(tensor_kernel((0.0,) * n, a1, m), abs=1e-10)


def test_m2_n3_rho1_against_brute_force():
    a1 = 0.7
    x = (a1 ** 0.25, 0.0, 0.0)  # rho = 1
    assert abs(K(x, a1, 2) - tensor_kernel(x, a1, 2)) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 5), st.floats(0.2, 3), st.integers(1, 3), st.sampled_from([1, 2]))
def test_evenness(r, a1, n, m):
    x = (r,) + (0.0,) * (n - 1)
    assert K(x, a1, m) == K(tuple(-v for v in x), a1, m)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3), st.floats(0.5, 2), st.floats(0, 3))
def test_scaling(a1, c, r):
    for m, n in ((2, 1), (2, 3)):
        lhs = K((r,) + (0.0,) * (n - 1), a1, m)
        rhs = c ** n * K((c * r,) + (0.0,) * (n - 1), a1 * c ** (2 * m), m)
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(lhs)))


def _mass(a1, m, n, R=16.0, pts=1500):
    r, w = np.polynomial.legendre.leggauss(pts)
    r = 0.5 * R * (r + 1)
    w = 0.5 * R * w
    sphere = {1: 2.0, 2: 2 * np.pi, 3: 4 * np.pi}[n]
    return sphere * np.sum(w * kernel_radial(r, a1, m, n) * r ** (n - 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mass(n):
    assert _mass(1.0, 1, n) >= 1 - 1e-10
    assert abs(_mass(1.0, 2, n) - 1) <= 5e-3


def test_sign_structure():
    r = np.linspace(0, 8, 200)
    assert np.all(kernel_radial(r, 1.3, 1, 2) >= -1e-12)
    assert np.any(kernel_radial(r, 1.0, 2, 1) < 0)


def test_truncation_error_raised():
    with pytest.raises(QuadratureError):
        kernel_radial(np.array([1.0]), 1.0, 1, 1, QuadratureSpec(truncation_radius=2.0))


def test_query_validation():
    with pytest.raises(ConfigError):
        KernelQuery(t=0.0, x=(0.0,), alpha1=1.0, m=1, n=1)
    with pytest.raises(ConfigError):
        KernelQuery(t=1.0, x=(0.0, 1.0), alpha1=1.0, m=1, n=1)


class TestPoisson:
    def test_zero_datum(self):
        g = SpaceGrid(1, 8.0, 64)
        tg = TimeGrid(1.0, 8)
        h = poisson_solve(Field(np.zeros(64), g), g.observation_point([0.0]),
                          closed("constant", tg, c=1.0), 1, tg)
        assert not np.any(h.values)

    def test_matches_spectral_m1(self):
        g = SpaceGrid(1, 16.0, 512)
        tg = TimeGrid(1.0, 40)
        u0 = bump_datum(g, [0.0], 2.0)
        a = closed("sinusoidal", tg, a=2, b=1, omega=1)
        q = g.observation_point([0.0])
        spec = trace_at(solve_heat(u0, a, 1, tg), q).values
        pois = poisson_solve(u0, q, a, 1, tg).values
        late = tg.nodes >= 0.05
        assert np.max(np.abs(spec - pois)[late]) <= 1e-4

    def test_approximate_identity(self):
        g = SpaceGrid(1, 8.0, 1024)
        tg = TimeGrid(1e-3, 1)
        u0 = bump_datum(g, [0.0], 2.0)
        q = g.observation_point([0.0])
        h = poisson_solve(u0, q, closed("constant", tg, c=1.0), 1, tg)
        assert h.values[0] == u0.at(q)
        assert abs(h.values[1] - u0.at(q)) <= 1e-2

    def test_off_centre_2d(self):
        g = SpaceGrid(2, 8.0, 64)
        tg = TimeGrid(0.5, 5)
        u0 = bump_datum(g, [0.5, -0.25], 1.5)
        a = closed("constant", tg, c=1.0)
        q = g.observation_point([0.25, 0.0])
        spec = trace_at(solve_heat(u0, a, 1, tg), q).values
        pois = poisson_solve(u0, q, a, 1, tg).values
        assert np.max(np.abs(spec - pois)[1:]) <= 1e-8

    def test_margin_enforced(self):
        g = SpaceGrid(1, 8.0, 64)
        tg = TimeGrid(1.0, 4)
        u0 = bump_datum(g, [0.0], 2.0)
        with pytest.raises(ConfigError):
            poisson_solve(u0, g.observation_point([0.0]), closed("constant", tg, c=1.0), 1, tg,
                          margin=6.5)
