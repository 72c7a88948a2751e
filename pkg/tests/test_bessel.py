import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evocoef import ConfigError, bessel_j
from evocoef.bessel import SERIES_CUTOFF


def test_j0_at_zero():
    assert bessel_j(0, 0.0) == 1.0


def test_half_order_closed_form():
    assert abs(bessel_j(0.5, np.pi)) < 1e-15
    z = np.linspace(0.1, 30, 50)
    assert np.allclose(bessel_j(-0.5, z), np.sqrt(2 / (np.pi * z)) * np.cos(z), rtol=1e-14)


def test_first_zero():
    z0 = float(mpmath.besseljzero(0, 1))
    assert abs(bessel_j(0, 2.4048255576957)) < 1e-10
    assert abs(bessel_j(0, z0)) < 1e-14


@pytest.mark.parametrize("z", [0.3, 5.0, SERIES_CUTOFF - 1e-9, SERIES_CUTOFF + 1e-9, 40.0, 300.0])
def test_j0_against_mpmath(z):
    assert abs(bessel_j(0, z) - float(mpmath.besselj(0, z))) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 200))
def test_j0_random(z):
    assert abs(bessel_j(0, z) - float(mpmath.besselj(0, z))) < 2e-12


def test_vectorised_and_continuous_at_switch():
    z = np.array([SERIES_CUTOFF - 1e-12, SERIES_CUTOFF, SERIES_CUTOFF + 1e-12])
    v = bessel_j(0, z)
    assert v.shape == (3,)
    assert np.ptp(v) < 2e-12  # both branches are good to about 1e-12


@pytest.mark.parametrize("order,z", [(1, 1.0), (0, -1.0), (0.5, np.nan)])
def test_rejects(order, z):
    with pytest.raises(ConfigError):
        bessel_j(order, z)
