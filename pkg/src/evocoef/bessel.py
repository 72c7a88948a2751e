"""Bessel functions of the first kind for the orders needed in n = 1, 2, 3.

Half-integer orders are elementary.  ``J_0`` uses its power series up to
``z = 12`` and the Hankel amplitude/phase expansion beyond, truncated at
the smallest term.  Both branches are accurate to about 1e-12 absolute.
"""
import numpy as np

from .errors import ConfigError

SERIES_CUTOFF = 12.0
_SERIES_TERMS = 60
_HANKEL_MIN_TERMS = 4
_HANKEL_MAX_TERMS = 40


def _hankel_coefficients(nu, count):
    # a_k(nu) = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k)
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, count):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A0 = _hankel_coefficients(0.0, _HANKEL_MAX_TERMS)


def _j0_series(z):
    q = -0.25 * z * z
    term = np.ones_like(z)
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * k)
        total = total + term
    return total


def _j0_hankel(z):
    # J0(z) = sqrt(2/(pi z)) (P cos chi - Q sin chi), chi = z - pi/4
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    zk = np.ones_like(z)
    for k in range(_HANKEL_MAX_TERMS):
        term = _A0[k] / zk
        if k >= _HANKEL_MIN_TERMS:
            active &= np.abs(term) <= prev
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p += contrib
        else:
            q += contrib
        prev = np.abs(term)
        zk = zk * z
        if not active.any():
            break
    chi = z - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order, z):
    """``J_order(z)`` for ``order`` in {-1/2, 0, 1/2} and ``z >= 0``.

    Parameters
    ----------
    order : float
        One of -0.5, 0, 0.5 (dimensions 1, 2, 3 of the radial reduction).
    z : float or array_like
        Nonnegative argument; strictly positive for order -1/2.

    Returns
    -------
    float or ndarray
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or not np.all(np.isfinite(z)):
        raise ConfigError("Bessel argument must be finite and nonnegative", "z")
    if order == 0:
        out = np.empty_like(z)
        small = z <= SERIES_CUTOFF
        out[small] = _j0_series(z[small])
        out[~small] = _j0_hankel(z[~small])
    elif order == 0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z > 0, np.sqrt(2.0 / (np.pi * np.where(z > 0, z, 1.0)))
                           * np.sin(z), 0.0)
    elif order == -0.5:
        if np.any(z <= 0):
            raise ConfigError("J_{-1/2} needs a positive argument", "z")
        out = np.sqrt(2.0 / (np.pi * z)) * np.cos(z)
    else:
        raise ConfigError(f"unsupported Bessel order {order!r}; dimensions 1-3 "
                          "need orders -1/2, 0, 1/2", "order")
    return float(out) if scalar else out
