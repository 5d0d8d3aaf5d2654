"""Shared independent oracles (mpmath) and parameter generators for the tests."""

from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest

mp.mp.dps = 30


def mp_d(nu, x) -> complex:
    """D_nu(x) from mpmath's own parabolic cylinder implementation."""
    return complex(mp.pcfd(mp.mpc(nu), mp.mpc(x)))


def mp_d_deriv(nu, x, order: int = 1) -> complex:
    return complex(mp.diff(lambda t: mp.pcfd(mp.mpc(nu), t), mp.mpc(x), order))


def mp_e(nu, x) -> complex:
    """Second solution [cos(pi nu) D_nu(x) - D_nu(-x)] / sin(pi nu) at high precision."""
    nu, x = mp.mpc(nu), mp.mpc(x)
    return complex((mp.cospi(nu) * mp.pcfd(nu, x) - mp.pcfd(nu, -x)) / mp.sinpi(nu))


def mp_bhe_residual(y, p, z, h: float = 2e-3) -> float:
    """Canonical-equation residual of a double-precision function y.

    Derivatives use fourth-order five-point stencils evaluated in mpmath; the
    step balances truncation against the ~1e-14 evaluation noise of y, so the
    floor is about 1e-8.
    """
    a, be, g, de = (mp.mpc(complex(v)) for v in (p.alpha, p.beta, p.gamma_, p.delta))
    z = complex(z)
    f = [mp.mpc(y(z + k * h)) for k in (-2, -1, 0, 1, 2)]
    y0 = f[2]
    y1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    y2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    zm = mp.mpc(z)
    r = zm * y2 + (1 + a - be * zm - 2 * zm * zm) * y1 + ((g - a - 2) * zm - (de + (1 + a) * be) / 2) * y0
    return float(abs(r) / (1 + abs(y0) + abs(y1) + abs(y2)))


def rand_c(rng, scale: float = 1.0) -> complex:
    return complex(*rng.uniform(-scale, scale, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
