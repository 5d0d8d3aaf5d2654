"""Evaluation of prefactor * exp(x^2/4) * sum_k A_k W_{nu-k}(x) with x affine in z.

Both finite eigen-solutions and truncated infinite series reduce to this
shape. The argument is x = (b_w - 2 sigma z) / sqrt(2) where b_w is the working
parameter b and sigma the argument rotation of the symmetry in use.
Derivatives come from the ladder d/dx[e^{x^2/4} W_mu] = mu e^{x^2/4} W_{mu-1}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .params import PrefactorDescriptor
from .pcf import EPS, ScaledArray, pcf_ladder

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Jet:
    """y, y' and y'' at a point, plus an absolute error estimate for y."""

    y: complex
    dy: complex
    d2y: complex
    abs_error: float = 0.0


@dataclass(frozen=True)
class PcfFrame:
    """Shared geometry of a PCF sum: order, argument map, prefactor, kind."""

    top_order: complex
    b_work: complex
    sigma: complex
    prefactor: PrefactorDescriptor
    kind: str = "D"
    radius: float = 6.0

    def x_of(self, z: complex) -> complex:
        return (self.b_work - 2 * self.sigma * complex(z)) / SQRT2

    @property
    def kappa(self) -> complex:
        """dx/dz."""
        return -SQRT2 * self.sigma


def ladder_sums(
    nu: complex, coeffs: ScaledArray, ladder: ScaledArray, n_terms: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Per-term arrays for S0, S1, S2 in a common scale exp(ref).

    S0 = sum A_k W_{nu-k}, S1 = sum A_k (nu-k) W_{nu-k-1},
    S2 = sum A_k (nu-k)(nu-k-1) W_{nu-k-2}; ladder must hold n_terms + 2 orders.
    """
    k = np.arange(n_terms)
    la = coeffs.logs[:n_terms]
    lw = ladder.logs
    l0 = la + lw[k]
    l1 = la + lw[k + 1]
    l2 = la + lw[k + 2]
    ma = coeffs.mant[:n_terms]
    nz = ma != 0
    cand = [l0[nz], l1[nz], l2[nz]]
    ref = max((float(np.max(c)) for c in cand if c.size), default=0.0)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        t0 = ma * ladder.mant[k] * np.exp(l0 - ref)
        o = nu - k
        t1 = ma * o * ladder.mant[k + 1] * np.exp(l1 - ref)
        t2 = ma * o * (o - 1) * ladder.mant[k + 2] * np.exp(l2 - ref)
    t0[~nz] = 0
    t1[~nz] = 0
    t2[~nz] = 0
    return t0, t1, t2, ref


def csum(arr: np.ndarray) -> complex:
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def jet_from_sums(
    frame: PcfFrame, z: complex, x: complex, s0: complex, s1: complex, s2: complex, ref: float, err0: float
) -> Jet:
    """Combine the three PCF sums with exp(x^2/4) and the prefactor."""
    log_e = frame.prefactor.log_value(z) + x * x / 4 + ref
    e = cmath.exp(log_e)
    l1, l2 = frame.prefactor.log_derivatives(z)
    k = frame.kappa
    y = e * s0
    dy = e * (l1 * s0 + k * s1)
    d2y = e * (l2 * s0 + 2 * l1 * k * s1 + k * k * s2)
    return Jet(y, dy, d2y, abs(e) * err0)


def evaluate_finite(frame: PcfFrame, coeffs: np.ndarray, z: complex) -> Jet:
    """Jet of prefactor * e^{x^2/4} sum_{k<=N} A_k W_{nu-k}(x) at z."""
    z = complex(z)
    x = frame.x_of(z)
    n = len(coeffs)
    ladder = pcf_ladder(frame.top_order, x, n + 2, frame.kind, frame.radius)
    ca = ScaledArray(np.asarray(coeffs, dtype=complex), np.zeros(n))
    t0, t1, t2, ref = ladder_sums(frame.top_order, ca, ladder, n)
    s0 = csum(t0)
    err = 64 * EPS * float(np.sum(np.abs(t0)))
    return jet_from_sums(frame, z, x, s0, csum(t1), csum(t2), ref, err)


def pcf_part_finite(top_order: complex, kind: str, coeffs, x: complex, radius: float = 6.0) -> complex:
    """e^{x^2/4} sum_k A_k W_{nu-k}(x) as a function of x alone."""
    n = len(coeffs)
    ladder = pcf_ladder(top_order, x, n, kind, radius)
    vals = ladder.values()
    return cmath.exp(x * x / 4) * complex(np.dot(np.asarray(coeffs, dtype=complex), vals))
