"""The 2x2 biconfluent Heun connection and its Stokes-multiplier relation.

The connection is dPsi/dx = (A x + B + C/x) Psi with

    A = diag(1, -1)
    B = [[t, u], [2(z - theta0 - thetaInf)/u, -t]]
    C = [[-z + theta0, -u y/2], [2 z (z - 2 theta0)/(u y), z - theta0]]

where y, z are the auxiliary data (called yv, zv here). At the exceptional
point y = z = 0 with z/y = lambda the first component, after the scalar gauge
shift by x + t - theta0/x, solves the canonical equation with
(alpha, beta, gamma) = (2 theta0 - 1, 2 t, 2 thetaInf - 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData
from .params import CanonicalParams, JimboMiwaParams, to_jimbo_miwa

A_MATRIX = np.diag([1.0 + 0j, -1.0 + 0j])


@dataclass(frozen=True)
class BhcData:
    """Connection data. `ratio` stands for z/y when y = z = 0 (exceptional point)."""

    t: complex
    u: complex
    yv: complex
    zv: complex
    theta0: complex
    thetaInf: complex
    ratio: complex | None = None

    @property
    def exceptional(self) -> bool:
        return self.ratio is not None and self.yv == 0 and self.zv == 0


def exceptional_point_data(jm: JimboMiwaParams, u: complex = 1.0) -> BhcData:
    """Data at y = z = 0 with z/y = lambda, the point where the connection carries the BHE."""
    if jm.lam is None:
        # theta0 = 0: lambda only ever enters as 4 theta0 lambda, which vanishes
        return BhcData(jm.t, complex(u), 0j, 0j, jm.theta0, jm.thetaInf, 0j)
    return BhcData(jm.t, complex(u), 0j, 0j, jm.theta0, jm.thetaInf, complex(jm.lam))


def bhc_matrices(data: BhcData) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, B, C) of the connection.

    Raises:
        DegenerateData: if u = 0, or y = 0 away from the exceptional point.
    """
    t, u, y, z = (complex(v) for v in (data.t, data.u, data.yv, data.zv))
    th0, thi = complex(data.theta0), complex(data.thetaInf)
    if u == 0:
        raise DegenerateData("u = 0")
    B = np.array([[t, u], [2 * (z - th0 - thi) / u, -t]], dtype=complex)
    if data.exceptional:
        lam = complex(data.ratio)
        C = np.array([[th0, 0], [-4 * lam * th0 / u, -th0]], dtype=complex)
    else:
        if y == 0:
            raise DegenerateData("y = 0 outside the exceptional limit")
        C = np.array([[-z + th0, -u * y / 2], [2 * z * (z - 2 * th0) / (u * y), z - th0]], dtype=complex)
    return A_MATRIX.copy(), B, C


@dataclass(frozen=True)
class BhcConnection:
    """x -> A x + B + C/x, optionally shifted by (x + t - theta0/x) I."""

    data: BhcData
    shifted: bool = False

    def matrices(self):
        return bhc_matrices(self.data)

    def __call__(self, x: complex) -> np.ndarray:
        A, B, C = self.matrices()
        x = complex(x)
        m = A * x + B + C / x
        if self.shifted:
            m = m + self._shift(x) * np.eye(2)
        return m

    def derivative(self, x: complex) -> np.ndarray:
        A, _, C = self.matrices()
        x = complex(x)
        m = A - C / (x * x)
        if self.shifted:
            m = m + (1 + complex(self.data.theta0) / (x * x)) * np.eye(2)
        return m

    def _shift(self, x: complex) -> complex:
        return x + complex(self.data.t) - complex(self.data.theta0) / x


def connection_for(p: CanonicalParams, u: complex = 1.0, shifted: bool = False) -> BhcConnection:
    """Connection at the exceptional point carrying the canonical equation p."""
    return BhcConnection(exceptional_point_data(to_jimbo_miwa(p, strict=False), u), shifted)


def first_component_factor(data: BhcData, x: complex) -> tuple[complex, complex]:
    """(h, h'/h) with y1 = h f, h = x^theta0 exp(-t x - x^2/2), f a BHE solution."""
    x = complex(x)
    th0, t = complex(data.theta0), complex(data.t)
    h = cmath.exp(th0 * cmath.log(x) - t * x - x * x / 2)
    return h, th0 / x - t - x


def bhe_jm_coefficients(jm: JimboMiwaParams, x: complex) -> tuple[complex, complex]:
    """(coeff1, coeff0) of f'' + coeff1 f' + coeff0 f = 0, the canonical equation divided by x.

    coeff1 = (2 theta0 - 2 t x - 2 x^2)/x,
    coeff0 = (2 (thetaInf - theta0 - 1) x + 4 theta0 (lambda - t))/x.
    """
    x = complex(x)
    th0, thi, t = complex(jm.theta0), complex(jm.thetaInf), complex(jm.t)
    acc = 0j if jm.lam is None else 4 * th0 * (complex(jm.lam) - t)
    return (2 * th0 - 2 * t * x - 2 * x * x) / x, (2 * (thi - th0 - 1) * x + acc) / x


# ---------------------------------------------------------------------------
# Stokes multipliers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StokesData:
    s1: complex
    s2: complex
    s3: complex
    s4: complex
    theta0: complex
    thetaInf: complex


@dataclass(frozen=True)
class Infeasible:
    """No Stokes data with the chosen pair zeroed satisfies the relation."""

    theta0: complex
    thetaInf: complex
    which_pair: str
    residual: complex

    def __bool__(self) -> bool:
        return False


def stokes_residual(s: StokesData) -> complex:
    """(1 + s2 s3) e^{2 pi i thInf} + [s1 s4 + (1 + s3 s4)(1 + s1 s2)] e^{-2 pi i thInf} - 2 cos 2 pi th0."""
    s1, s2, s3, s4 = (complex(v) for v in (s.s1, s.s2, s.s3, s.s4))
    ph = 2j * math.pi * complex(s.thetaInf)
    return (
        (1 + s2 * s3) * cmath.exp(ph)
        + (s1 * s4 + (1 + s3 * s4) * (1 + s1 * s2)) * cmath.exp(-ph)
        - 2 * cmath.cos(2 * math.pi * complex(s.theta0))
    )


def _int_distance(z: complex) -> float:
    return abs(z - round(z.real))


def degenerate_stokes_solve(
    theta0: complex, thetaInf: complex, which_pair: str = "S13", tol: float = 1e-9
) -> StokesData | Infeasible:
    """Stokes data with one pair of multipliers zeroed, or Infeasible.

    With s1 = s3 = 0 (or s2 = s4 = 0) the relation collapses to
    2 cos 2 pi thetaInf = 2 cos 2 pi theta0 whatever the other pair is, so a
    solution exists iff theta0 + thetaInf or theta0 - thetaInf is an integer.
    The solution set is then a plane; the minimal-norm witness (all zeros)
    is returned.
    """
    if which_pair not in ("S13", "S24"):
        raise ValueError(f"which_pair must be 'S13' or 'S24', got {which_pair!r}")
    th0, thi = complex(theta0), complex(thetaInf)
    witness = StokesData(0j, 0j, 0j, 0j, th0, thi)
    if min(_int_distance(th0 + thi), _int_distance(th0 - thi)) <= tol:
        return witness
    return Infeasible(th0, thi, which_pair, stokes_residual(witness))


def local_exponents(p: CanonicalParams) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """((0, -alpha) at the origin, (thetaInf, -thetaInf) of the log term at infinity)."""
    thi = (1 + complex(p.gamma_)) / 2
    return (0j, -complex(p.alpha)), (thi, -thi)
