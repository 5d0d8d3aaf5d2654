"""Two-term gauge forms of finite PCF sums, apparent singularities and the Schlesinger check.

A finite sum e^{x^2/4} sum_k A_k W_{nu-k}(x) is rewritten as
e^{x^2/4} (p0(x) W_mu(x) + p1(x) W'_mu(x)) with polynomial p0, p1, using

    W_{m+1} = (x/2) W_m - W'_m,      W'_{m+1} = -(x/2) W_{m+1} + (m+1) W_m.

Both identities hold for D and for the second-kind E ladder, so the same
polynomials serve both kinds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .connection import BhcConnection, exceptional_point_data, first_component_factor
from .errors import EvalError, PreconditionError, SingularFrame, SingularGauge
from .params import CanonicalParams, PrefactorDescriptor, canonical_to_general, to_jimbo_miwa
from .pcf import pcf_ladder, pcf_w, pcf_w_prime
from .pcfsum import PcfFrame
from .spectra import EigenPair, FiniteSolution, assemble_solution

SQRT2 = math.sqrt(2.0)
PRUNE = 1e-13
HALF_X = np.array([0.0, 0.5], dtype=complex)
QUARTER_X2 = np.array([0.0, 0.0, 0.25], dtype=complex)


def _prune(*polys: np.ndarray) -> list[np.ndarray]:
    top = max((float(np.max(np.abs(q))) for q in polys if q.size), default=0.0)
    out = []
    for q in polys:
        q = np.array(q, dtype=complex)
        q[np.abs(q) < PRUNE * top] = 0
        nz = np.nonzero(q)[0]
        out.append(q[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex))
    return out


@dataclass(frozen=True)
class GaugePair:
    """pref(z) e^{x^2/4} (p0(x) W_mu(x) + p1(x) W'_mu(x)); coefficients ascending in x."""

    p0: tuple
    p1: tuple
    base_order: complex
    kind: str
    prefactor: PrefactorDescriptor
    frame: PcfFrame | None = None

    def pcf_part(self, x: complex) -> complex:
        """e^{x^2/4} (p0 W_mu + p1 W'_mu) at the PCF argument x."""
        x = complex(x)
        # start the ladder at the source top order when it lies above mu + 1, so
        # both forms share the well-conditioned starting values
        start = self.base_order + 1
        if self.frame is not None:
            steps = self.frame.top_order - start
            if abs(steps.imag) < 1e-12 and round(steps.real) > 0 and abs(steps.real - round(steps.real)) < 1e-12:
                start = self.frame.top_order
        depth = int(round((start - self.base_order).real))
        lad = pcf_ladder(start, x, depth + 1, self.kind).values()
        w, dw = lad[depth], x / 2 * lad[depth] - lad[depth - 1]
        return np.exp(x * x / 4) * (P.polyval(x, self.p0) * w + P.polyval(x, self.p1) * dw)

    def __call__(self, z: complex) -> complex:
        if self.frame is None:
            raise EvalError("gauge pair has no argument map")
        z = complex(z)
        return np.exp(self.prefactor.log_value(z)) * self.pcf_part(self.frame.x_of(z))


def reduce_down(sol: FiniteSolution) -> GaugePair:
    """Rewrite the sum on the lowest order e/2 - N.

    Starting from (r1, r2) = (A_0, 0) on W_nu, each step lowers the base order
    by one and then adds the next coefficient to r1.
    """
    nu = complex(sol.top_order)
    coeffs = [complex(a) for a in sol.coeffs]
    r1 = np.array([coeffs[0]], dtype=complex)
    r2 = np.zeros(1, dtype=complex)
    mu = nu
    for a_k in coeffs[1:]:
        n1 = P.polyadd(P.polymul(r1, HALF_X), P.polymul(r2, P.polysub([mu], QUARTER_X2)))
        n2 = P.polyadd(-r1, P.polymul(r2, HALF_X))
        r1, r2 = _prune(P.polyadd(n1, [a_k]), n2)
        mu -= 1
    return GaugePair(tuple(r1), tuple(r2), mu, sol.kind, sol.prefactor, sol.frame)


def reduce_up(sol: FiniteSolution) -> GaugePair:
    """Rewrite the sum on the top order e/2.

    Starting from (r1, r2) = (A_N, 0) on W_{nu-N}, each step raises the base
    order by one and then adds the next coefficient up to r1.

    Raises:
        EvalError: if a raising step divides by m + 1 = 0.
    """
    nu = complex(sol.top_order)
    coeffs = [complex(a) for a in sol.coeffs]
    N = len(coeffs) - 1
    r1 = np.array([coeffs[N]], dtype=complex)
    r2 = np.zeros(1, dtype=complex)
    mu = nu - N
    for k in range(N - 1, -1, -1):
        m1 = mu + 1
        if abs(m1) < 1e-12:
            raise EvalError(f"raising through order {mu} divides by zero")
        n1 = P.polyadd(P.polymul(r1, HALF_X / m1), P.polymul(r2, P.polysub(QUARTER_X2 / m1, [1.0])))
        n2 = P.polyadd(r1 / m1, P.polymul(r2, HALF_X / m1))
        r1, r2 = _prune(P.polyadd(n1, [coeffs[k]]), n2)
        mu = m1
    return GaugePair(tuple(r1), tuple(r2), mu, sol.kind, sol.prefactor, sol.frame)


# ---------------------------------------------------------------------------
# Apparent singularity at the origin
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApparentSingularityResult:
    """Outcome of the Frobenius log test at z = 0.

    flag is 'Resonant' (integer exponent gap, obstruction computed),
    'NonResonant' (no log possible, trivially apparent) or 'EqualExponents'
    (alpha = 0, a log is always present).
    """

    apparent: bool
    obstruction: complex
    scale: float
    resonance_index: int | None
    flag: str
    small_series: tuple = ()
    large_series: tuple = ()

    def __bool__(self) -> bool:
        return self.apparent


def _frobenius(p: CanonicalParams, s: complex, count: int, stop_at: int | None = None):
    """Coefficients a_0 = 1, a_1, ... of sum a_n z^{n+s}; stops before index stop_at.

    (n+s)(n+s+alpha) a_n = (beta (n-1+s) + Q) a_{n-1} + (2 (n-2+s) - (gamma - alpha - 2)) a_{n-2},
    with Q = (delta + (1 + alpha) beta)/2.
    """
    a, be, g, de = (complex(v) for v in (p.alpha, p.beta, p.gamma_, p.delta))
    q = (de + (1 + a) * be) / 2
    coeffs = [1.0 + 0j]
    for n in range(1, count):
        t1 = (be * (n - 1 + s) + q) * coeffs[n - 1]
        t2 = (2 * (n - 2 + s) - (g - a - 2)) * coeffs[n - 2] if n >= 2 else 0j
        lead = (n + s) * (n + s + a)
        if stop_at is not None and n == stop_at:
            return coeffs, t1 + t2, abs(t1) + abs(t2)
        coeffs.append((t1 + t2) / lead)
    return coeffs, 0j, 0.0


def apparent_singularity_test(
    p: CanonicalParams, delta: complex | None = None, tol: float = 1e-10
) -> ApparentSingularityResult:
    """Whether z = 0 is free of logarithms for the canonical equation p.

    The exponents at the origin are 0 and -alpha. When they differ by a
    positive integer m the smaller-exponent series hits a zero leading factor
    at index m; the solution is log-free iff the right-hand side there
    vanishes, checked as |obstruction| <= tol * scale.

    Args:
        p: canonical parameters.
        delta: accessory parameter overriding p.delta.
        tol: relative tolerance on the obstruction.
    """
    if delta is not None:
        p = CanonicalParams(p.alpha, p.beta, p.gamma_, complex(delta))
    alpha = complex(p.alpha)
    m = round(alpha.real)
    if abs(alpha - m) > 1e-12:
        return ApparentSingularityResult(True, 0j, 0.0, None, "NonResonant")
    if m == 0:
        return ApparentSingularityResult(False, complex("nan"), 0.0, 0, "EqualExponents")
    gap = abs(m)
    s_small, s_large = (0.0, -float(m)) if m < 0 else (-float(m), 0.0)
    small, obstruction, parts = _frobenius(p, s_small, gap + 5, stop_at=gap)
    large, _, _ = _frobenius(p, s_large, gap + 5)
    scale = max(1.0, parts, max(abs(v) for v in small))
    apparent = abs(obstruction) <= tol * scale
    return ApparentSingularityResult(apparent, obstruction, scale, gap, "Resonant", tuple(small), tuple(large))


# ---------------------------------------------------------------------------
# System <-> scalar conversion
# ---------------------------------------------------------------------------


def _fd_derivative(f: Callable[[complex], np.ndarray], x: complex, h: float) -> np.ndarray:
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def system_to_scalar(
    m: Callable[[complex], np.ndarray],
    x: complex,
    dm: Callable[[complex], np.ndarray] | None = None,
    h: float = 1e-3,
):
    """Scalar equation y1'' + coeff1 y1' + coeff0 y1 = 0 of the system Y' = m(x) Y.

    coeff1 = -a11 - a22 - a12'/a12,
    coeff0 = a11 a22 - a21 a12 - a12 (a11/a12)'.

    Args:
        m: matrix-valued function of x.
        x: evaluation point.
        dm: derivative of m; a 5-point central difference with step h otherwise.
        h: finite-difference step.

    Returns:
        (coeff1, coeff0, y2_map) where y2_map(y1, dy1) = (dy1 - a11 y1)/a12.

    Raises:
        SingularGauge: if |a12(x)| < 1e-12.
    """
    x = complex(x)
    a = np.asarray(m(x), dtype=complex)
    da = np.asarray(dm(x), dtype=complex) if dm is not None else _fd_derivative(m, x, h)
    a11, a12, a21, a22 = a[0, 0], a[0, 1], a[1, 0], a[1, 1]
    if abs(a12) < 1e-12:
        raise SingularGauge(f"a12 vanishes at x={x}")
    d11, d12 = da[0, 0], da[0, 1]
    coeff1 = -a11 - a22 - d12 / a12
    coeff0 = a11 * a22 - a21 * a12 - (d11 - a11 * d12 / a12)

    def y2_map(y1: complex, dy1: complex) -> complex:
        return (dy1 - a11 * y1) / a12

    return coeff1, coeff0, y2_map


# ---------------------------------------------------------------------------
# Parabolic frame
# ---------------------------------------------------------------------------

A_PRIME = np.diag([0.5 + 0j, -0.5 + 0j])


@dataclass(frozen=True)
class ParabolicFrame:
    """Phi' = (A' x + B') Phi, A' = diag(1/2, -1/2), B' = [[0, r], [s, 0]], nu + 1 = -r s.

    Columns are built from D_nu and E_nu: Phi_1j = W_j, Phi_2j = (W_j' - (x/2) W_j)/r.
    """

    nu: complex
    r: complex
    s: complex

    def coefficient(self, x: complex) -> np.ndarray:
        return A_PRIME * complex(x) + np.array([[0, self.r], [self.s, 0]], dtype=complex)

    def _columns(self, x: complex):
        x = complex(x)
        out = []
        for kind in ("D", "E"):
            w = pcf_w(kind, self.nu, x).value
            dw = pcf_w_prime(kind, self.nu, x).value
            out.append((w, dw, (x * x / 4 - self.nu - 0.5) * w))
        return out

    def matrix(self, x: complex) -> np.ndarray:
        x = complex(x)
        cols = self._columns(x)
        return np.array([[w for w, _, _ in cols], [(dw - x / 2 * w) / self.r for w, dw, _ in cols]])

    def derivative(self, x: complex) -> np.ndarray:
        """Phi' from the Weber equation W'' = (x^2/4 - nu - 1/2) W."""
        x = complex(x)
        cols = self._columns(x)
        return np.array([[dw for _, dw, _ in cols], [(d2w - w / 2 - x / 2 * dw) / self.r for w, dw, d2w in cols]])

    def residual(self, x: complex) -> float:
        phi = self.matrix(x)
        return float(np.linalg.norm(self.derivative(x) - self.coefficient(x) @ phi) / (1 + np.linalg.norm(phi)))


def parabolic_frame(nu: complex, r: complex = 1.0) -> ParabolicFrame:
    """Frame of the parabolic connection with s = -(nu + 1)/r.

    Raises:
        EvalError: if r = 0.
    """
    if complex(r) == 0:
        raise EvalError("r = 0")
    nu, r = complex(nu), complex(r)
    return ParabolicFrame(nu, r, -(nu + 1) / r)


# ---------------------------------------------------------------------------
# Schlesinger verification
# ---------------------------------------------------------------------------


@dataclass
class SchlesingerGauge:
    """R(x) with Psi = R Phi, taking the parabolic connection P to the BHC connection A."""

    connection: BhcConnection
    pair: GaugePair
    b: complex
    r: complex

    @property
    def mu(self) -> complex:
        return self.pair.base_order

    def xi(self, x: complex) -> complex:
        return (self.b - 2 * complex(x)) / SQRT2

    def q_matrix(self, x: complex) -> np.ndarray:
        """Q with Psi = Q [[D_mu, E_mu], [D_mu', E_mu']] (derivatives in xi)."""
        x = complex(x)
        xi = self.xi(x)
        h, hl = first_component_factor(self.connection.data, x)
        a = self.connection(x)
        p0, p1 = np.asarray(self.pair.p0), np.asarray(self.pair.p1)
        v0, v1 = P.polyval(xi, p0), P.polyval(xi, p1)
        d0, d1 = P.polyval(xi, P.polyder(p0)), P.polyval(xi, P.polyder(p1))
        q0 = -SQRT2 * (xi / 2 * v0 + d0 + v1 * (xi * xi / 4 - self.mu - 0.5))
        q1 = -SQRT2 * (xi / 2 * v1 + v0 + d1)
        g = h * np.exp(xi * xi / 4)
        k = hl - a[0, 0]
        return g * np.array([[v0, v1], [(k * v0 + q0) / a[0, 1], (k * v1 + q1) / a[0, 1]]])

    def frame_change(self, x: complex) -> np.ndarray:
        """C with parabolic frame = C [[W], [W']]."""
        xi = self.xi(x)
        return np.array([[1, 0], [-xi / (2 * self.r), 1 / self.r]], dtype=complex)

    def __call__(self, x: complex) -> np.ndarray:
        return self.q_matrix(x) @ np.linalg.inv(self.frame_change(x))

    def parabolic(self, x: complex) -> np.ndarray:
        """P(x) = -sqrt(2) (A' xi + B'), the parabolic connection in the variable x."""
        s = -(self.mu + 1) / self.r
        return -SQRT2 * (A_PRIME * self.xi(x) + np.array([[0, self.r], [s, 0]], dtype=complex))

    def derivative(self, x: complex, h: float = 1e-4) -> np.ndarray:
        """R_x by 5-point differences at h and h/2 with one Richardson step."""
        coarse = _fd_derivative(self, complex(x), h)
        fine = _fd_derivative(self, complex(x), h / 2)
        return (16 * fine - coarse) / 15

    def residual(self, x: complex) -> float:
        x = complex(x)
        R = self(x)
        det = np.linalg.det(R)
        if abs(det) < 1e-12 * max(1.0, float(np.linalg.norm(R)) ** 2):
            raise SingularFrame(f"det R vanishes at x={x}")
        target = self.connection(x)
        built = (R @ self.parabolic(x) + self.derivative(x)) @ np.linalg.inv(R)
        return float(np.linalg.norm(target - built) / (1 + np.linalg.norm(target)))


def schlesinger_gauge(p: CanonicalParams, pair: EigenPair, u: complex = 1.0, r: complex = 1.0) -> SchlesingerGauge:
    """Gauge R for an eigenpair of the working system with 2 theta0 = alpha + 1 = -N.

    Raises:
        PreconditionError: unless alpha + 1 is a non-positive integer.
    """
    two_theta0 = 1 + complex(p.alpha)
    n = round(two_theta0.real)
    if abs(two_theta0 - n) > 1e-12 or n > 0:
        raise PreconditionError(f"2 theta0 = {two_theta0} is not a non-positive integer")
    if complex(r) == 0:
        raise PreconditionError("r = 0")
    sol = assemble_solution("I", p, pair, "D")
    full = sol.params
    conn = BhcConnection(exceptional_point_data(to_jimbo_miwa(full, strict=False), u))
    return SchlesingerGauge(conn, reduce_down(sol), complex(canonical_to_general(full).b), complex(r))


def schlesinger_verify(
    p: CanonicalParams, pair: EigenPair, x_samples, u: complex = 1.0, r: complex = 1.0
) -> float:
    """max over samples of |A - (R P + R_x) R^{-1}| / (1 + |A|).

    Raises:
        PreconditionError: unless 2 theta0 = alpha + 1 = -N with N >= 0.
        SingularFrame: if R is singular at a sample.
    """
    gauge = schlesinger_gauge(p, pair, u, r)
    return max(gauge.residual(x) for x in x_samples)
