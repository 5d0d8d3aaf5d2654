"""Parabolic cylinder functions D_nu and E_nu for complex order and argument.

D_nu is evaluated in the Whittaker normalisation (D_0(x) = exp(-x^2/4)) from a
pair of Kummer series. E_nu is a second solution of Weber's equation

    W'' = (x^2/4 - nu - 1/2) W

chosen so that it obeys the same order recurrences as D_nu:

    x W_nu = W_{nu+1} + nu W_{nu-1},      2 W'_nu = nu W_{nu-1} - W_{nu+1}.

Long runs of orders nu, nu-1, nu-2, ... are produced by `pcf_ladder`, which
recurses in order space and stores every value as mantissa * exp(logscale) so
that very negative orders neither overflow nor underflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DependenceError, DomainError, PoleError

EPS = float(np.finfo(float).eps)
SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG2 = math.log(2.0)

# Extended precision (x87 80-bit where available) for the Kummer pair inside
# pcf_d: the two branches cancel by up to ~1e5 when |nu| and |x| are moderate.
_XR = np.longdouble
_XC = np.clongdouble
XEPS = float(np.finfo(np.longdouble).eps)
_X_PI = _XR("3.14159265358979323846264338327950288")
_X_LOG2 = _XR("0.693147180559945309417232121458176568")
_X_HALF_LOG_2PI = _XR("0.918938533204672741780329736405617640")
# B_{2k} / (2k (2k - 1)) for the Stirling series, k = 1..10
_X_STIRLING = tuple(
    _XR(n) / _XR(d)
    for n, d in (
        (1, 12), (-1, 360), (1, 1260), (-1, 1680), (1, 1188),
        (-691, 360360), (1, 156), (-3617, 122400), (43867, 244188), (-174611, 125400),
    )
)

DEFAULT_X_RADIUS = 6.0
DEFAULT_KUMMER_RADIUS = 400.0
INTEGER_TOL = 1e-9

# Rational Lanczos-type approximation with gamma = 671/128 (14 terms).
_LANCZOS_SHIFT = 5.2421875
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)


@dataclass(frozen=True)
class PcfValue:
    """A function value together with a claimed absolute error bound."""

    value: complex
    abs_error_estimate: float

    def __complex__(self) -> complex:
        return complex(self.value)


def _nonpositive_integer(z: complex, tol: float = 0.0) -> bool:
    if abs(z.imag) > tol:
        return False
    n = round(z.real)
    return n <= 0 and abs(z.real - n) <= tol


def _loggamma_right(z: complex) -> complex:
    """log Gamma(z) for Re z >= 1/2 (principal-ish branch, fine for exp)."""
    tmp = z + _LANCZOS_SHIFT
    tmp = (z + 0.5) * cmath.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = z
    for c in _LANCZOS_COEF:
        y = y + 1.0
        ser += c / y
    return tmp + cmath.log(2.5066282746310005 * ser / z)


def loggamma(z: complex) -> complex:
    """A branch of log Gamma(z); exp of the result is Gamma(z).

    Raises:
        PoleError: if z is a non-positive integer.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real >= 0.5:
        return _loggamma_right(z)
    # Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _loggamma_right(1.0 - z)


def _gamma_rel_error(z: complex) -> float:
    w = z if z.real >= 0.5 else 1.0 - z
    t = w + _LANCZOS_SHIFT
    growth = abs((w + 0.5) * cmath.log(t)) + abs(t)
    rel = EPS * (16.0 + 2.0 * growth)
    if z.real < 0.5:
        rel += EPS * (4.0 + 2.0 * math.pi * abs(z))
    return rel


def gamma(z: complex) -> PcfValue:
    """Complex gamma function.

    Args:
        z: argument, not a non-positive integer.

    Returns:
        PcfValue with Gamma(z) and an absolute error estimate.

    Raises:
        PoleError: if z is in {0, -1, -2, ...}.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real >= 0.5 and z.imag == 0.0 and z.real == round(z.real) and z.real <= 171:
        val = complex(math.factorial(int(z.real) - 1))
        return PcfValue(val, EPS * abs(val))
    val = cmath.exp(loggamma(z))
    return PcfValue(val, _gamma_rel_error(z) * abs(val))


def rgamma(z: complex) -> complex:
    """Reciprocal gamma 1/Gamma(z), exactly zero at the poles."""
    z = complex(z)
    if _nonpositive_integer(z):
        return 0j
    return cmath.exp(-loggamma(z))


def _rgamma_ext(z) -> tuple:
    """1/Gamma(z) in extended precision and its relative error bound.

    Shifts the argument to Re w >= 25 with the rising factorial, then applies
    the Stirling series; exactly zero at the poles.
    """
    if _nonpositive_integer(complex(z)):
        return _XC(0), 0.0
    w = _XC(z)
    shift = _XC(1)
    steps = 0
    while w.real < 25:
        shift = shift * w
        w = w + 1
        steps += 1
    inv = 1 / w
    inv2 = inv * inv
    p = inv
    s = _XC(0)
    for c in _X_STIRLING:
        s = s + c * p
        p = p * inv2
    log_g = (w - _XR(0.5)) * np.log(w) - w + _X_HALF_LOG_2PI + s
    growth = abs(complex(w)) * max(1.0, math.log(abs(complex(w))))
    return shift * np.exp(-log_g), XEPS * (16.0 + 2.0 * steps + 4.0 * growth)


def _kummer_series_ext(a, b, z, max_terms: int = 20000) -> tuple:
    """1F1(a; b; z) summed in extended precision; (value, absolute error)."""
    a, b, z = _XC(a), _XC(b), _XC(z)
    scale = _XC(1)
    if z.real < 0 and not _nonpositive_integer(complex(a)):
        # Kummer's transformation keeps the terms from alternating
        scale = np.exp(z)
        a, z = b - a, -z
    t = _XC(1)
    total = _XC(1)
    rounding = 0.0
    az = abs(complex(z))
    amb = abs(complex(a - b))
    k = 0
    while True:
        num = a + k
        if num == 0:
            break
        t = t * num * z / ((b + k) * (k + 1))
        k += 1
        total = total + t
        at = abs(complex(t))
        rounding += (2 * k + 4) * XEPS * at
        denom = k + float(b.real)
        if denom > 0:
            rho = (1.0 + amb / denom) * az / (k + 1)
            if rho < 1.0 and at * rho / (1.0 - rho) <= XEPS * abs(complex(total)):
                rounding += at * rho / (1.0 - rho)
                break
        if at == 0:
            break
        if k >= max_terms:
            raise ConvergenceError(f"1F1({complex(a)}; {complex(b)}; {complex(z)}) did not converge in {max_terms} terms")
    value = scale * total
    return value, abs(complex(scale)) * (rounding + XEPS * abs(complex(total)))


def _csum(values) -> complex:
    """Compensated complex summation."""
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _kummer_series(a: complex, b: complex, z: complex, max_terms: int) -> tuple[complex, float]:
    terms = [1.0 + 0j]
    t = 1.0 + 0j
    running = 1.0 + 0j
    rounding = 4.0 * EPS
    tail = 0.0
    k = 0
    amb = abs(a - b)
    while True:
        num = a + k
        if num == 0:
            tail = 0.0
            break
        t = t * num * z / ((b + k) * (k + 1))
        k += 1
        terms.append(t)
        running += t
        rounding += (2 * k + 4) * EPS * abs(t)
        denom = k + b.real
        if denom > 0:
            rho = (1.0 + amb / denom) * abs(z) / (k + 1)
            if rho < 1.0:
                tail = abs(t) * rho / (1.0 - rho)
                scale = max(abs(running), EPS * sum(abs(v) for v in terms[-8:]), 1e-300)
                if tail <= 0.5 * EPS * scale:
                    break
        if t == 0:
            tail = 0.0
            break
        if k >= max_terms:
            raise ConvergenceError(f"1F1({a}; {b}; {z}) did not converge in {max_terms} terms")
    return _csum(terms), tail + rounding


def kummer_1f1(
    a: complex,
    b: complex,
    z: complex,
    radius: float = DEFAULT_KUMMER_RADIUS,
    max_terms: int = 20000,
) -> PcfValue:
    """Confluent hypergeometric function 1F1(a; b; z) by power series.

    For Re z < 0 the series is summed after Kummer's transformation
    1F1(a; b; z) = e^z 1F1(b - a; b; -z), which avoids cancellation.

    Args:
        a: numerator parameter.
        b: denominator parameter, not a non-positive integer.
        z: argument with |z| <= radius.
        radius: largest admissible |z|.
        max_terms: hard cap on the number of series terms.

    Raises:
        DomainError: if b is a non-positive integer or |z| > radius.
        ConvergenceError: if the tail bound is not met within max_terms.
    """
    a, b, z = complex(a), complex(b), complex(z)
    if _nonpositive_integer(b, 1e-14):
        raise DomainError(f"1F1 denominator parameter b={b} is a non-positive integer")
    if abs(z) > radius:
        raise DomainError(f"|z|={abs(z):.3g} exceeds the series radius {radius}")
    terminating = _nonpositive_integer(a)
    if z.real < 0 and not terminating:
        val, err = _kummer_series(b - a, b, -z, max_terms)
        ez = cmath.exp(z)
        value = ez * val
        return PcfValue(value, abs(ez) * err + EPS * abs(value))
    val, err = _kummer_series(a, b, z, max_terms)
    return PcfValue(val, err)


def _check_x(x: complex, radius: float) -> None:
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise DomainError("non-finite argument")
    if abs(x) > radius:
        raise DomainError(f"|x|={abs(x):.3g} exceeds the evaluation radius {radius}")


def pcf_d(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """Parabolic cylinder function D_nu(x) with D_0(x) = exp(-x^2/4).

    Uses D_nu(x) = 2^{nu/2} e^{-x^2/4} [ sqrt(pi)/Gamma((1-nu)/2) M(-nu/2, 1/2, x^2/2)
    - sqrt(2 pi) x / Gamma(-nu/2) M((1-nu)/2, 3/2, x^2/2) ] with 1/Gamma = 0 at poles.

    Args:
        nu: order.
        x: argument, |x| <= radius.
        radius: evaluation disk radius.
    """
    nu, x = complex(nu), complex(x)
    _check_x(x, radius)
    if abs(x) * abs(x) / 2.0 > DEFAULT_KUMMER_RADIUS:
        raise DomainError(f"|x|={abs(x):.3g} exceeds the series radius")
    # the two branches can cancel heavily, so they are formed in extended precision
    xn, xx = _XC(nu), _XC(x)
    z = xx * xx / 2
    pref = np.exp(xn / 2 * _X_LOG2 - xx * xx / 4)
    total = _XC(0)
    err = 0.0
    branches = (
        (np.sqrt(_X_PI), (1 - xn) / 2, -xn / 2, _XR(0.5)),
        (-np.sqrt(2 * _X_PI) * xx, -xn / 2, (1 - xn) / 2, _XR(1.5)),
    )
    for factor, g_arg, a, b in branches:
        rg, rg_rel = _rgamma_ext(g_arg)
        if rg == 0:
            continue
        m, m_err = _kummer_series_ext(a, b, z)
        c = factor * rg
        total = total + c * m
        err += abs(complex(c)) * (m_err + (rg_rel + 4 * XEPS) * abs(complex(m)))
    value = complex(pref * total)
    return PcfValue(value, abs(complex(pref)) * (err + 8 * XEPS * abs(complex(total))) + EPS * abs(value))


def pcf_d_prime(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """Derivative D'_nu(x) from 2 D'_nu = nu D_{nu-1} - D_{nu+1}."""
    nu = complex(nu)
    lo = pcf_d(nu - 1.0, x, radius)
    hi = pcf_d(nu + 1.0, x, radius)
    value = 0.5 * (nu * lo.value - hi.value)
    err = 0.5 * (abs(nu) * lo.abs_error_estimate + hi.abs_error_estimate) + EPS * abs(value)
    return PcfValue(value, err)


def pcf_d_jet(nu: complex, x: complex, max_terms: int = 4000) -> tuple[PcfValue, PcfValue, PcfValue]:
    """D_nu, D'_nu and D''_nu by term-by-term differentiation of the power series.

    This path shares nothing with the order recurrences and serves as an
    independent reference. Intended for moderate |x| (cancellation grows like
    exp(|x|^2/2)).
    """
    nu, x = complex(nu), complex(x)
    c1 = SQRT_PI * rgamma((1.0 - nu) / 2.0)
    c2 = -SQRT_2PI * rgamma(-nu / 2.0)
    # g(x) = sum_j g_j x^j with g_{2k} = c1 u_k, g_{2k+1} = c2 v_k
    a1, a2 = -nu / 2.0, (1.0 - nu) / 2.0
    u, v = 1.0 + 0j, 1.0 + 0j
    g, g1, g2 = [], [], []
    k = 0
    absmax = 0.0
    small = 0
    while k < max_terms:
        for j, coef in ((2 * k, c1 * u), (2 * k + 1, c2 * v)):
            if coef == 0:
                continue
            pj = x**j if j > 0 else 1.0 + 0j
            pj1 = j * x ** (j - 1) if j >= 1 else 0j
            pj2 = j * (j - 1) * x ** (j - 2) if j >= 2 else 0j
            g.append(coef * pj)
            g1.append(coef * pj1)
            g2.append(coef * pj2)
            absmax = max(absmax, abs(coef * pj), abs(coef * pj1), abs(coef * pj2))
        last = max((abs(t) for t in (g[-2:] + g1[-2:] + g2[-2:])), default=0.0)
        small = small + 1 if last <= EPS * 1e-3 * max(absmax, 1e-300) else 0
        if small >= 3 or (u == 0 and v == 0):
            break
        u = u * (a1 + k) / ((0.5 + k) * (k + 1)) / 2.0
        v = v * (a2 + k) / ((1.5 + k) * (k + 1)) / 2.0
        k += 1
    else:
        raise ConvergenceError("power series for D_nu did not converge")
    G, G1, G2 = _csum(g), _csum(g1), _csum(g2)
    pref = cmath.exp(nu / 2.0 * LOG2 - x * x / 4.0)
    d0 = pref * G
    d1 = pref * (G1 - x * G / 2.0)
    d2 = pref * (G2 - x * G1 + (x * x / 4.0 - 0.5) * G)
    err = abs(pref) * absmax * EPS * 8.0
    return PcfValue(d0, err), PcfValue(d1, err), PcfValue(d2, err)


def _frac_distance(nu: complex) -> float:
    return math.hypot(nu.real - round(nu.real), nu.imag)


def e_uses_fallback(nu: complex, tol: float = INTEGER_TOL) -> bool:
    """True when E_nu must use the reflected construction (nu near an integer)."""
    return _frac_distance(complex(nu)) < tol


def _e_wronskian_at_zero(nu: complex, radius: float) -> complex:
    d0 = pcf_d(nu, 0.0, radius).value
    d0p = pcf_d_prime(nu, 0.0, radius).value
    e0 = pcf_e_unchecked(nu, 0.0, radius).value
    e0p = pcf_e_prime_unchecked(nu, 0.0, radius).value
    return d0 * e0p - d0p * e0


def pcf_e_unchecked(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """E_nu(x) without the independence check."""
    nu, x = complex(nu), complex(x)
    dm = pcf_d(nu, -x, radius)
    if e_uses_fallback(nu):
        f = cmath.exp(1j * math.pi * nu)
        return PcfValue(f * dm.value, abs(f) * dm.abs_error_estimate)
    dp = pcf_d(nu, x, radius)
    c, s = cmath.cos(math.pi * nu), cmath.sin(math.pi * nu)
    value = (c * dp.value - dm.value) / s
    err = (abs(c) * dp.abs_error_estimate + dm.abs_error_estimate) / abs(s) + EPS * abs(value)
    return PcfValue(value, err)


def pcf_e_prime_unchecked(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    nu = complex(nu)
    lo = pcf_e_unchecked(nu - 1.0, x, radius)
    hi = pcf_e_unchecked(nu + 1.0, x, radius)
    value = 0.5 * (nu * lo.value - hi.value)
    err = 0.5 * (abs(nu) * lo.abs_error_estimate + hi.abs_error_estimate) + EPS * abs(value)
    return PcfValue(value, err)


def check_e_independent(nu: complex, radius: float = DEFAULT_X_RADIUS) -> None:
    """Raise DependenceError if E_nu is numerically dependent on D_nu."""
    nu = complex(nu)
    if not e_uses_fallback(nu):
        return
    w = _e_wronskian_at_zero(nu, radius)
    if abs(w) < 1e-10:
        raise DependenceError(
            f"second solution at order {nu} is dependent on D_nu (|W| = {abs(w):.2e})"
        )


def pcf_e(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """Second solution E_nu(x) sharing the recurrences of D_nu.

    For non-integer nu, E_nu(x) = [cos(pi nu) D_nu(x) - D_nu(-x)] / sin(pi nu);
    near integer nu the reflected solution exp(i pi nu) D_nu(-x) is used.

    Raises:
        DependenceError: if the Wronskian of (D_nu, E_nu) at 0 is below 1e-10.
    """
    check_e_independent(nu, radius)
    return pcf_e_unchecked(nu, x, radius)


def pcf_e_prime(nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """Derivative of E_nu from the shared ladder identity."""
    check_e_independent(nu, radius)
    return pcf_e_prime_unchecked(nu, x, radius)


def pcf_w(kind: str, nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    """Dispatch to D (kind 'D') or E (kind 'E')."""
    if kind == "D":
        return pcf_d(nu, x, radius)
    if kind == "E":
        return pcf_e_unchecked(nu, x, radius)
    raise ValueError(f"unknown kind {kind!r}")


def pcf_w_prime(kind: str, nu: complex, x: complex, radius: float = DEFAULT_X_RADIUS) -> PcfValue:
    if kind == "D":
        return pcf_d_prime(nu, x, radius)
    if kind == "E":
        return pcf_e_prime_unchecked(nu, x, radius)
    raise ValueError(f"unknown kind {kind!r}")


def pcf_log_asymptote(nu: complex, x: complex) -> complex:
    """Leading log-magnitude model (nu/2) log(-nu) - nu/2 - sqrt(-nu) x - log(2)/2.

    Raises:
        DomainError: unless |nu| >= 10 and |arg(-nu)| <= pi/2.
    """
    nu, x = complex(nu), complex(x)
    if abs(nu) < 10 or abs(cmath.phase(-nu)) > math.pi / 2 + 1e-12:
        raise DomainError("asymptote needs |nu| >= 10 and |arg(-nu)| <= pi/2")
    m = -nu
    return nu / 2.0 * cmath.log(m) - nu / 2.0 - cmath.sqrt(m) * x - 0.5 * LOG2


# ---------------------------------------------------------------------------
# Order ladders with scaled storage
# ---------------------------------------------------------------------------

_BIG = 1e120
_TINY = 1e-120


@dataclass
class ScaledArray:
    """Values mant[k] * exp(logs[k])."""

    mant: np.ndarray
    logs: np.ndarray

    def __len__(self) -> int:
        return len(self.mant)

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return self.mant * np.exp(self.logs)

    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mant)) + self.logs

    def scaled_by(self, factor: complex) -> "ScaledArray":
        return ScaledArray(self.mant * factor, self.logs.copy())

    def normalized(self) -> "ScaledArray":
        """Move magnitudes into logs so every |mant| is 1 or 0."""
        a = np.abs(self.mant)
        nz = a > 0
        mant = self.mant.copy()
        logs = self.logs.copy()
        mant[nz] = mant[nz] / a[nz]
        logs[nz] = logs[nz] + np.log(a[nz])
        return ScaledArray(mant, logs)


def combine(a: ScaledArray, ca: complex, b: ScaledArray, cb: complex) -> ScaledArray:
    """Elementwise ca * a + cb * b."""
    s = np.maximum(a.logs, b.logs)
    with np.errstate(under="ignore"):
        mant = ca * a.mant * np.exp(a.logs - s) + cb * b.mant * np.exp(b.logs - s)
    return ScaledArray(mant, s)


def _forward_ladder(nu: complex, x: complex, count: int, radius: float) -> ScaledArray:
    mant = np.zeros(count, dtype=complex)
    logs = np.zeros(count)
    hi = pcf_d(nu, x, radius).value  # order nu
    mant[0] = hi
    if count == 1:
        return ScaledArray(mant, logs)
    cur = pcf_d(nu - 1.0, x, radius).value  # order nu - 1
    mant[1] = cur
    s = 0.0
    for k in range(2, count):
        m = nu - (k - 1)  # order of cur
        if abs(m) < 1e-12:
            new = pcf_d(m - 1.0, x, radius).value * math.exp(-s)
        else:
            new = (x * cur - hi) / m
        hi, cur = cur, new
        a = abs(cur)
        if a > _BIG or (0 < a < _TINY):
            hi /= a
            cur /= a
            s += math.log(a)
        mant[k] = cur
        logs[k] = s
    return ScaledArray(mant, logs)


def _miller_ladder(nu: complex, x: complex, count: int, radius: float) -> ScaledArray:
    seed0 = pcf_d(nu, x, radius).value
    seed1 = pcf_d(nu - 1.0, x, radius).value
    span = math.sqrt(count + abs(nu)) + 18.0 / x.real
    depth = max(count + 10, int(span * span) + 10)
    mant = np.zeros(count, dtype=complex)
    logs = np.zeros(count)
    # f_j approximates D_{nu-j}; start at j = depth with (f_{j+1}, f_j) = (0, 1)
    upper, cur = 0j, 1.0 + 0j
    s = 0.0
    for j in range(depth, 0, -1):
        m = nu - j  # order of cur
        new = x * cur - m * upper  # order m + 1
        upper, cur = cur, new
        a = abs(cur)
        if a > _BIG or (0 < a < _TINY):
            upper /= a
            cur /= a
            s += math.log(a)
        if j - 1 < count:
            mant[j - 1] = cur
            logs[j - 1] = s
    # least-squares normalisation against the two seeds (orders nu, nu-1)
    ref = logs[0]
    f0 = mant[0]
    f1 = mant[1] * math.exp(logs[1] - ref)  # callers guarantee count >= 3
    lam = (f0.conjugate() * seed0 + f1.conjugate() * seed1) / (abs(f0) ** 2 + abs(f1) ** 2)
    return ScaledArray(mant * lam, logs - ref)


def d_ladder(nu: complex, x: complex, count: int, radius: float = DEFAULT_X_RADIUS) -> ScaledArray:
    """D_{nu-k}(x) for k = 0..count-1 as a ScaledArray.

    Downward recursion is used where it is stable (Re x not large compared
    with 1/sqrt(count)); otherwise Miller's backward scheme normalised to the
    two leading orders evaluated by series.
    """
    nu, x = complex(nu), complex(x)
    _check_x(x, radius)
    if count <= 0:
        return ScaledArray(np.zeros(0, dtype=complex), np.zeros(0))
    if x.real * math.sqrt(count + abs(nu)) <= 3.0 or count <= 2:
        return _forward_ladder(nu, x, count, radius)
    return _miller_ladder(nu, x, count, radius)


def pcf_ladder(
    nu: complex, x: complex, count: int, kind: str = "D", radius: float = DEFAULT_X_RADIUS
) -> ScaledArray:
    """W_{nu-k}(x), k = 0..count-1, for W = D or E, in scaled form."""
    nu, x = complex(nu), complex(x)
    if kind == "D":
        return d_ladder(nu, x, count, radius)
    if kind != "E":
        raise ValueError(f"unknown kind {kind!r}")
    refl = d_ladder(nu, -x, count, radius)
    sign = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
    refl = ScaledArray(refl.mant * sign, refl.logs)
    if e_uses_fallback(nu):
        return refl.scaled_by(cmath.exp(1j * math.pi * nu))
    direct = d_ladder(nu, x, count, radius)
    s = cmath.sin(math.pi * nu)
    return combine(direct, cmath.cos(math.pi * nu) / s, refl, -1.0 / s)
