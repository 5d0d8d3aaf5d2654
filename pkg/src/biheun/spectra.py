"""Accessory-parameter eigenproblem on the finite invariant subspaces.

With x = (b - 2z)/sqrt(2), the sum e^{x^2/4} sum_k A_k D_{e/2-k}(x) solves the
general-form equation when

    alpha_n A_{n+1} + beta_n A_n + gamma_n A_{n-1} = 0,
    alpha_n = -sqrt(2)(n+1),  beta_n = d + b n,  gamma_n = -sqrt(2)(n+c-1)(e/2-n+1).

If e = 2N or c = -N then gamma_{N+1} = 0 and the sum terminates exactly when d
is a root of the (N+1)x(N+1) tridiagonal determinant. Cases II-IV obtain the
same construction in the working parameters of the symmetries phi2, phi5, phi7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CriterionError, DependenceError, NotAnEigenvalue, RootFindError
from .params import (
    CanonicalParams,
    GeneralParams,
    PrefactorDescriptor,
    SymmetryElement,
    canonical_to_general,
    general_to_canonical,
    symmetry,
)
from .pcf import e_uses_fallback, pcf_ladder
from .pcfsum import Jet, PcfFrame, evaluate_finite, pcf_part_finite

SQRT2 = math.sqrt(2.0)

CASE_SYMMETRY = {"I": 1, "II": 2, "III": 5, "IV": 7}


def alpha_n(n: int) -> float:
    return -SQRT2 * (n + 1)


def gamma_n(c: complex, e: complex, n: int) -> complex:
    return -SQRT2 * (n + c - 1) * (e / 2 - n + 1)


@dataclass(frozen=True)
class TridiagonalSystem:
    """Rows n = 0..N of alpha_n A_{n+1} + (d + b n) A_n + gamma_n A_{n-1} = 0."""

    params: GeneralParams
    N: int
    sub: tuple  # gamma_1 .. gamma_N
    diag_const: tuple  # b n, n = 0..N
    sup: tuple  # alpha_0 .. alpha_{N-1}
    criterion: str

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def gamma_next(self) -> complex:
        return gamma_n(complex(self.params.c), complex(self.params.e), self.N + 1)

    def matrix(self, d: complex) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=complex)
        for n in range(self.size):
            m[n, n] = d + self.diag_const[n]
            if n + 1 < self.size:
                m[n, n + 1] = self.sup[n]
                m[n + 1, n] = self.sub[n]
        return m


def termination_criterion(p: GeneralParams, N: int, tol: float = 1e-9) -> str | None:
    """'e=2N', 'c=-N' (or both joined by '|'), or None."""
    hits = []
    if abs(complex(p.e) - 2 * N) <= tol:
        hits.append("e=2N")
    if abs(complex(p.c) + N) <= tol:
        hits.append("c=-N")
    return "|".join(hits) or None


def build_tridiagonal(p: GeneralParams, N: int, tol: float = 1e-9) -> TridiagonalSystem:
    """Tridiagonal recursion data for the N-th invariant subspace.

    Raises:
        CriterionError: unless e = 2N or c = -N within tol.
    """
    if N < 0:
        raise CriterionError("N must be non-negative")
    crit = termination_criterion(p, N, tol)
    if crit is None:
        raise CriterionError(
            f"termination criterion fails: need e = 2N or c = -N for N = {N} (got c={p.c}, e={p.e})"
        )
    b, c, e = complex(p.b), complex(p.c), complex(p.e)
    return TridiagonalSystem(
        params=p,
        N=N,
        sub=tuple(gamma_n(c, e, n) for n in range(1, N + 1)),
        diag_const=tuple(b * n for n in range(N + 1)),
        sup=tuple(alpha_n(n) for n in range(N)),
        criterion=crit,
    )


def characteristic_polynomial(sys: TridiagonalSystem) -> np.ndarray:
    """Coefficients (ascending powers of d) of det of the tridiagonal matrix."""
    prev = np.array([1.0 + 0j])
    cur = np.array([0.0 + 0j, 1.0 + 0j])  # p_1 = d + b*0
    for k in range(1, sys.size):
        nxt = P.polysub(P.polymul([sys.diag_const[k], 1.0], cur), sys.sup[k - 1] * sys.sub[k - 1] * prev)
        prev, cur = cur, nxt
    return cur


def _continuant(sys: TridiagonalSystem, d: complex) -> tuple[complex, complex]:
    """det and d/dd det at d via the three-term recursion."""
    p0, p1 = 1.0 + 0j, d
    q0, q1 = 0j, 1.0 + 0j
    for k in range(1, sys.size):
        w = sys.sup[k - 1] * sys.sub[k - 1]
        p0, p1, q0, q1 = p1, (d + sys.diag_const[k]) * p1 - w * p0, q1, p1 + (d + sys.diag_const[k]) * q1 - w * q0
    return p1, q1


def _is_real_case(p: GeneralParams) -> bool:
    vals = [complex(p.b), complex(p.c), complex(p.e)]
    return all(abs(v.imag) <= 1e-14 * max(1.0, abs(v)) for v in vals) and complex(p.c).real > 0


def eigenvalues_d(sys: TridiagonalSystem) -> list[complex]:
    """The N+1 roots of the determinant, sorted by (real, imaginary) part.

    Roots come from the companion matrix of the continuant polynomial and are
    polished by Newton steps on the continuant itself.

    Raises:
        RootFindError: if the companion eigenvalue computation fails.
    """
    coeffs = characteristic_polynomial(sys)
    try:
        roots = np.roots(coeffs[::-1]) if sys.size > 1 else np.array([0j])
    except np.linalg.LinAlgError as exc:
        raise RootFindError(str(exc)) from exc
    if len(roots) != sys.size or not np.all(np.isfinite(roots)):
        raise RootFindError("companion matrix returned an incomplete spectrum")
    polished = []
    for r in roots:
        r = complex(r)
        val, der = _continuant(sys, r)
        for _ in range(6):
            if der == 0:
                break
            step = val / der
            trial = r - step
            tval, tder = _continuant(sys, trial)
            if abs(tval) >= abs(val):
                break
            r, val, der = trial, tval, tder
        polished.append(r)
    if _is_real_case(sys.params):
        polished = [complex(r.real, 0.0) for r in polished]
    polished.sort(key=lambda r: (round(r.real, 10), round(r.imag, 10)))
    return polished


@dataclass(frozen=True)
class EigenPair:
    d: complex
    coeffs: tuple
    closure_residual: float = 0.0


def forward_coefficients(p: GeneralParams, d: complex, count: int) -> np.ndarray:
    """A_0 .. A_{count-1} from A_0 = 1 by forward recursion."""
    b, c, e = complex(p.b), complex(p.c), complex(p.e)
    a = np.zeros(count, dtype=complex)
    a[0] = 1.0
    for n in range(count - 1):
        prev = a[n - 1] if n >= 1 else 0j
        a[n + 1] = -((d + b * n) * a[n] + gamma_n(c, e, n) * prev) / alpha_n(n)
    return a


def closure_residual(sys: TridiagonalSystem, d: complex, coeffs) -> complex:
    """Last matrix row (d + bN) A_N + gamma_N A_{N-1}."""
    N = sys.N
    last = (d + sys.diag_const[N]) * coeffs[N]
    if N >= 1:
        last += sys.sub[N - 1] * coeffs[N - 1]
    return last


def eigen_coeffs(sys: TridiagonalSystem, d: complex, tol: float = 1e-10) -> EigenPair:
    """Coefficient vector (A_0 = 1) for an eigenvalue d.

    Raises:
        NotAnEigenvalue: if the closing row exceeds tol * max|A_k| * row scale.
    """
    d = complex(d)
    a = forward_coefficients(sys.params, d, sys.size)
    res = abs(closure_residual(sys, d, a))
    row_scale = max(1.0, abs(d + sys.diag_const[-1]), abs(sys.sub[-1]) if sys.N else 0.0)
    if res > tol * float(np.max(np.abs(a))) * row_scale:
        raise NotAnEigenvalue(f"d={d} leaves closure residual {res:.3e}")
    return EigenPair(d, tuple(complex(v) for v in a), res)


# ---------------------------------------------------------------------------
# Finite solutions in the four cases
# ---------------------------------------------------------------------------


def case_element(case_tag: str) -> SymmetryElement:
    try:
        return symmetry(CASE_SYMMETRY[case_tag])
    except KeyError as exc:
        raise CriterionError(f"unknown case {case_tag!r}; expected I, II, III or IV") from exc


def working_general(case_tag: str, p: CanonicalParams) -> GeneralParams:
    """General-form parameters after the case's symmetry (d from p's delta)."""
    return canonical_to_general(case_element(case_tag).act(p))


def case_system(case_tag: str, p: CanonicalParams, N: int, tol: float = 1e-9) -> TridiagonalSystem:
    return build_tridiagonal(working_general(case_tag, p), N, tol)


def original_params(case_tag: str, p: CanonicalParams, d_work: complex) -> CanonicalParams:
    """Full canonical parameters (delta recovered) for a working eigenvalue."""
    g = working_general(case_tag, p)
    work = general_to_canonical(GeneralParams(g.b, g.c, d_work, g.e))
    return case_element(case_tag).inverse().act(work)


@dataclass(frozen=True)
class FiniteSolution:
    """prefactor(z) * e^{x^2/4} sum_k A_k W_{nu-k}(x), x = (b_w - 2 sigma z)/sqrt(2)."""

    case_tag: str
    frame: PcfFrame
    coeffs: tuple
    params: CanonicalParams
    working: GeneralParams

    @property
    def kind(self) -> str:
        return self.frame.kind

    @property
    def top_order(self) -> complex:
        return self.frame.top_order

    @property
    def prefactor(self) -> PrefactorDescriptor:
        return self.frame.prefactor

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def jet(self, z: complex) -> Jet:
        return evaluate_finite(self.frame, np.asarray(self.coeffs), z)

    def __call__(self, z: complex) -> complex:
        return self.jet(z).y

    def pcf_part(self, x: complex) -> complex:
        """The sum e^{x^2/4} sum A_k W_{nu-k}(x) in the PCF variable."""
        return pcf_part_finite(self.frame.top_order, self.frame.kind, self.coeffs, x, self.frame.radius)


def _check_e_orders(top: complex, N: int) -> None:
    if not e_uses_fallback(top):
        return
    n_top = round(top.real)
    if n_top >= 0:
        raise DependenceError(
            f"second-kind sum at integer orders {n_top}..{n_top - N} coincides with the first kind"
        )


def assemble_solution(
    case_tag: str, p: CanonicalParams, pair: EigenPair, kind: str = "D", radius: float = 6.0
) -> FiniteSolution:
    """Finite eigen-solution of the original equation for a working eigenpair.

    Args:
        case_tag: 'I' (identity), 'II' (phi2), 'III' (phi5) or 'IV' (phi7).
        p: original canonical parameters (delta is ignored).
        pair: eigenpair of the working system.
        kind: 'D' or 'E' (second kind, needs non-integer or negative orders).

    Raises:
        CriterionError: if the working parameters do not terminate at N.
        DependenceError: second kind requested at non-negative integer orders.
    """
    g = working_general(case_tag, p)
    N = len(pair.coeffs) - 1
    if termination_criterion(g, N) is None:
        raise CriterionError(f"case {case_tag}: working parameters do not satisfy e = 2N or c = -N")
    top = complex(g.e) / 2
    if kind == "E":
        _check_e_orders(top, N)
    elif kind != "D":
        raise ValueError(f"unknown kind {kind!r}")
    el = case_element(case_tag)
    full = original_params(case_tag, p, pair.d)
    frame = PcfFrame(top, complex(g.b), el.sigma, el.prefactor(full), kind, radius)
    working = GeneralParams(g.b, g.c, pair.d, g.e)
    return FiniteSolution(case_tag, frame, tuple(pair.coeffs), full, working)


def eigen_solutions(
    case_tag: str, p: CanonicalParams, N: int, kind: str = "D"
) -> list[tuple[complex, FiniteSolution]]:
    """All N+1 (delta_j, solution_j) pairs for a case."""
    sys = case_system(case_tag, p, N)
    out = []
    for d in eigenvalues_d(sys):
        pair = eigen_coeffs(sys, d)
        sol = assemble_solution(case_tag, p, pair, kind)
        out.append((sol.params.delta, sol))
    return out


def bhe_residual(sol, p: CanonicalParams, z: complex) -> float:
    """Normalised residual of the canonical equation at z.

    |z y'' + (1 + alpha - beta z - 2 z^2) y' + ((gamma - alpha - 2) z - (delta + (1 + alpha) beta)/2) y|
    divided by 1 + |y| + |y'| + |y''|.
    """
    z = complex(z)
    j = sol.jet(z)
    a, be, g, de = (complex(v) for v in (p.alpha, p.beta, p.gamma_, p.delta))
    r = z * j.d2y + (1 + a - be * z - 2 * z * z) * j.dy + ((g - a - 2) * z - (de + (1 + a) * be) / 2) * j.y
    return abs(r) / (1 + abs(j.y) + abs(j.dy) + abs(j.d2y))


def sample_points(n: int = 20, radii=(0.5, 1.5), seed: int = 0) -> list[complex]:
    """Fixed sample grid: n points split over circles of the given radii."""
    rng = np.random.default_rng(seed)
    per = n // len(radii)
    pts = []
    for i, r in enumerate(radii):
        m = per if i < len(radii) - 1 else n - per * (len(radii) - 1)
        phase = rng.uniform(0, 2 * np.pi)
        pts.extend(r * np.exp(1j * (phase + 2 * np.pi * np.arange(m) / m)))
    return [complex(v) for v in pts]


# ---------------------------------------------------------------------------
# Operator action on the invariant-subspace basis
# ---------------------------------------------------------------------------


def operator_on_basis(p: GeneralParams, k: int, x: complex) -> complex:
    """(b - sqrt2 x) F'' + (sqrt2 x^2 - b x - sqrt2 c) F' + (-e x/sqrt2 + b e/2) F at x.

    F = e^{x^2/4} D_{e/2-k}(x), differentiated through the ladder
    d/dx[e^{x^2/4} D_mu] = mu e^{x^2/4} D_{mu-1}.
    """
    b, c, e = complex(p.b), complex(p.c), complex(p.e)
    mu = e / 2 - k
    vals = pcf_ladder(mu, x, 3).values()
    w = np.exp(x * x / 4)
    f0 = w * vals[0]
    f1 = w * mu * vals[1]
    f2 = w * mu * (mu - 1) * vals[2]
    return (b - SQRT2 * x) * f2 + (SQRT2 * x * x - b * x - SQRT2 * c) * f1 + (-e * x / SQRT2 + b * e / 2) * f0


@dataclass
class Reexpansion:
    coefficients: np.ndarray  # coefficient of basis j = 0..n_basis-1
    residual: float  # relative least-squares residual


def operator_reexpansion(p: GeneralParams, k: int, n_basis: int, samples) -> Reexpansion:
    """Least-squares expansion of the operator image of basis_k in basis_0..n_basis-1."""
    e = complex(p.e)
    xs = [complex(s) for s in samples]
    mat = np.zeros((len(xs), n_basis), dtype=complex)
    rhs = np.zeros(len(xs), dtype=complex)
    for i, x in enumerate(xs):
        vals = pcf_ladder(e / 2, x, n_basis).values()
        mat[i, :] = np.exp(x * x / 4) * vals
        rhs[i] = operator_on_basis(p, k, x)
    coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    res = np.linalg.norm(mat @ coef - rhs) / max(np.linalg.norm(rhs), 1e-300)
    return Reexpansion(coef, float(res))


def expected_operator_row(p: GeneralParams, k: int) -> dict[int, complex]:
    """Nonzero coefficients of the operator image of basis_k (from the recursion)."""
    b, c, e = complex(p.b), complex(p.c), complex(p.e)
    out = {k: b * k, k + 1: -SQRT2 * (e / 2 - k) * (c + k)}
    if k >= 1:
        out[k - 1] = -SQRT2 * k
    return out

