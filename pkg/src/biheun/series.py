"""Infinite parabolic cylinder expansions and the entire glued solution.

Base:  y(z) = e^{x^2/4} sum_n A_n D_{e/2-n}(x),              x = (b - 2z)/sqrt(2)
Phi5:  Phi(z) = e^{(z-b/2)^2/2} sum_n A~_n D_{-e/2-c-1-n}(i(b - 2z)/sqrt(2))
Phi4:  Psi(z) = e^{(z-b/2)^2/2} sum_n B~_n D_{-e/2-c-1-n}(i(2z - b)/sqrt(2))

Phi5 and Phi4 are the Base expansion in the working parameters of the
symmetries phi5 (sigma = i) and phi4 (sigma = -i):

    Phi5: (b, c, d, e) -> (i b,  c,  i(bc - d), -e - 2c - 2)
    Phi4: (b, c, d, e) -> (-i b, c, -i(bc - d), -e - 2c - 2)

The coefficients grow like sqrt((n-2)!) n^alpha exp(gamma sqrt(n)) while
D_{nu-n}(x) decays like exp((nu/2 - n/2) log n + n/2 - x sqrt(n)); their
product decays geometrically in sqrt(n) inside the convergence region and
algebraically (like n^{c/2 - 3/2}) on its boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DivisionError, PreconditionError, RegionError
from .params import GeneralParams, PrefactorDescriptor, symmetry
from .pcf import EPS, ScaledArray, pcf_ladder
from .pcfsum import Jet, PcfFrame, csum, jet_from_sums, ladder_sums
from .spectra import alpha_n, gamma_n

SQRT2 = math.sqrt(2.0)


class Variant(str, Enum):
    BASE = "Base"
    PHI4 = "Phi4"
    PHI5 = "Phi5"


_VARIANT_SYMMETRY = {Variant.BASE: 1, Variant.PHI4: 4, Variant.PHI5: 5}


def working_params(p: GeneralParams, variant: Variant | str) -> GeneralParams:
    """Parameters whose Base recursion generates the variant's coefficients."""
    variant = Variant(variant)
    b, c, d, e = (complex(v) for v in (p.b, p.c, p.d, p.e))
    if variant is Variant.BASE:
        return GeneralParams(b, c, d, e)
    s = 1j if variant is Variant.PHI5 else -1j
    return GeneralParams(s * b, c, s * (b * c - d), -e - 2 * c - 2)


def variant_sigma(variant: Variant | str) -> complex:
    return symmetry(_VARIANT_SYMMETRY[Variant(variant)]).sigma


class CoeffStream:
    """Lazy A_0, A_1, ... from the variant's three-term recursion (A_0 = a0).

    Iterating yields plain complex numbers, which overflow after a few hundred
    terms; `scaled(count)` returns rescaled mantissas with log-scales instead.
    """

    def __init__(self, p: GeneralParams, variant: Variant | str = Variant.BASE, a0: complex = 1.0):
        self.params = p
        self.variant = Variant(variant)
        self.working = working_params(p, self.variant)
        self.a0 = complex(a0)
        self._mant = np.zeros(0, dtype=complex)
        self._logs = np.zeros(0)

    def __iter__(self):
        w = self.working
        b, c, d, e = (complex(v) for v in (w.b, w.c, w.d, w.e))
        prev, cur, n = 0j, self.a0, 0
        while True:
            yield cur
            nxt = -((d + b * n) * cur + gamma_n(c, e, n) * prev) / alpha_n(n)
            prev, cur, n = cur, nxt, n + 1

    def take(self, count: int) -> list[complex]:
        out = []
        for v in self:
            if len(out) >= count:
                break
            out.append(v)
        return out

    def scaled(self, count: int) -> ScaledArray:
        """First `count` coefficients as mantissa * exp(log-scale)."""
        if len(self._mant) < count:
            self._extend(count)
        return ScaledArray(self._mant[:count].copy(), self._logs[:count].copy())

    def _extend(self, count: int) -> None:
        w = self.working
        b, c, d, e = (complex(v) for v in (w.b, w.c, w.d, w.e))
        mant = np.zeros(count, dtype=complex)
        logs = np.zeros(count)
        prev, cur, s = 0j, self.a0, 0.0
        mant[0] = cur
        for n in range(count - 1):
            nxt = -((d + b * n) * cur + gamma_n(c, e, n) * prev) / alpha_n(n)
            prev, cur = cur, nxt
            a = max(abs(cur), abs(prev))
            if a > 1e100 or (0 < a < 1e-100):
                prev /= a
                cur /= a
                s += math.log(a)
            mant[n + 1] = cur
            logs[n + 1] = s
        self._mant, self._logs = mant, logs

    def log_abs(self, count: int) -> np.ndarray:
        return self.scaled(count).log_abs()


def coeff_stream(p: GeneralParams, variant: Variant | str = Variant.BASE) -> CoeffStream:
    return CoeffStream(p, variant)


# ---------------------------------------------------------------------------
# Asymptotic models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticModel:
    """A_n ~ [(n-2)!]^{q/2} rho^n exp(gamma sqrt(n)) n^alpha (one of two branches)."""

    rho: complex
    gamma_coef: complex
    alpha_exp: complex
    q: int = 1
    a0: complex = 0j
    b0: complex = -1.0
    b1: complex = 0j

    def log_magnitude(self, n) -> np.ndarray:
        """Real part of the model log|A_n| (up to an additive constant)."""
        n = np.asarray(n, dtype=float)
        lg = np.array([math.lgamma(v - 1) for v in np.atleast_1d(n)])
        return self.q / 2 * lg + (self.gamma_coef * np.sqrt(n)).real + (self.alpha_exp * np.log(n)).real


def wong_li_model(p: GeneralParams, variant: Variant | str = Variant.BASE) -> list[AsymptoticModel]:
    """Both formal-solution branches (rho = +1, -1) of the coefficient recursion.

    Writing the recursion as y(n+2) + a(n) y(n+1) + n b(n) y(n) = 0 with
    a(n) ~ a0, b(n) ~ b0 + b1/n gives rho^2 = -b0, gamma = -a0/rho and
    alpha = b1/(2 b0) + 1/4.
    """
    w = working_params(p, variant)
    b, c, e = complex(w.b), complex(w.c), complex(w.e)
    a0 = -b / SQRT2
    b0 = -1.0 + 0j
    b1 = 2 + e / 2 - c
    alpha = b1 / (2 * b0) + 0.25
    return [AsymptoticModel(rho, -a0 / rho, alpha, 1, a0, b0, b1) for rho in (1.0 + 0j, -1.0 + 0j)]


def coefficient_growth_model(p: GeneralParams, n) -> np.ndarray:
    """Stirling-form model of log|A_n| for the dominant Base branch.

    (2n-3)/4 log(n-2) - n/2 + |Re b| sqrt(n/2) + Re(c/2 - e/4 - 3/4) log n.
    """
    n = np.asarray(n, dtype=float)
    b, c, e = complex(p.b), complex(p.c), complex(p.e)
    return (
        (2 * n - 3) / 4 * np.log(n - 2)
        - n / 2
        + abs(b.real) * np.sqrt(n / 2)
        + (c / 2 - e / 4 - 0.75).real * np.log(n)
    )


def log_term_model(model: AsymptoticModel, p: GeneralParams, x: complex, n: int) -> complex:
    """(gamma - x) sqrt(n) + (c/2 - 3/2) log n: model of log(A_n D_{e/2-n}(x)) up to a constant."""
    c = complex(p.c)
    return (model.gamma_coef - complex(x)) * math.sqrt(n) + (c / 2 - 1.5) * math.log(n)


# ---------------------------------------------------------------------------
# Convergence regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredicateResult:
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def convergence_predicate(
    variant: Variant | str, p: GeneralParams, z: complex, tol: float = 1e-14
) -> PredicateResult:
    """Whether z lies in the absolute-convergence region of the variant.

    In working variables w = sigma z and working b the region is
    Re w < 0 and Re(w - 2 b_w) < 0; for the rotated variants this reads
    Im z > 0, Im z > 2 Im b (Phi5) and Im z < 0, Im z < 2 Im b (Phi4).
    An equality is admitted when Re c < -1/2.
    """
    variant = Variant(variant)
    z = complex(z)
    sigma = variant_sigma(variant)
    bw = complex(working_params(p, variant).b)
    w = sigma * z
    checks = [("Re(sigma z)", w.real), ("Re(sigma z - 2 b_w)", (w - 2 * bw).real)]
    boundary_ok = complex(p.c).real < -0.5
    scale = max(1.0, abs(z), abs(bw))
    for name, val in checks:
        if val < -tol * scale:
            continue
        if abs(val) <= tol * scale:
            if boundary_ok:
                continue
            return PredicateResult(False, f"{name} = 0 on the boundary and Re c >= -1/2")
        return PredicateResult(False, f"{name} = {val:.3g} >= 0")
    return PredicateResult(True, f"{variant.value}: inside convergence region")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncationPolicy:
    eps: float = 1e-12
    m: int = 5
    cap: int = 5000
    min_terms: int = 0


@dataclass
class SeriesSolution:
    """Truncated infinite PCF expansion of a variant, evaluable in its region."""

    params: GeneralParams
    variant: Variant
    kind: str = "D"
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    prefactor: PrefactorDescriptor | None = None
    radius: float = 6.0

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.stream = CoeffStream(self.params, self.variant)
        w = self.stream.working
        if self.prefactor is None:
            self.prefactor = default_prefactor(self.params, self.variant)
        self.frame = PcfFrame(complex(w.e) / 2, complex(w.b), variant_sigma(self.variant), self.prefactor, self.kind, self.radius)

    def jet(self, z: complex) -> Jet:
        return _evaluate(self, complex(z))[0]

    def __call__(self, z: complex) -> complex:
        return self.jet(z).y

    def terms_used(self, z: complex) -> int:
        return _evaluate(self, complex(z))[1]


def default_prefactor(p: GeneralParams, variant: Variant | str) -> PrefactorDescriptor:
    """Trivial for Base; exp(z^2 - b z + b^2/4) for Phi4/Phi5.

    Together with the e^{x^2/4} of the sum this gives the overall factor
    exp((z - b/2)^2 / 2) of the rotated expansions.
    """
    if Variant(variant) is Variant.BASE:
        return PrefactorDescriptor()
    b = complex(p.b)
    return PrefactorDescriptor(q1=-b, q2=1.0 + 0j, log_const=b * b / 4)


def _terminating_length(stream: CoeffStream, tol: float = 1e-10) -> int | None:
    w = stream.working
    c, e = complex(w.c), complex(w.e)
    for cand in (-c, e / 2):
        n = round(cand.real)
        if abs(cand - n) < 1e-12 and 0 <= n < 10_000:
            a = stream.scaled(n + 2).values()
            if abs(a[n + 1]) <= tol * float(np.max(np.abs(a[: n + 1]))):
                return n + 1
    return None


def _evaluate(sol: SeriesSolution, z: complex) -> tuple[Jet, int]:
    pred = convergence_predicate(sol.variant, sol.params, z)
    if not pred:
        raise RegionError(pred.reason)
    pol = sol.policy
    frame = sol.frame
    x = frame.x_of(z)
    nu = frame.top_order
    fixed = None
    if sol.kind == "E":
        fixed = _terminating_length(sol.stream)
        if fixed is None:
            raise RegionError("second-kind expansions are only evaluated when the coefficients terminate")
    n_try = fixed if fixed is not None else max(64, pol.min_terms + pol.m)
    while True:
        n_try = min(n_try, pol.cap)
        coeffs = sol.stream.scaled(n_try)
        ladder = pcf_ladder(nu, x, n_try + 2, frame.kind, frame.radius)
        t0, t1, t2, ref = ladder_sums(nu, coeffs, ladder, n_try)
        stop = n_try if fixed is not None else _stop_index(t0, t1, t2, pol)
        if stop is not None:
            break
        if n_try >= pol.cap:
            raise ConvergenceError(f"series did not settle within {pol.cap} terms at z={z}")
        n_try *= 2
    s0 = csum(t0[:stop])
    tail = float(np.sum(np.abs(t0[max(0, stop - pol.m) : stop])))
    a = np.abs(t0[max(1, stop - pol.m) - 1 : stop])
    if fixed is None and len(a) >= 2 and a[-2] > 0:
        r = a[-1] / a[-2]
        if r < 1:
            tail += a[-1] * r / (1 - r)
    err = tail + 64 * EPS * float(np.sum(np.abs(t0[:stop])))
    jet = jet_from_sums(frame, z, x, s0, csum(t1[:stop]), csum(t2[:stop]), ref, err)
    return jet, stop


def _stop_index(t0, t1, t2, pol: TruncationPolicy) -> int | None:
    small = np.ones(len(t0), dtype=bool)
    for t in (t0, t1, t2):
        run = np.cumsum(t)
        small &= np.abs(t) <= pol.eps * np.abs(run)
    count = 0
    for k, flag in enumerate(small):
        count = count + 1 if flag else 0
        if count >= pol.m and k + 1 >= pol.min_terms:
            return k + 1
    return None


def evaluate_series(sol: SeriesSolution, z: complex):
    """Value and error estimate of a truncated expansion at z.

    Raises:
        RegionError: outside the convergence region.
        ConvergenceError: if the truncation rule is not met within the cap.
    """
    from .pcf import PcfValue

    jet = sol.jet(z)
    return PcfValue(jet.y, jet.abs_error)


# ---------------------------------------------------------------------------
# Entire solution
# ---------------------------------------------------------------------------


@dataclass
class EntireSolution:
    """C0 * Phi on Im z > 0, Psi on Im z <= 0, with C0 = Psi(b/2) / Phi(b/2)."""

    params: GeneralParams
    phi: SeriesSolution
    psi: SeriesSolution
    c0: complex

    def upper(self, z: complex) -> Jet:
        j = self.phi.jet(z)
        return Jet(self.c0 * j.y, self.c0 * j.dy, self.c0 * j.d2y, abs(self.c0) * j.abs_error)

    def lower(self, z: complex) -> Jet:
        return self.psi.jet(z)

    def jet(self, z: complex) -> Jet:
        z = complex(z)
        return self.upper(z) if z.imag > 0 else self.lower(z)

    def __call__(self, z: complex) -> complex:
        return self.jet(z).y


def glue_entire(p: GeneralParams, policy: TruncationPolicy | None = None) -> EntireSolution:
    """Glue the rotated expansions into one entire solution.

    Raises:
        PreconditionError: unless b is real and Re c < -1/2.
        DivisionError: if Psi(b/2) or Phi(b/2) vanishes numerically.
    """
    b, c = complex(p.b), complex(p.c)
    if abs(b.imag) > 1e-14 * max(1.0, abs(b)):
        raise PreconditionError("gluing needs real b")
    if not c.real < -0.5:
        raise PreconditionError("gluing needs Re c < -1/2")
    policy = policy or TruncationPolicy()
    phi = SeriesSolution(p, Variant.PHI5, "D", policy)
    psi = SeriesSolution(p, Variant.PHI4, "D", policy)
    z0 = complex(b.real / 2, 0.0)
    num, den = psi(z0), phi(z0)
    if abs(num) < 1e-300 or abs(den) < 1e-300:
        raise DivisionError("Psi(b/2) or Phi(b/2) vanishes")
    return EntireSolution(p, phi, psi, num / den)
