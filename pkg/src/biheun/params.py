"""Parameterisations of the biconfluent Heun equation and their symmetries.

Canonical form (alpha, beta, gamma, delta):

    z y'' + (1 + alpha - beta z - 2 z^2) y' + ((gamma - alpha - 2) z - (delta + (1 + alpha) beta)/2) y = 0

General form (b, c, d, e):

    z y'' + (-2 z^2 + b z + c) y' + (d + e z) y = 0

with (alpha, beta, gamma, delta) = (c - 1, -b, e + c + 1, b c - 2 d). The
connection (Jimbo-Miwa) data use 2 theta0 = 1 + alpha, 2 thetaInf = 1 + gamma,
beta = 2 t and 4 theta0 (lambda - t) = d; the Painleve IV pair is
xi = 2 thetaInf - 1, eta = -8 theta0^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateLambda


@dataclass(frozen=True)
class CanonicalParams:
    alpha: complex
    beta: complex
    gamma_: complex
    delta: complex = 0j


@dataclass(frozen=True)
class GeneralParams:
    b: complex
    c: complex
    d: complex
    e: complex


@dataclass(frozen=True)
class JimboMiwaParams:
    theta0: complex
    thetaInf: complex
    t: complex = 0j
    lam: complex | None = None


@dataclass(frozen=True)
class Painleve4Params:
    xi: complex
    eta: complex


def canonical_to_general(p: CanonicalParams) -> GeneralParams:
    a, be, g, de = (complex(v) for v in (p.alpha, p.beta, p.gamma_, p.delta))
    return GeneralParams(b=-be, c=a + 1, d=-(de + (1 + a) * be) / 2, e=g - a - 2)


def general_to_canonical(p: GeneralParams) -> CanonicalParams:
    b, c, d, e = (complex(v) for v in (p.b, p.c, p.d, p.e))
    return CanonicalParams(alpha=c - 1, beta=-b, gamma_=e + c + 1, delta=b * c - 2 * d)


def accessory_d(p: CanonicalParams) -> complex:
    """d = -(delta + (1 + alpha) beta) / 2."""
    return -(complex(p.delta) + (1 + complex(p.alpha)) * complex(p.beta)) / 2


def delta_from_d(alpha: complex, beta: complex, d: complex) -> complex:
    """Inverse of accessory_d for fixed alpha, beta."""
    return -2 * complex(d) - (1 + complex(alpha)) * complex(beta)


def to_jimbo_miwa(p: CanonicalParams, strict: bool = True) -> JimboMiwaParams:
    """Connection parameters of a canonical parameter set.

    Args:
        p: canonical parameters.
        strict: if True, raise when lambda is undefined; otherwise return
            lam=None.

    Raises:
        DegenerateLambda: when theta0 = 0 and strict is set.
    """
    theta0 = (1 + complex(p.alpha)) / 2
    theta_inf = (1 + complex(p.gamma_)) / 2
    t = complex(p.beta) / 2
    if theta0 == 0:
        if strict:
            raise DegenerateLambda("theta0 = 0: lambda enters only through 4 theta0 (lambda - t)")
        return JimboMiwaParams(theta0, theta_inf, t, None)
    lam = t + accessory_d(p) / (4 * theta0)
    return JimboMiwaParams(theta0, theta_inf, t, lam)


def from_jimbo_miwa(jm: JimboMiwaParams) -> CanonicalParams:
    """Canonical parameters of connection data (delta = 0 if lambda absent)."""
    alpha = 2 * complex(jm.theta0) - 1
    gamma_ = 2 * complex(jm.thetaInf) - 1
    beta = 2 * complex(jm.t)
    if jm.lam is None:
        return CanonicalParams(alpha, beta, gamma_, delta_from_d(alpha, beta, 0))
    d = 4 * complex(jm.theta0) * (complex(jm.lam) - complex(jm.t))
    return CanonicalParams(alpha, beta, gamma_, delta_from_d(alpha, beta, d))


def to_painleve4(jm: JimboMiwaParams) -> Painleve4Params:
    return Painleve4Params(xi=2 * complex(jm.thetaInf) - 1, eta=-8 * complex(jm.theta0) ** 2)


def from_painleve4(p4: Painleve4Params, t: complex = 0j) -> JimboMiwaParams:
    """Connection data with theta0 = sqrt(-eta/8) (principal root)."""
    theta0 = cmath.sqrt(-complex(p4.eta) / 8)
    return JimboMiwaParams(theta0=theta0, thetaInf=(complex(p4.xi) + 1) / 2, t=complex(t))


# ---------------------------------------------------------------------------
# Degeneration classes
# ---------------------------------------------------------------------------


class DegenerationTag(str, Enum):
    SOLVABLE_GALOIS = "SolvableGalois"
    APPARENT_SINGULARITY = "ApparentSingularity"
    BOTH = "Both"
    NONE = "None"


@dataclass(frozen=True)
class Witness:
    """theta0 + eps * thetaInf = n (eps = +-1), or 2 theta0 = n (eps = 0)."""

    relation: str
    n: int
    eps: int

    @property
    def label(self) -> str:
        if self.eps == 0:
            return f"2*theta0 = {self.n}"
        op = "+" if self.eps > 0 else "-"
        return f"theta0 {op} thetaInf = {self.n}"


@dataclass(frozen=True)
class P4Witness:
    """eta = -2 (2n + 1 + eps xi)^2 (eps = +-1) or eta = -2 n^2 (eps = 0)."""

    n: int
    eps: int
    lhs: complex
    rhs: complex


@dataclass(frozen=True)
class DegenerationClass:
    tag: DegenerationTag
    witnesses: list[Witness] = field(default_factory=list)
    p4_witnesses: list[P4Witness] = field(default_factory=list)


def _nearest_int(z: complex, tol: float) -> int | None:
    n = round(z.real)
    if abs(z.real - n) <= tol and abs(z.imag) <= tol:
        return int(n)
    return None


def classify_degeneration(jm: JimboMiwaParams, tol: float = 1e-9) -> DegenerationClass:
    """Classify theta0 +- thetaInf in Z (solvable Galois) and 2 theta0 in Z.

    Args:
        jm: connection parameters (t and lambda are ignored).
        tol: absolute tolerance for integer detection.
    """
    th0, thi = complex(jm.theta0), complex(jm.thetaInf)
    p4 = to_painleve4(jm)
    witnesses: list[Witness] = []
    p4w: list[P4Witness] = []
    solvable = False
    for eps in (1, -1):
        n = _nearest_int(th0 + eps * thi, tol)
        if n is None:
            continue
        solvable = True
        witnesses.append(Witness("theta0+eps*thetaInf", n, eps))
        # theta0 = n - eps thetaInf  <=>  eta = -2 (2m + 1 + eps' xi)^2 with eps' = -eps
        m = n - (1 + eps) // 2
        eps_p = -eps
        p4w.append(P4Witness(m, eps_p, p4.eta, -2 * (2 * m + 1 + eps_p * p4.xi) ** 2))
    apparent = False
    n2 = _nearest_int(2 * th0, tol)
    if n2 is not None:
        apparent = True
        witnesses.append(Witness("2*theta0", n2, 0))
        p4w.append(P4Witness(n2, 0, p4.eta, complex(-2 * n2 * n2)))
    if solvable and apparent:
        tag = DegenerationTag.BOTH
    elif solvable:
        tag = DegenerationTag.SOLVABLE_GALOIS
    elif apparent:
        tag = DegenerationTag.APPARENT_SINGULARITY
    else:
        tag = DegenerationTag.NONE
    return DegenerationClass(tag, witnesses, p4w)


# ---------------------------------------------------------------------------
# Symmetries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrefactorDescriptor:
    """exp(q2 z^2 + q1 z + log_const) * z^q0, kept symbolic."""

    q0: complex = 0j
    q1: complex = 0j
    q2: complex = 0j
    log_const: complex = 0j

    def log_value(self, z: complex) -> complex:
        out = self.q2 * z * z + self.q1 * z + self.log_const
        if self.q0 != 0:
            out += self.q0 * cmath.log(z)
        return out

    def log_derivatives(self, z: complex) -> tuple[complex, complex]:
        """(P'/P, P''/P) at z."""
        l1 = 2 * self.q2 * z + self.q1
        l2 = 2 * self.q2
        if self.q0 != 0:
            l1 += self.q0 / z
            l2 -= self.q0 / (z * z)
        return l1, l2 + l1 * l1

    @property
    def is_trivial(self) -> bool:
        return self.q0 == 0 and self.q1 == 0 and self.q2 == 0 and self.log_const == 0


@dataclass(frozen=True)
class SymmetryElement:
    """z -> P(z) y(p'; sigma z) with p' = (s alpha, sigma beta, sigma^2 gamma, delta / sigma).

    The group is generated by a = phi5 (sigma = i) and b = phi2 (s = -1).
    """

    alpha_sign: int
    sigma: complex

    @property
    def index(self) -> int:
        return _SIGMA_TO_INDEX[(self.alpha_sign, _sigma_key(self.sigma))]

    @property
    def name(self) -> str:
        return f"phi{self.index}"

    def __mul__(self, other: "SymmetryElement") -> "SymmetryElement":
        return SymmetryElement(self.alpha_sign * other.alpha_sign, self.sigma * other.sigma)

    def inverse(self) -> "SymmetryElement":
        return SymmetryElement(self.alpha_sign, 1 / self.sigma)

    def act(self, p: CanonicalParams) -> CanonicalParams:
        s = self.sigma
        return CanonicalParams(
            alpha=self.alpha_sign * complex(p.alpha),
            beta=s * complex(p.beta),
            gamma_=s * s * complex(p.gamma_),
            delta=complex(p.delta) / s,
        )

    def prefactor(self, p: CanonicalParams) -> PrefactorDescriptor:
        q0 = -complex(p.alpha) if self.alpha_sign < 0 else 0j
        if _sigma_key(self.sigma) in ((0, 1), (0, -1)):
            return PrefactorDescriptor(q0=q0, q1=complex(p.beta), q2=1 + 0j)
        return PrefactorDescriptor(q0=q0)


def _sigma_key(s: complex) -> tuple[int, int]:
    return (round(s.real), round(s.imag))


_TABLE = {
    1: (1, 1 + 0j),
    2: (-1, 1 + 0j),
    3: (1, -1 + 0j),
    4: (1, -1j),
    5: (1, 1j),
    6: (-1, -1j),
    7: (-1, 1j),
    8: (-1, -1 + 0j),
}
_SIGMA_TO_INDEX = {(sa, _sigma_key(sg)): k for k, (sa, sg) in _TABLE.items()}


def symmetry(index: int) -> SymmetryElement:
    """The element phi_index, index in 1..8."""
    sa, sg = _TABLE[index]
    return SymmetryElement(sa, sg)


IDENTITY = symmetry(1)
GEN_A = symmetry(5)
GEN_B = symmetry(2)


def apply_symmetry(s: SymmetryElement, p: CanonicalParams) -> tuple[CanonicalParams, PrefactorDescriptor]:
    """Image parameters and the prefactor mapping solutions back to p.

    If y solves the equation with the returned parameters, then
    P(z) y(s.sigma z) solves the equation with parameters p.
    """
    return s.act(p), s.prefactor(p)


# ---------------------------------------------------------------------------
# Atlas of special lines in the (gamma, alpha) plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtlasLine:
    """a_coeff * alpha + g_coeff * gamma + const = 0."""

    family: str
    label: str
    n: int
    a_coeff: float
    g_coeff: float
    const: float

    def key(self) -> tuple[float, float, float]:
        """Sign-normalised identifier, independent of family and label."""
        a, g, c = self.a_coeff, self.g_coeff, self.const
        lead = a if a != 0 else g
        if lead < 0:
            a, g, c = -a, -g, -c
        return (a + 0.0, g + 0.0, c + 0.0)


@dataclass
class AtlasDataset:
    n_max: int
    lines: list[AtlasLine]
    missing: list[AtlasLine]

    def family(self, name: str) -> list[AtlasLine]:
        return [ln for ln in self.lines if ln.family == name]

    def keys(self, name: str) -> set[tuple[float, float, float]]:
        return {ln.key() for ln in self.family(name)}


def _line(family: str, label: str, n: int, a: float, g: float, c: float) -> AtlasLine:
    return AtlasLine(family, label, n, float(a), float(g), float(c))


def _fmt_line(a: float, g: float, c: float) -> str:
    parts = []
    for coef, sym in ((g, "gamma"), (a, "alpha")):
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = "" if abs(coef) == 1 else f"{abs(coef):g}*"
        parts.append(f"{sign} {mag}{sym}")
    text = " ".join(parts).lstrip("+ ").strip()
    if text.startswith("- "):
        text = "-" + text[2:]
    return f"{text} = {-c:g}"


def atlas_lines(n_max: int) -> AtlasDataset:
    """Line families of parameters with closed-form or degenerate behaviour.

    F1: termination lines alpha = -1 - N and gamma - alpha - 2 = 2N (N = 0..n_max).
    F2: images of F1 under the symmetry group (alpha -> +-alpha, gamma -> +-gamma).
    F3: connection degeneration lines 2 theta0 in Z and theta0 +- thetaInf in Z,
        i.e. alpha in Z and alpha +- gamma even, over the window spanned by F2.
    Lines of F3 absent from F2 are reported in `missing`.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    f1: list[AtlasLine] = []
    for N in range(n_max + 1):
        f1.append(_line("F1", f"alpha = {-1 - N}", N, 1, 0, 1 + N))
        f1.append(_line("F1", f"gamma - alpha - 2 = {2 * N}", N, -1, 1, -2 - 2 * N))
    f2: dict[tuple, AtlasLine] = {}
    for src in f1:
        for sa in (1, -1):
            for sg in (1, -1):
                a, g, c = src.a_coeff * sa, src.g_coeff * sg, src.const
                ln = _line("F2", _fmt_line(a, g, c), src.n, a, g, c)
                f2.setdefault(ln.key(), ln)
    bound = n_max + 1
    f3: dict[tuple, AtlasLine] = {}
    for n in range(-bound, bound + 2):
        # 2 theta0 = n  <=>  alpha = n - 1
        if abs(n - 1) <= bound:
            ln = _line("F3", f"2*theta0 = {n}", n, 1, 0, -(n - 1))
            f3.setdefault(ln.key(), ln)
        # theta0 + thetaInf = n  <=>  alpha + gamma = 2n - 2
        if abs(n - 1) <= bound:
            ln = _line("F3", f"theta0 + thetaInf = {n}", n, 1, 1, -(2 * n - 2))
            f3.setdefault(ln.key(), ln)
        # theta0 - thetaInf = n  <=>  alpha - gamma = 2n
        if abs(n) <= bound:
            ln = _line("F3", f"theta0 - thetaInf = {n}", n, 1, -1, -2 * n)
            f3.setdefault(ln.key(), ln)
    fam_order = {"F1": 0, "F2": 1, "F3": 2}

    def sort_key(ln: AtlasLine):
        return (fam_order[ln.family], ln.n, ln.key())

    lines = sorted(list(f1) + list(f2.values()) + list(f3.values()), key=sort_key)
    missing = sorted((ln for k, ln in f3.items() if k not in f2), key=sort_key)
    return AtlasDataset(n_max, lines, missing)


def is_integer(z: complex, tol: float = 1e-9) -> bool:
    return _nearest_int(complex(z), tol) is not None


def nearest_integer(z: complex, tol: float = 1e-9) -> int | None:
    return _nearest_int(complex(z), tol)


def finite(z: complex) -> bool:
    z = complex(z)
    return math.isfinite(z.real) and math.isfinite(z.imag)
