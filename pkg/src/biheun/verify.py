"""Quick invariant suites behind `biheun verify`.

Each suite returns one SuiteResult: the largest measured violation of an
invariant and the tolerance it is held to. A tolerance override applies to
every selected suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .params import GeneralParams, general_to_canonical


@dataclass(frozen=True)
class SuiteResult:
    name: str
    invariant: str
    measured: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tol)


def _rand_c(rng, scale=1.0) -> complex:
    return complex(*rng.uniform(-scale, scale, 2))


def suite_pcf(rng) -> float:
    from .pcf import pcf_d

    worst = 0.0
    for _ in range(40):
        nu, x = _rand_c(rng, 4), _rand_c(rng, 2.5)
        lhs = x * pcf_d(nu, x).value
        rhs = pcf_d(nu + 1, x).value + nu * pcf_d(nu - 1, x).value
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    for x in np.linspace(-3, 3, 7):
        worst = max(worst, abs(pcf_d(0, x).value - math.exp(-x * x / 4)), abs(pcf_d(1, x).value - x * math.exp(-x * x / 4)))
    return worst


def suite_spectra(rng) -> float:
    from .spectra import build_tridiagonal, eigenvalues_d

    worst = 0.0
    for _ in range(20):
        b, c = _rand_c(rng, 2), _rand_c(rng, 2)
        g = GeneralParams(b, c, 0, 2.0)
        ds = eigenvalues_d(build_tridiagonal(g, 1))
        root = np.sqrt(b * b + 4 * c * 2.0 + 0j)
        want = sorted([(-b + root) / 2, (-b - root) / 2], key=lambda v: (v.real, v.imag))
        got = sorted(ds, key=lambda v: (v.real, v.imag))
        worst = max(worst, max(abs(u - v) / max(1.0, abs(v)) for u, v in zip(got, want)))
    return worst


def suite_eigen(rng) -> float:
    from .spectra import bhe_residual, eigen_solutions, sample_points

    worst = 0.0
    for N in range(4):
        g = GeneralParams(_rand_c(rng), _rand_c(rng), 0, 2 * N)
        for _, sol in eigen_solutions("I", general_to_canonical(g), N):
            worst = max(worst, max(bhe_residual(sol, sol.params, z) for z in sample_points()))
    return worst


def suite_series(rng) -> float:
    from .series import CoeffStream
    from .spectra import build_tridiagonal, eigenvalues_d

    worst = 0.0
    for N in range(1, 5):
        g = GeneralParams(_rand_c(rng), -N, 0, _rand_c(rng, 2))
        for d in eigenvalues_d(build_tridiagonal(g, N)):
            a = CoeffStream(GeneralParams(g.b, g.c, d, g.e)).take(N + 2)
            worst = max(worst, abs(a[N + 1]) / max(abs(v) for v in a[: N + 1]))
    return worst


def suite_gauge(rng) -> float:
    from .gauge import reduce_down, reduce_up
    from .spectra import eigen_solutions, sample_points

    worst = 0.0
    for N in range(4):
        g = GeneralParams(_rand_c(rng), -N, 0, _rand_c(rng, 2))
        for _, sol in eigen_solutions("I", general_to_canonical(g), N):
            dn, up = reduce_down(sol), reduce_up(sol)
            for z in sample_points(10):
                v = sol(z)
                worst = max(worst, abs(dn(z) - v) / max(1.0, abs(v)), abs(up(z) - v) / max(1.0, abs(v)))
    return worst


def suite_apparent(rng) -> float:
    from .gauge import apparent_singularity_test
    from .spectra import build_tridiagonal, eigenvalues_d

    worst = 0.0
    for N in range(1, 5):
        g = GeneralParams(_rand_c(rng), -N, 0, _rand_c(rng, 2))
        for d in eigenvalues_d(build_tridiagonal(g, N)):
            res = apparent_singularity_test(general_to_canonical(GeneralParams(g.b, g.c, d, g.e)))
            worst = max(worst, abs(res.obstruction) / res.scale)
    return worst


def suite_connection(rng) -> float:
    from .connection import BhcConnection, BhcData, bhc_matrices, bhe_jm_coefficients, exceptional_point_data
    from .gauge import system_to_scalar
    from .params import JimboMiwaParams

    worst = 0.0
    for _ in range(10):
        data = BhcData(_rand_c(rng), _rand_c(rng) + 1.5, _rand_c(rng) + 1.5, _rand_c(rng), _rand_c(rng), _rand_c(rng))
        _, _, C = bhc_matrices(data)
        worst = max(worst, abs(np.linalg.det(C) + complex(data.theta0) ** 2))
        jm = JimboMiwaParams(_rand_c(rng), _rand_c(rng), _rand_c(rng), _rand_c(rng))
        conn = BhcConnection(exceptional_point_data(jm), shifted=True)
        x = _rand_c(rng) + 1.5
        c1, c0, _ = system_to_scalar(conn, x, conn.derivative)
        e1, e0 = bhe_jm_coefficients(jm, x)
        worst = max(worst, abs(c1 - e1), abs(c0 - e0))
    return worst


def suite_schlesinger(rng) -> float:
    from .gauge import schlesinger_verify
    from .spectra import build_tridiagonal, eigen_coeffs, eigenvalues_d

    g = GeneralParams(complex(rng.uniform(0.2, 1)), -1, 0, complex(rng.uniform(0.5, 1.5)))
    sys_ = build_tridiagonal(g, 1)
    xs = [0.6 + 0.4j, 0.9 - 0.3j, 1.2 + 0.2j, 0.5 - 0.6j]
    return max(schlesinger_verify(general_to_canonical(g), eigen_coeffs(sys_, d), xs) for d in eigenvalues_d(sys_))


def suite_stokes(rng, tol: float = 1e-9) -> float:
    """Number of grid points where feasibility and the integer predicate disagree."""
    from .connection import degenerate_stokes_solve

    grid = [round(-2 + 0.1 * k, 10) for k in range(41)]
    bad = 0
    for th0 in grid:
        for thi in grid:
            feasible = bool(degenerate_stokes_solve(th0, thi, "S13", tol))
            pred = any(abs(v - round(v)) <= tol for v in (th0 + thi, th0 - thi))
            bad += feasible != pred
    return float(bad)


SUITES: dict[str, tuple[Callable, str, float]] = {
    "pcf": (suite_pcf, "closed forms and order recurrence of D", 1e-10),
    "spectra": (suite_spectra, "N=1 eigenvalues match the quadratic formula", 1e-12),
    "eigen": (suite_eigen, "eigen-solutions solve the equation", 1e-8),
    "series": (suite_series, "Base stream terminates at eigenvalues", 1e-10),
    "gauge": (suite_gauge, "two-term gauge forms reproduce finite sums", 1e-9),
    "apparent": (suite_apparent, "no log obstruction at eigenvalues", 1e-10),
    "connection": (suite_connection, "det C = -theta0^2 and scalar conversion", 1e-10),
    "schlesinger": (suite_schlesinger, "Schlesinger gauge residual for N=1", 1e-5),
    "stokes": (suite_stokes, "degenerate Stokes feasibility equals the integer predicate", 0.0),
}


def run_suites(names: list[str], tol: float | None = None, seed: int = 0) -> list[SuiteResult]:
    out = []
    for name in names:
        fn, invariant, default_tol = SUITES[name]
        rng = np.random.default_rng(seed)
        if name == "stokes":
            measured = fn(rng, 1e-9 if tol is None else tol)
            limit = default_tol
        else:
            measured = fn(rng)
            limit = default_tol if tol is None else tol
        out.append(SuiteResult(name, invariant, float(measured), limit))
    return out
