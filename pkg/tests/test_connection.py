import cmath
import math

import numpy as np
import pytest
from conftest import rand_c

from biheun.connection import (
    BhcConnection,
    BhcData,
    Infeasible,
    StokesData,
    bhc_matrices,
    bhe_jm_coefficients,
    connection_for,
    degenerate_stokes_solve,
    exceptional_point_data,
    first_component_factor,
    local_exponents,
    stokes_residual,
)
from biheun.errors import DegenerateData
from biheun.gauge import system_to_scalar
from biheun.params import CanonicalParams, GeneralParams, JimboMiwaParams, from_jimbo_miwa, general_to_canonical
from biheun.spectra import eigen_solutions


def rand_data(rng):
    return BhcData(rand_c(rng), rand_c(rng) + 1.5, rand_c(rng) + 1.5, rand_c(rng), rand_c(rng), rand_c(rng))


# --- matrices ------------------------------------------------------------------


def test_matrices_examples():
    d = BhcData(0.3, 1.2, 0.7, 0.0, 0.4, 0.9)
    A, B, C = bhc_matrices(d)
    assert np.array_equal(A, np.diag([1, -1]))
    assert np.allclose(B, [[0.3, 1.2], [2 * (0 - 0.4 - 0.9) / 1.2, -0.3]])
    assert np.allclose(C, [[0.4, -1.2 * 0.7 / 2], [0, -0.4]])
    d = BhcData(0.3, 1.2, 0.7, 0.8, 0.4, 0.9)
    _, _, C = bhc_matrices(d)
    assert abs(C[1, 0]) < 1e-15
    assert np.allclose(np.diag(C), [-0.4, 0.4])


def test_matrix_invariants(rng):
    for _ in range(200):
        d = rand_data(rng)
        A, B, C = bhc_matrices(d)
        assert abs(np.trace(A)) == 0 and abs(np.trace(C)) < 1e-12
        assert abs(np.linalg.det(C) + d.theta0**2) <= 1e-12 * max(1, abs(d.theta0) ** 2)
        ev = sorted(np.linalg.eigvals(C), key=lambda v: (v.real, v.imag))
        want = sorted([d.theta0, -d.theta0], key=lambda v: (v.real, v.imag))
        assert np.allclose(ev, want, atol=1e-12 * max(1, np.max(np.abs(C))) ** 2 + 1e-12)


def test_degenerate_data():
    with pytest.raises(DegenerateData):
        bhc_matrices(BhcData(0.1, 0, 1, 0.2, 0.3, 0.4))
    with pytest.raises(DegenerateData):
        bhc_matrices(BhcData(0.1, 1, 0, 0.2, 0.3, 0.4))


def test_exceptional_point_limit(rng):
    # y, z -> 0 with z/y = lambda gives the exceptional C
    for _ in range(10):
        th0, lam, u = rand_c(rng), rand_c(rng), rand_c(rng) + 1.5
        eps = 1e-8
        _, _, C_lim = bhc_matrices(BhcData(0.2, u, eps, lam * eps, th0, 0.3))
        _, _, C_exc = bhc_matrices(BhcData(0.2, u, 0, 0, th0, 0.3, lam))
        assert np.allclose(C_lim, C_exc, atol=1e-6)


# --- scalar equation at the exceptional point ---------------------------------------------


def test_jm_coefficients_are_the_canonical_equation(rng):
    for _ in range(50):
        jm = JimboMiwaParams(rand_c(rng) + 1, rand_c(rng), rand_c(rng), rand_c(rng))
        p = from_jimbo_miwa(jm)
        x = rand_c(rng) + 1.5
        c1, c0 = bhe_jm_coefficients(jm, x)
        a, be, g, de = p.alpha, p.beta, p.gamma_, p.delta
        assert abs(c1 - (1 + a - be * x - 2 * x * x) / x) < 1e-12 * max(1, abs(c1))
        assert abs(c0 - ((g - a - 2) * x - (de + (1 + a) * be) / 2) / x) < 1e-12 * max(1, abs(c0))


def test_shifted_connection_gives_the_canonical_equation(rng):
    for _ in range(10):
        jm = JimboMiwaParams(rand_c(rng), rand_c(rng), rand_c(rng), rand_c(rng))
        conn = BhcConnection(exceptional_point_data(jm), shifted=True)
        for _ in range(10):
            x = rand_c(rng) + 1.5
            c1, c0, _ = system_to_scalar(conn, x, conn.derivative)
            e1, e0 = bhe_jm_coefficients(jm, x)
            assert abs(c1 - e1) <= 1e-10 and abs(c0 - e0) <= 1e-10
            f1, f0, _ = system_to_scalar(conn, x)  # finite-difference derivative
            assert abs(f1 - e1) <= 1e-8 and abs(f0 - e0) <= 1e-8


def fd(f, x, h=1e-4):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


@pytest.mark.parametrize("shifted", [False, True])
def test_eigen_solution_lifts_to_a_connection_solution(shifted):
    p = general_to_canonical(GeneralParams(0.6 - 0.2j, 0.4 + 0.1j, 0, 4))
    for _, sol in eigen_solutions("I", p, 2):
        conn = connection_for(sol.params, u=0.8, shifted=shifted)

        def vec(x):
            j = sol.jet(x)
            if shifted:
                y1, dy1 = j.y, j.dy
            else:
                h, hl = first_component_factor(conn.data, x)
                y1, dy1 = h * j.y, h * (j.dy + hl * j.y)
            a = conn(x)
            return np.array([y1, (dy1 - a[0, 0] * y1) / a[0, 1]])

        for x in (0.7 + 0.3j, 1.1 - 0.4j, 0.5 + 0.8j):
            lhs = fd(vec, x)
            rhs = conn(x) @ vec(x)
            assert np.linalg.norm(lhs - rhs) <= 1e-7 * (1 + np.linalg.norm(rhs))


def test_first_component_factor_derivative():
    d = BhcData(0.3 - 0.1j, 1, 0, 0, 0.7, 0.2, 0.4)
    x = 0.8 + 0.3j
    h, hl = first_component_factor(d, x)
    num = fd(lambda t: first_component_factor(d, t)[0], x)
    assert abs(num / h - hl) < 1e-9


def test_trivial_theta0_branch():
    p = CanonicalParams(-1, 0.4, 1.3, 0.2)
    conn = connection_for(p)
    _, _, C = conn.matrices()
    assert np.allclose(C, 0)


# --- Stokes multipliers --------------------------------------------------------------


def test_stokes_residual_examples():
    assert abs(stokes_residual(StokesData(0, 0, 0, 0, 0.37, 0.37))) < 1e-14
    assert abs(stokes_residual(StokesData(0, 0, 0, 0, 0.25, 0.75))) < 1e-14
    r = stokes_residual(StokesData(0, 0, 0, 0, 0.1, 0.3))
    assert abs(r - 2 * (math.cos(0.6 * math.pi) - math.cos(0.2 * math.pi))) < 1e-14
    assert abs(r) > 0.1


def test_stokes_residual_sign_of_theta0(rng):
    for _ in range(50):
        s = [rand_c(rng) for _ in range(4)]
        th0, thi = rand_c(rng), rand_c(rng)
        assert abs(stokes_residual(StokesData(*s, th0, thi)) - stokes_residual(StokesData(*s, -th0, thi))) < 1e-12


def test_stokes_residual_formula(rng):
    for _ in range(20):
        s1, s2, s3, s4 = (rand_c(rng) for _ in range(4))
        th0, thi = rand_c(rng, 0.5), rand_c(rng, 0.5)
        ph = cmath.exp(2j * math.pi * thi)
        want = (1 + s2 * s3) * ph + (s1 * s4 + (1 + s3 * s4) * (1 + s1 * s2)) / ph - 2 * cmath.cos(2 * math.pi * th0)
        assert abs(stokes_residual(StokesData(s1, s2, s3, s4, th0, thi)) - want) < 1e-12


@pytest.mark.parametrize("pair", ["S13", "S24"])
def test_zeroed_pair_removes_the_other_pair(pair, rng):
    # with one pair zeroed the relation no longer depends on the other pair
    for _ in range(20):
        th0, thi = rng.uniform(-2, 2, 2)
        u, v = rand_c(rng, 3), rand_c(rng, 3)
        s = (0, u, 0, v) if pair == "S13" else (u, 0, v, 0)
        r = stokes_residual(StokesData(*s, th0, thi))
        assert abs(r - 2 * (math.cos(2 * math.pi * thi) - math.cos(2 * math.pi * th0))) < 1e-12


def test_degenerate_examples():
    w = degenerate_stokes_solve(0.25, 0.75)
    assert w and (w.s1, w.s2, w.s3, w.s4) == (0, 0, 0, 0)
    assert abs(stokes_residual(w)) < 1e-14
    bad = degenerate_stokes_solve(0.1, 0.3)
    assert isinstance(bad, Infeasible) and not bad and abs(bad.residual) > 0.1
    assert degenerate_stokes_solve(0.37, 0.37, "S13") and degenerate_stokes_solve(0.37, 0.37, "S24")
    with pytest.raises(ValueError):
        degenerate_stokes_solve(0.1, 0.2, "S12")


@pytest.mark.parametrize("pair", ["S13", "S24"])
def test_degenerate_grid_equivalence(pair):
    grid = [round(-2 + 0.1 * k, 10) for k in range(41)]
    for th0 in grid:
        for thi in grid:
            feasible = bool(degenerate_stokes_solve(th0, thi, pair))
            pred = any(abs(v - round(v)) <= 1e-9 for v in (th0 + thi, th0 - thi))
            assert feasible == pred
            # feasibility means the zero witness solves the relation
            assert (abs(stokes_residual(StokesData(0, 0, 0, 0, th0, thi))) < 1e-9) == feasible


# --- exponents -----------------------------------------------------------------


def test_local_exponents():
    assert local_exponents(CanonicalParams(0, 0.1, 0.2, 0))[0] == (0, 0)
    assert local_exponents(CanonicalParams(-3, 0.1, 0.2, 0))[0] == (0, 3)
    assert local_exponents(CanonicalParams(0.5, 0.1, 2, 0))[1] == (1.5, -1.5)
