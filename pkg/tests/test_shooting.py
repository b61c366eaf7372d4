import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plapeig.analytic_p4 import lambda_n
from plapeig.errors import BracketFailure, InvalidParameter
from plapeig.model import ProblemParams
from plapeig.quadrature import beta_pi_p
from plapeig.shooting import count_nodes, eigenvalue, first_integral, recover_uprime, shoot


@given(st.floats(1.1, 8.0), st.floats(-5, 5), st.floats(-10, 10),
       st.floats(1e-6, 50) | st.floats(-50, -1e-6))
def test_recover_uprime_inverts_flux(p, k, u, y):
    phi = (k * k * u * u + y * y) ** ((p - 2) / 2) * y
    assert recover_uprime(u, phi, p, k) == pytest.approx(y, rel=1e-12)


def test_recover_uprime_examples():
    assert recover_uprime(0.3, 1.7, 2.0, 5.0) == 1.7
    assert recover_uprime(0.3, 0.0, 4.0, 1.0) == 0.0
    assert recover_uprime(0.0, 8.0, 4.0, 0.0) == pytest.approx(2.0, rel=1e-15)
    # the case that defeated a plain tolerance test on the log step
    u, phi = 0.40630114470370726, -0.00012454331847780637
    y = recover_uprime(u, phi, 4.0, 1.0)
    assert (u * u + y * y) * y == pytest.approx(phi, rel=1e-13)


def test_shoot_p2_closed_form():
    res = shoot(ProblemParams(2.0, 0.0, math.pi ** 2), keep_trajectory=True)
    assert abs(res.terminal_u) < 1e-9
    assert res.node_count == 0
    x = res.trajectory.x
    assert np.allclose(res.trajectory.u, np.sin(np.pi * x) / np.pi, atol=1e-9)
    res = shoot(ProblemParams(2.0, 1.0, 1.0 + math.pi ** 2))
    assert abs(res.terminal_u) < 1e-9


def test_shoot_p4_at_threshold():
    lam = lambda_n(0.0, 1).lam
    assert abs(shoot(ProblemParams(4.0, 0.0, lam)).terminal_u) < 1e-8


def test_shoot_rejects():
    with pytest.raises(InvalidParameter):
        shoot(ProblemParams(2.0, 0.0, 1.0, w=1.0))
    with pytest.raises(InvalidParameter):
        shoot(ProblemParams(2.0, 0.0, 1.0), uprime0=0.0)


def test_count_nodes():
    assert count_nodes(np.array([0.0, 1.0, -1.0, 2.0, 0.0])) == 2
    assert count_nodes(np.array([0.0, 1.0, 1e-14, -1e-14, 1.0])) == 0
    assert count_nodes(np.zeros(4)) == 0


def test_crossings_include_endpoint():
    lam = (1 + 1e-6) * math.pi ** 2
    res = shoot(ProblemParams(2.0, 0.0, lam))
    assert res.terminal_u < 0
    assert (res.node_count, res.crossings) == (0, 1)


@pytest.mark.parametrize("k,n", [(0.0, 3), (2.0, 1), (1.0, 2)])
def test_linear_eigenvalues(k, n):
    res = eigenvalue(2.0, k, n)
    assert res.params.lam == pytest.approx(k * k + (n * math.pi) ** 2, rel=1e-9)
    assert res.diagnostics["node_count"] == n - 1
    assert max(abs(res.u.values)) == pytest.approx(1.0, abs=1e-5)
    assert res.positive == (n == 1)


def test_p4_cross_solver():
    res = eigenvalue(4.0, 1.0, 1)
    assert res.params.lam == pytest.approx(lambda_n(1.0, 1).lam, rel=1e-9)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_k0_nonlinear(p):
    assert eigenvalue(p, 0.0, 1).params.lam == pytest.approx(beta_pi_p(p) ** p, rel=1e-9)


@pytest.mark.parametrize("p,k", [(4.0, 1.0), (1.5, 1.0)])
def test_homogeneity_in_initial_slope(p, k):
    lams = [eigenvalue(p, k, 2, uprime0=s).params.lam for s in (0.5, 1.0, 2.0)]
    assert max(lams) - min(lams) <= 1e-9 * lams[1]


@given(st.floats(1.5, 5.0), st.floats(0.0, 2.0))
def test_sturm_ordering(p, k):
    base = ProblemParams(p, k, 0.0)
    grid = np.geomspace(1.0, 3000.0, 12)
    counts = [shoot(base.with_(lam=float(lam)), rtol=1e-8).node_count for lam in grid]
    assert counts == sorted(counts)


@given(st.floats(1.5, 5.0), st.floats(0.0, 3.0))
def test_lower_bounds(p, k):
    lam = eigenvalue(p, k, 1, tol=1e-8).params.lam
    assert lam >= beta_pi_p(p) ** p * (1 - 1e-9)
    assert lam > abs(k) ** p


@pytest.mark.parametrize("p,k,n", [(4.0, 1.0, 2), (4.0, 0.0, 1), (3.0, 0.0, 2)])
def test_first_integral_conserved(p, k, n):
    res = eigenvalue(p, k, n)
    fi = first_integral(res.diagnostics["trajectory"], res.params)
    assert np.ptp(fi) / abs(fi[0]) < 1e-6


def test_first_integral_requires_closed_form():
    res = eigenvalue(3.0, 1.0, 1, tol=1e-8)
    with pytest.raises(InvalidParameter):
        first_integral(res.diagnostics["trajectory"], res.params)


def test_bracket_cap():
    with pytest.raises(BracketFailure):
        eigenvalue(2.0, 0.0, 3, lam_cap=20.0)
    with pytest.raises(InvalidParameter):
        eigenvalue(2.0, 0.0, 0)
