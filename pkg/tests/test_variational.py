import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from plapeig.errors import InvalidParameter, NonConvergence, ZeroFunction
from plapeig.model import GridFunction, ProblemParams
from plapeig.optim import OptimizerSettings
from plapeig.shooting import eigenvalue
from plapeig.variational import (
    energy,
    energy_gradient,
    full_objective,
    functionals,
    l2_norm2,
    minimize_on_sphere,
    rescale_solution,
    sine_start,
    weak_residual,
)

N = 64
values = arrays(float, N - 1, elements=st.floats(-2, 2))
exps = st.floats(1.2, 6.0)


def sine(n=N, j=1, c=math.sqrt(2)):
    return GridFunction.from_function(lambda x: c * np.sin(j * np.pi * x), n)


def test_zero_function():
    z = GridFunction(N, np.zeros(N - 1))
    assert energy(z, 3.0, 1.0, 5.0) == 0.0
    assert functionals(z, 3.0, 1.0) == (0.0, 0.0)
    assert full_objective(z, ProblemParams(3.0, 1.0, 5.0, 2.0)) == 0.0
    with pytest.raises(ZeroFunction):
        weak_residual(z, ProblemParams(2.0))


def test_sine_integrals():
    u = sine(256)
    assert energy(u, 2.0, 0.0, 0.0) == pytest.approx(math.pi ** 2, rel=1e-4)
    phi, g = functionals(u, 2.0, 0.0)
    assert phi == pytest.approx(0.5, rel=1e-4)
    assert g == pytest.approx(math.pi ** 2 / 2, rel=1e-4)
    obj = full_objective(u, ProblemParams(2.0, 0.0, 0.0, 1.0))
    assert obj == pytest.approx(-0.5 + math.pi ** 2 / 2, rel=1e-4)


@given(values, exps, st.floats(-3, 3), st.floats(-50, 50), st.floats(0.1, 4))
def test_homogeneity_and_identities(v, p, k, lam, t):
    u = GridFunction(N, v)
    e = energy(u, p, k, lam)
    assert energy(t * u, p, k, lam) == pytest.approx(t ** p * e, rel=1e-11, abs=1e-11)
    phi, g = functionals(u, p, k)
    assert p * g - p * lam * phi == pytest.approx(e, rel=1e-12, abs=1e-11)
    assert full_objective(u, ProblemParams(p, k, lam)) == pytest.approx(e / p, rel=1e-12, abs=1e-11)


@given(exps, st.floats(-3, 3), st.floats(-50, 50), st.integers(0, 2 ** 32 - 1))
def test_gradient_matches_finite_differences(p, k, lam, seed):
    rng = np.random.default_rng(seed)
    u = GridFunction(N, rng.normal(size=N - 1))
    v = GridFunction(N, rng.normal(size=N - 1))
    eps = 1e-6
    fd = (energy(u + eps * v, p, k, lam) - energy(u - eps * v, p, k, lam)) / (2 * eps)
    an = energy_gradient(u, p, k, lam) @ v.values
    assert fd == pytest.approx(an, rel=1e-5, abs=1e-7)


@given(values, exps, st.floats(-3, 3), st.floats(-50, 50))
def test_energy_even_under_abs_with_nodal_sign_changes(v, p, k, lam):
    # |u| and u agree cellwise when every sign change happens at a node, i.e.
    # no cell has endpoint values of strictly opposite sign
    pattern = np.array([1.0, 1.0, 0.0, -1.0, -1.0, 0.0])
    v = np.abs(v) * np.resize(pattern, v.size)
    u = GridFunction(N, v)
    assert energy(abs(u), p, k, lam) == energy(u, p, k, lam)


def test_weak_residual_of_continuum_eigenpair_is_second_order():
    r = [weak_residual(sine(n, c=1.0), ProblemParams(2.0, 0.0, math.pi ** 2)) for n in (32, 64, 128)]
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.02)
    assert r[1] / r[2] == pytest.approx(4.0, rel=0.02)


def test_weak_residual_positive_off_spectrum():
    assert weak_residual(sine(), ProblemParams(2.0, 0.0, 5.0)) > 0.1


def test_grid_convergence_p2():
    errs = [minimize_on_sphere(2.0, 0.0, 0.0, n).params.w - math.pi ** 2 for n in (32, 64, 128)]
    assert all(e > 0 for e in errs)
    rates = [math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])]
    assert rates == pytest.approx([2.0, 2.0], abs=0.02)


def test_p2_k1():
    res = minimize_on_sphere(2.0, 1.0, 0.0, 128)
    assert res.params.w == pytest.approx(1 + math.pi ** 2, rel=2e-4)


@pytest.mark.parametrize("p,k", [(4.0, 1.0), (3.0, 0.5), (1.5, 1.0)])
def test_sign_pattern_and_positivity(p, k):
    lam1 = eigenvalue(p, k, 1).params.lam
    below = minimize_on_sphere(p, k, 0.5 * lam1, 64)
    above = minimize_on_sphere(p, k, 1.5 * lam1, 64)
    assert below.params.w > 0 and below.positive
    assert above.params.w < 0 and above.positive
    for res in (below, above):
        assert l2_norm2(res.u) == pytest.approx(1.0, abs=1e-12)
        assert res.weak_residual <= 1e-9
        assert res.params.w == energy(res.u, p, k, res.params.lam)


def test_minimizer_from_sign_changing_start_is_positive():
    res = minimize_on_sphere(4.0, 1.0, 40.0, 64, start=sine_start(64, 2) + 0.3 * sine_start(64, 1))
    assert res.positive and res.weak_residual <= 1e-9


def test_discrete_ground_state_matches_shooting():
    # w = 0 exactly when lam is the first eigenvalue
    lam1 = eigenvalue(4.0, 1.0, 1).params.lam
    w = [minimize_on_sphere(4.0, 1.0, lam1, n).params.w for n in (64, 128)]
    assert abs(w[1]) < abs(w[0]) and abs(w[1]) < 0.1


@pytest.mark.parametrize("t", [1.0, 0.5, 2.0, 3.0])
def test_rescale(t):
    res = minimize_on_sphere(4.0, 1.0, 50.0, 64)
    out = rescale_solution(res, t)
    assert out.params.w == pytest.approx(t ** 2 * res.params.w, rel=1e-14)
    assert out.weak_residual <= 1e-9
    assert np.allclose(out.u.values, t * res.u.values)
    if t == 1.0:
        assert out is res


def test_rescale_p2_keeps_w():
    res = minimize_on_sphere(2.0, 0.0, 3.0, 32)
    assert rescale_solution(res, 7.0).params.w == pytest.approx(res.params.w, rel=1e-15)
    with pytest.raises(InvalidParameter):
        rescale_solution(res, 0.0)


def test_preconditioner_off_still_converges_on_small_grid():
    res = minimize_on_sphere(4.0, 1.0, 50.0, 16, OptimizerSettings(precondition=False))
    assert res.weak_residual <= 1e-9


def test_stall_raises():
    with pytest.raises(NonConvergence):
        minimize_on_sphere(4.0, 1.0, 50.0, 64, OptimizerSettings(tol=1e-18, patience=50))


def test_argument_checks():
    with pytest.raises(InvalidParameter):
        minimize_on_sphere(2.0, 0.0, 0.0, 4)
    with pytest.raises(InvalidParameter):
        minimize_on_sphere(1.0, 0.0, 0.0, 16)
    with pytest.raises(InvalidParameter):
        minimize_on_sphere(2.0, 0.0, 0.0, 16, start=sine_start(32))
