import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plapeig.errors import InvalidExponent, InvalidInterval, InvalidParameter, NonConvergence, OutsideParabola
from plapeig.quadrature import (
    QuadratureSpec,
    amplitude,
    beta_pi_p,
    half_period_kernel,
    integrate_singular,
    pi_4,
    pi_p,
    pi_p_lambda,
    tanh_sinh,
)

# 30-digit mpmath evaluations of the defining integrals
PI_4 = 2.923581388750121
PI_4_100_15 = 0.997085658218866847729
PI_4_200_3 = 1.075524346605885242029


def test_pi_2_is_pi():
    assert pi_p(2.0).value == pytest.approx(math.pi, rel=1e-14)


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0, 4.0, 7.0, 20.0])
def test_pi_p_matches_beta_closed_form(p):
    assert pi_p(p).value == pytest.approx(beta_pi_p(p), rel=1e-12)


def test_pi_4_frozen():
    assert pi_p(4.0).value == pytest.approx(PI_4, rel=1e-14)
    assert pi_4(1.0, 0.0).value == pytest.approx(PI_4, rel=1e-14)


def test_pi_4_k_against_mpmath():
    assert pi_4(100.0, 1.5).value == pytest.approx(PI_4_100_15, rel=1e-12)
    assert pi_4(200.0, 3.0).value == pytest.approx(PI_4_200_3, rel=1e-12)


@given(st.floats(1.2, 8.0), st.floats(0.05, 50.0))
def test_lambda_scaling(p, lam):
    # substituting s -> lam^{-1/p} s gives pi_p(lam) = lam^{-1/p} pi_p
    assert pi_p_lambda(p, lam).value == pytest.approx(lam ** (-1.0 / p) * beta_pi_p(p), rel=1e-10)


@given(st.floats(0.0, 3.0), st.floats(0.2, 0.95))
def test_pi_4_increases_in_k(k, frac):
    lam = (k ** 4 + 10.0) / frac
    assert pi_4(lam, k).value <= pi_4(lam, k * 1.01 + 1e-3).value


def test_pi_4_even_in_k():
    assert pi_4(50.0, -1.3).value == pi_4(50.0, 1.3).value


def test_outside_parabola():
    with pytest.raises(OutsideParabola):
        pi_4(1.0, 1.0)
    with pytest.raises(OutsideParabola):
        pi_4(0.5, 1.0)


def test_invalid_exponent_and_lambda():
    with pytest.raises(InvalidExponent):
        pi_p(1.0)
    with pytest.raises(InvalidParameter):
        pi_p_lambda(2.0, 0.0)
    with pytest.raises(InvalidExponent):
        half_period_kernel(3.0, 10.0, 1.0)


def test_tanh_sinh_distance_form_is_exact_for_arcsine():
    # int_0^1 (1 - s^2)^{-1/2} = pi/2, with 1 - s^2 = d(2 - d)
    r = tanh_sinh(lambda s, d: 1.0 / np.sqrt(d * (2.0 - d)), 0.0, 1.0, distance=True)
    assert r.value == pytest.approx(math.pi / 2, rel=1e-15)


def test_tanh_sinh_plain_form():
    v = integrate_singular(lambda s: 1.0 / np.sqrt(1.0 - s), 0.0, 1.0)
    assert v == pytest.approx(2.0, rel=1e-7)


def test_tanh_sinh_singular_left_end():
    v = integrate_singular(lambda s, d: d ** -0.5, 0.0, 4.0, singular_at_b=False, distance=True)
    assert v == pytest.approx(4.0, rel=1e-12)


@given(st.floats(-3, 3), st.floats(0.1, 5))
def test_tanh_sinh_polynomial(a, width):
    b = a + width
    v = integrate_singular(lambda s: s ** 3 - s, a, b)
    exact = (b ** 4 - a ** 4) / 4 - (b ** 2 - a ** 2) / 2
    assert v == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_invalid_interval():
    with pytest.raises(InvalidInterval):
        tanh_sinh(lambda s: s, 1.0, 1.0)


def test_non_convergence_surfaces():
    spec = QuadratureSpec(rel_tol=1e-15, abs_tol=0.0, max_refinement_levels=3)
    with pytest.raises(NonConvergence):
        tanh_sinh(lambda s: np.sin(200 * s), 0.0, 1.0, spec=spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_refinement_levels=0)


def test_amplitude():
    assert amplitude(4.0, 1.0) == pytest.approx(3 ** 0.25)
    assert amplitude(4.0, 19.0, 2.0) == pytest.approx((3 / 3.0) ** 0.25)


def test_pi_value_float():
    v = pi_p(3.0)
    assert float(v) == v.value and v.p == 3.0 and v.estimated_error >= 0
