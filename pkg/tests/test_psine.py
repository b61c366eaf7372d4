import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plapeig.errors import InvalidExponent, OutOfRange, OutsideParabola
from plapeig.psine import PSineFunction, eval, eval_derivative, forward_F, sin_p
from plapeig.quadrature import beta_pi_p

# mpmath inversion of int_0^y (1 - s^4/3)^{-1/4} ds = x
SIN4_AT_05 = 0.499478106107524574570
SIN4_AT_12 = 1.155092783567832540042


def test_p2_is_sine():
    s = sin_p(2.0)
    for x in np.linspace(-3.0, 7.0, 41):
        assert s(x) == pytest.approx(math.sin(x), abs=1e-10)
        assert s.derivative(x) == pytest.approx(math.cos(x), abs=1e-9)


def test_p2_lambda_scaling():
    s = PSineFunction(2.0, 9.0)
    assert s.half_period == pytest.approx(math.pi / 3, rel=1e-13)
    assert s(0.2) == pytest.approx(math.sin(0.6) / 3.0, abs=1e-12)


def test_sin4_frozen():
    s = sin_p(4.0)
    assert s(0.5) == pytest.approx(SIN4_AT_05, rel=1e-11)
    assert s(1.2) == pytest.approx(SIN4_AT_12, rel=1e-11)


def test_peak_and_half_period():
    s = sin_p(3.0)
    assert s.half_period == pytest.approx(beta_pi_p(3.0), rel=1e-12)
    assert s(0.5 * s.half_period) == pytest.approx(s.amplitude, rel=1e-12)
    assert s.amplitude == pytest.approx(2.0 ** (1 / 3))
    assert abs(s(s.half_period)) < 1e-12


@given(st.floats(1.3, 6.0), st.floats(-8.0, 8.0))
def test_k0_first_integral(p, x):
    s = sin_p(p)
    u, du = s(x), s.derivative(x)
    assert abs(du) ** p + abs(u) ** p / (p - 1.0) == pytest.approx(1.0, rel=1e-8)


@given(st.floats(0.0, 3.0), st.floats(1.05, 5.0), st.floats(-3.0, 3.0))
def test_p4_first_integral(k, ratio, x):
    lam = ratio * (k ** 4 + 5.0)
    s = PSineFunction(4.0, lam, k)
    u, du = s(x), s.derivative(x)
    val = 3 * du ** 4 + 2 * k * k * u * u * du * du - (k ** 4 - lam) * u ** 4
    assert val == pytest.approx(3.0, rel=1e-8)


@given(st.floats(1.3, 6.0), st.floats(0.0, 0.999))
def test_round_trip(p, frac):
    s = sin_p(p)
    y = frac * s.amplitude
    r = s.forward_F(y)
    # the inverse is ill-conditioned right at the peak, where dF/dy is infinite
    assert s.eval(r) == pytest.approx(y, rel=1e-9, abs=1e-10)


@given(st.floats(1.3, 6.0), st.floats(0.01, 5.0))
def test_symmetries(p, x):
    s = sin_p(p)
    T = s.half_period
    assert s(-x) == pytest.approx(-s(x), abs=1e-12)
    assert s(T - x) == pytest.approx(s(x), abs=1e-9)
    assert s(x + T) == pytest.approx(-s(x), abs=1e-9)
    assert s(x + 2 * T) == pytest.approx(s(x), abs=1e-9)
    assert s.derivative(-x) == pytest.approx(s.derivative(x), abs=1e-9)


def test_vectorized_matches_scalar():
    s = sin_p(4.0)
    xs = np.array([[0.1, 0.7], [2.0, -1.0]])
    out = s(xs)
    assert out.shape == xs.shape
    assert out[1, 0] == s.eval(2.0)
    assert np.all(s.derivative(xs) == np.vectorize(s.eval_derivative)(xs))


def test_module_functions():
    s = sin_p(3.0)
    assert forward_F(s, 0.3) == s.forward_F(0.3)
    assert eval(s, 0.3) == s.eval(0.3)
    assert eval_derivative(s, 0.3) == s.eval_derivative(0.3)


def test_forward_F_range():
    s = sin_p(3.0)
    with pytest.raises(OutOfRange):
        s.forward_F(s.amplitude)
    with pytest.raises(OutOfRange):
        s.forward_F(-0.1)
    assert s.forward_F(0.0) == 0.0


def test_slope_zero_at_peak():
    s = sin_p(4.0)
    assert s.derivative(0.5 * s.half_period) == 0.0


def test_invalid_construction():
    with pytest.raises(InvalidExponent):
        PSineFunction(3.0, 10.0, 1.0)
    with pytest.raises(OutsideParabola):
        PSineFunction(4.0, 1.0, 1.0)
