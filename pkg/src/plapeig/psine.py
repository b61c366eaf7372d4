"""Generalized sine functions G(lam, .) and G_{lam,k}(.).

On the quarter period [0, T/2] (T the half-period) the function is the
inverse of the monotone integral F(y) = int_0^y f(s) ds, with f the
half-period kernel from :mod:`plapeig.quadrature`. It is then reflected about
T/2, extended as an odd function and made 2T-periodic.

The unit normalization is u'(0) = 1, which makes
|u'|^p + lam/(p-1) |u|^p = 1 (k = 0) and
3u'^4 + 2k^2u^2u'^2 - (k^4 - lam)u^4 = 3 (p = 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InversionFailure, OutOfRange
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    half_period_kernel,
    tanh_sinh,
)

__all__ = ["PSineFunction", "sin_p", "forward_F", "eval", "eval_derivative"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PSineFunction:
    """Generalized sine with unit initial slope, for exponent ``p``.

    ``k`` must be 0 unless ``p == 4``.
    """

    p: float
    lam: float
    k: float = 0.0
    inverse_tol: float = 1e-11
    peak_window: float = 1e-10
    spec: QuadratureSpec = DEFAULT_SPEC
    half_period: float = field(init=False)
    amplitude: float = field(init=False)

    def __post_init__(self):
        amp, kern = half_period_kernel(self.p, self.lam, abs(self.k))
        quarter = tanh_sinh(kern, 0.0, amp, True, self.spec, distance=True).value
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "half_period", 2.0 * quarter)
        object.__setattr__(self, "_kernel", kern)

    # -- defining integrals -------------------------------------------------

    def _head(self, y: float) -> float:
        # int_0^y f; the singularity at amp lies outside [0, y].
        if y <= 0.0:
            return 0.0
        gap = self.amplitude - y
        f = self._kernel
        return tanh_sinh(lambda s, d: f(s, d + gap), 0.0, y, True, self.spec, distance=True).value

    def _tail(self, z: float) -> float:
        # int_{amp-z}^{amp} f, written in the distance-to-peak variable.
        if z <= 0.0:
            return 0.0
        amp = self.amplitude
        f = self._kernel
        return tanh_sinh(lambda d, dd: f(amp - d, d), 0.0, z, False, self.spec, distance=True).value

    def slope(self, y: float, z: float | None = None) -> float:
        """|u'| when |u| = y; ``z = amplitude - y`` may be passed for precision."""
        if z is None:
            z = self.amplitude - y
        if z <= 0.0:
            return 0.0
        return float(1.0 / self._kernel(np.float64(y), np.float64(z)))

    def forward_F(self, x: float) -> float:
        """int_0^x f(s) ds for 0 <= x < amplitude."""
        if not 0.0 <= x < self.amplitude:
            raise OutOfRange(f"x={x} outside [0, {self.amplitude})")
        if x <= 0.5 * self.amplitude:
            return self._head(x)
        return 0.5 * self.half_period - self._tail(self.amplitude - x)

    # -- inversion ----------------------------------------------------------

    def _invert(self, r: float) -> tuple[float, float]:
        """Solve F(y) = r on [0, T/2]; returns (y, amplitude - y)."""
        amp = self.amplitude
        quarter = 0.5 * self.half_period
        if r <= 0.0:
            return 0.0, amp
        if quarter - r <= self.peak_window:
            return amp, 0.0
        if r <= 0.5 * quarter:
            # increasing residual in y, slope f(y) >= 1
            y = _safe_newton(
                lambda y: self._head(y) - r,
                self.slope,
                0.0, amp, min(r, amp), self.inverse_tol, amp,
            )
            return y, amp - y
        target = quarter - r
        z = _safe_newton(
            lambda z: self._tail(z) - target,
            lambda z: self.slope(amp - z, z),
            0.0, amp, min(amp, target), self.inverse_tol, amp,
        )
        return amp - z, z

    def _reduce(self, x: float):
        # -> (sign of u, sign of u', reduced argument in [0, T/2])
        T = self.half_period
        su = 1.0
        if x < 0.0:
            x, su = -x, -1.0
        r = math.fmod(x, 2.0 * T)
        if r >= T:
            r -= T
            su = -su
        sd = su
        if r > 0.5 * T:
            r = T - r
            sd = -sd
        return r, su, sd

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.eval(float(x))
        return np.array([self.eval(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))

    def eval(self, x: float) -> float:
        r, su, _ = self._reduce(x)
        y, _ = self._invert(r)
        return su * y

    def eval_derivative(self, x: float) -> float:
        neg = x < 0.0
        r, su, sd = self._reduce(x)
        y, z = self._invert(r)
        # u is odd so u' is even: undo the sign flip applied for x < 0
        sign = -sd if neg else sd
        return sign * self.slope(y, z)

    def derivative(self, x):
        if np.ndim(x) == 0:
            return self.eval_derivative(float(x))
        return np.array([self.eval_derivative(float(t)) for t in np.ravel(x)]).reshape(np.shape(x))


def _safe_newton(fun, dfun_inv, lo, hi, x0, ftol, scale, maxiter=100):
    """Newton's method on an increasing ``fun`` kept inside ``[lo, hi]``.

    ``dfun_inv`` returns 1/fun'(x) (0 where fun' is infinite). Falls back to
    bisection whenever a Newton step leaves the bracket.
    """
    x = min(max(x0, lo), hi)
    for _ in range(maxiter):
        fx = fun(x)
        if abs(fx) <= ftol:
            return x
        if fx > 0:
            hi = x
        else:
            lo = x
        if hi - lo <= 4.0 * _EPS * scale:
            return x
        step = fx * dfun_inv(x)
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        elif abs(step) <= 2.0 * _EPS * scale:
            return xn
        x = xn
    raise InversionFailure(f"inverse solve did not converge (residual {fx:.3g})")


def sin_p(p: float, **kwargs) -> PSineFunction:
    """sin_p: unit-lambda generalized sine, peak (p-1)^{1/p}, half-period pi_p."""
    return PSineFunction(p, 1.0, 0.0, **kwargs)


def forward_F(fn: PSineFunction, x: float) -> float:
    return fn.forward_F(x)


def eval(fn: PSineFunction, x: float) -> float:  # noqa: A001
    return fn.eval(x)


def eval_derivative(fn: PSineFunction, x: float) -> float:
    return fn.eval_derivative(x)
