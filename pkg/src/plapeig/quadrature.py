"""Double-exponential quadrature for integrands with an endpoint singularity.

The half-period integrals

    pi_p          = 2 int_0^{(p-1)^{1/p}} (1 - s^p/(p-1))^{-1/p} ds
    pi_p(lam)     = 2 int_0^{((p-1)/lam)^{1/p}} (1 - lam s^p/(p-1))^{-1/p} ds
    pi_4(lam, k)  = 2 int_0^{(3/(lam-k^4))^{1/4}} [-(k^2/3)s^2 + sqrt(k^4 s^4/9 + 1 - (lam-k^4)s^4/3)]^{-1/2} ds

all blow up algebraically at the upper limit. They are evaluated with
tanh-sinh quadrature, feeding the integrand the distance to the singular
endpoint so nodes that crowd the singularity keep full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    InvalidExponent,
    InvalidInterval,
    InvalidParameter,
    NonConvergence,
    OutsideParabola,
)

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "PiValue",
    "DEFAULT_SPEC",
    "tanh_sinh",
    "integrate_singular",
    "beta_pi_p",
    "amplitude",
    "half_period_kernel",
    "pi_p",
    "pi_p_lambda",
    "pi_4",
]

# Beyond |t| = 6 the tanh-sinh abscissae sit within ~1e-275 of the endpoints.
_T_MAX = 6.0
_MIN_LEVEL = 3


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_refinement_levels: int = 12

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise ValueError(f"abs_tol must be non-negative, got {self.abs_tol}")
        if self.max_refinement_levels < 1:
            raise ValueError("max_refinement_levels must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    levels: int


@dataclass(frozen=True)
class PiValue:
    """A half-period length together with the parameters that produced it."""

    value: float
    p: float
    lam: float
    k: float
    estimated_error: float

    def __float__(self):
        return self.value


def _nodes(ts: np.ndarray):
    # Returns (distance to left end, distance to right end, weight) on [-1, 1].
    u = 0.5 * math.pi * np.sinh(ts)
    with np.errstate(over="ignore"):
        e = np.exp(2.0 * u)
        dl = 2.0 / (1.0 + 1.0 / e)
        dr = 2.0 / (1.0 + e)
        ch = np.cosh(u)
        w = 0.5 * math.pi * np.cosh(ts) / (ch * ch)
    return dl, dr, w


def tanh_sinh(
    f: Callable,
    a: float,
    b: float,
    singular_at_b: bool = True,
    spec: QuadratureSpec | None = None,
    *,
    distance: bool = False,
) -> QuadResult:
    """Tanh-sinh quadrature of ``f`` on ``[a, b]``.

    ``f`` is called with numpy arrays. With ``distance=True`` it is called as
    ``f(s, d)`` where ``d`` is the exact distance from ``s`` to the singular
    endpoint (``b - s`` or ``s - a``); use that form whenever the singular
    factor can be written in terms of ``d`` without cancellation.
    """
    spec = DEFAULT_SPEC if spec is None else spec
    if not a < b:
        raise InvalidInterval(f"need a < b, got [{a}, {b}]")
    half = 0.5 * (b - a)

    def level_sum(ts):
        dl, dr, w = _nodes(ts)
        dl = half * dl
        dr = half * dr
        s = np.where(ts < 0, a + dl, b - dr)
        d = dr if singular_at_b else dl
        keep = (w > 0) & (d > 0)
        if not distance:
            # nodes that round onto the singular endpoint carry no usable value
            keep &= s != (b if singular_at_b else a)
        if not keep.all():
            s, d, w = s[keep], d[keep], w[keep]
        if s.size == 0:
            return 0.0
        vals = f(s, d) if distance else f(s)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), s.shape)
        terms = w * vals
        if not np.all(np.isfinite(terms)):
            raise NonConvergence("integrand is not finite at an interior node")
        return half * math.fsum(terms)

    n0 = int(_T_MAX)
    total = level_sum(np.arange(-n0, n0 + 1, dtype=float))
    estimate = total
    err = math.inf
    for level in range(1, spec.max_refinement_levels + 1):
        h = 2.0 ** -level
        m = int(_T_MAX / h)
        odd = np.arange(1, m + 1, 2, dtype=float) * h
        new = level_sum(np.concatenate((-odd[::-1], odd)))
        total += new
        previous, estimate = estimate, total * h
        err = abs(estimate - previous)
        if level >= _MIN_LEVEL and err <= max(spec.abs_tol, spec.rel_tol * abs(estimate)):
            return QuadResult(estimate, err, level)
    raise NonConvergence(
        f"tanh-sinh did not reach rel_tol={spec.rel_tol} within "
        f"{spec.max_refinement_levels} levels (last error estimate {err:.3g})"
    )


def integrate_singular(
    f: Callable,
    a: float,
    b: float,
    singular_at_b: bool = True,
    spec: QuadratureSpec | None = None,
    *,
    distance: bool = False,
) -> float:
    """Integral of ``f`` over ``[a, b]``, singular at ``b`` (or ``a``)."""
    return tanh_sinh(f, a, b, singular_at_b, spec, distance=distance).value


def beta_pi_p(p: float) -> float:
    """Closed form 2 pi (p-1)^{1/p} / (p sin(pi/p)) of the half-period."""
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def _check_p(p):
    if not p > 1:
        raise InvalidExponent(f"exponent p must exceed 1, got {p}")


def _gap(lam: float, k: float) -> float:
    # lam - k^4 carries catastrophic cancellation near the parabola.
    return float(np.longdouble(lam) - np.longdouble(k) ** 4)


def amplitude(p: float, lam: float, k: float = 0.0) -> float:
    """Peak value of the unit generalized sine for (p, lam, k)."""
    if k == 0.0:
        return ((p - 1.0) / lam) ** (1.0 / p)
    return (3.0 / _gap(lam, k)) ** 0.25


def half_period_kernel(p: float, lam: float, k: float = 0.0):
    """Return ``(amp, f)`` with ``f(s, d)`` the half-period integrand.

    ``d = amp - s``. For k == 0 this is the general-p kernel
    ``(1 - (s/amp)^p)^{-1/p}``; otherwise p must be 4.
    """
    _check_p(p)
    if k != 0.0 and p != 4:
        raise InvalidExponent("k != 0 is only solvable in closed form for p = 4")
    if k == 0.0 and not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    if k != 0.0 and not _gap(lam, k) > 0:
        raise OutsideParabola(f"lambda={lam} <= k^4={k ** 4}: no eigen-pairs there")
    amp = amplitude(p, lam, k)

    def one_minus_ratio(d):
        # 1 - (s/amp)^p with s = amp - d, evaluated without cancellation.
        with np.errstate(divide="ignore"):
            r = -np.expm1(p * np.log1p(-np.minimum(d / amp, 1.0)))
        return np.maximum(r, 0.0)

    if k == 0.0:
        def f(s, d):
            return one_minus_ratio(d) ** (-1.0 / p)
    else:
        k2 = k * k

        def f(s, d):
            rem = one_minus_ratio(d)
            s2 = s * s
            # -(k^2/3)s^2 + sqrt(k^4 s^4/9 + rem), rationalized
            inner = rem / (np.sqrt(k2 * k2 * s2 * s2 / 9.0 + rem) + k2 * s2 / 3.0)
            return 1.0 / np.sqrt(inner)

    return amp, f


def _half_period(p, lam, k, spec):
    amp, f = half_period_kernel(p, lam, k)
    res = tanh_sinh(f, 0.0, amp, True, spec, distance=True)
    return PiValue(2.0 * res.value, p, lam, k, 2.0 * res.error)


def pi_p(p: float, spec: QuadratureSpec | None = None) -> PiValue:
    """Half-period of sin_p, integrating up to (p-1)^{1/p}."""
    _check_p(p)
    return _half_period(p, 1.0, 0.0, spec)


def pi_p_lambda(p: float, lam: float, spec: QuadratureSpec | None = None) -> PiValue:
    _check_p(p)
    if not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    return _half_period(p, lam, 0.0, spec)


def pi_4(lam: float, k: float, spec: QuadratureSpec | None = None) -> PiValue:
    """Half-period of G_{lam,k} for p = 4; requires k^4 < lam."""
    if not _gap(lam, k) > 0:
        raise OutsideParabola(f"lambda={lam} <= k^4={k ** 4}: no eigen-pairs there")
    return _half_period(4.0, lam, abs(k), spec)
