"""Closed-form dispersion relations for p = 4.

An eigen-pair (lam, k) with n half-periods on [0, 1] is a solution of
pi_4(lam, k) = 1/n, and the eigenfunction is u = c G_{lam,k}. The half-period
decreases in lam and (observed, and checked at runtime) increases in k, so all
solves are bracketed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, InvalidParameter, NonConvergence, RootNotBracketed
from .psine import PSineFunction
from .quadrature import DEFAULT_SPEC, QuadratureSpec, beta_pi_p, pi_4

__all__ = [
    "DispersionPoint",
    "DispersionCurve",
    "AnalyticEigenfunction",
    "lambda_n",
    "lambda_star",
    "k_set",
    "eigenfunction",
    "strong_residual",
    "sweep_lambda_n",
    "sweep_k_set",
]

_BRACKET_CAP = 200


@dataclass(frozen=True)
class DispersionPoint:
    n: int
    k: float
    lam: float
    residual: float

    def __post_init__(self):
        if not self.lam > self.k ** 4:
            raise InvalidParameter(f"(lam={self.lam}, k={self.k}) violates k^4 < lam")


@dataclass
class DispersionCurve:
    points: list[DispersionPoint]
    swept_parameter: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.swept_parameter not in ("k", "lambda"):
            raise ValueError(f"swept_parameter must be 'k' or 'lambda', got {self.swept_parameter!r}")
        key = (lambda q: (q.k, q.n)) if self.swept_parameter == "k" else (lambda q: (q.lam, q.k))
        self.points = sorted(self.points, key=key)


def _half(lam, k, spec):
    return pi_4(lam, k, spec).value


def lambda_n(k: float, n: int, tol: float = 1e-8, spec: QuadratureSpec | None = None) -> DispersionPoint:
    """The unique lam > k^4 with pi_4(lam, k) = 1/n."""
    if n < 1:
        raise InvalidParameter(f"mode index must be >= 1, got {n}")
    if not tol > 0:
        raise InvalidParameter("tol must be positive")
    spec = DEFAULT_SPEC if spec is None else spec
    k = abs(k)
    target = 1.0 / n
    k4 = k ** 4

    def g(lam):
        return _half(lam, k, spec) - target

    offset = 1e-3 * max(k4, 1.0)
    lo = k4 + offset
    for _ in range(_BRACKET_CAP):
        if g(lo) > 0:
            break
        offset *= 0.1
        lo = k4 + offset
    else:
        raise BracketFailure(f"no lower bracket for lambda_{n}({k})")
    hi = 2.0 * lo
    for _ in range(_BRACKET_CAP):
        if g(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketFailure(f"no upper bracket for lambda_{n}({k}) below {hi}")

    lam = brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    residual = abs(g(lam))
    if residual > tol:
        raise NonConvergence(f"half-period residual {residual:.3g} exceeds tol {tol}")
    return DispersionPoint(n, k, lam, residual)


def lambda_star(tol: float = 1e-8, spec: QuadratureSpec | None = None) -> float:
    """Threshold below which no k admits a nontrivial solution."""
    return lambda_n(0.0, 1, tol, spec).lam


def k_set(lam: float, tol: float = 1e-8, spec: QuadratureSpec | None = None) -> list[DispersionPoint]:
    """All k >= 0 for which (lam, k) is an eigen-pair, sorted by increasing k.

    One point per admissible mode index n, i.e. each n with
    pi_4(lam, 0) <= 1/n <= 1.
    """
    if not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    spec = DEFAULT_SPEC if spec is None else spec
    at_zero = _half(lam, 0.0, spec)
    n_max = math.floor(1.0 / at_zero + tol)
    k_top = lam ** 0.25 * (1.0 - 1e-9)
    points = []
    top_value = None
    for n in range(1, n_max + 1):
        target = 1.0 / n
        if abs(at_zero - target) <= tol:
            points.append(DispersionPoint(n, 0.0, lam, abs(at_zero - target)))
            continue
        if top_value is None:
            top_value = _half(lam, k_top, spec)
        if not (at_zero < target < top_value):
            raise RootNotBracketed(
                f"pi_4({lam}, k) - 1/{n} has no sign change on [0, {k_top}]"
            )
        k = brentq(lambda kk: _half(lam, kk, spec) - target, 0.0, k_top,
                   xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
        residual = abs(_half(lam, k, spec) - target)
        if residual > tol:
            raise NonConvergence(f"half-period residual {residual:.3g} exceeds tol {tol}")
        points.append(DispersionPoint(n, k, lam, residual))
    return sorted(points, key=lambda q: q.k)


@dataclass(frozen=True)
class AnalyticEigenfunction:
    """u(x) = c G_{lam,k}(x) on [0, 1]."""

    point: DispersionPoint
    c: float
    sine: PSineFunction

    def __call__(self, x):
        return self.c * np.asarray(self.sine(x))

    def derivative(self, x):
        return self.c * np.asarray(self.sine.derivative(x))

    def zeros(self) -> np.ndarray:
        """Interior zeros j / n, j = 1..n-1."""
        return np.arange(1, self.point.n) * self.sine.half_period


def eigenfunction(point: DispersionPoint, c: float | None = None, **sine_kwargs) -> AnalyticEigenfunction:
    """Eigenfunction for ``point``; by default scaled so max|u| = 1."""
    sine = PSineFunction(4.0, point.lam, point.k, **sine_kwargs)
    if c is None:
        c = 1.0 / sine.amplitude
    if c == 0:
        raise InvalidParameter("c must be nonzero")
    return AnalyticEigenfunction(point, float(c), sine)


def strong_residual(fn: AnalyticEigenfunction, x, step: float = 3e-6) -> np.ndarray:
    """Relative residual of k^2 Q u - (Q u')' - lam u^3, Q = k^2u^2 + u'^2.

    The flux derivative is a five-point central difference with spacing
    ``step``; the result is scaled by lam * max|u|^3. The flux is only
    C^{1,1/3} at the peaks when k = 0 and varies on a very short scale there
    for small k, so keep ``step`` small and build ``fn`` with a tight
    ``inverse_tol``.
    """
    k2 = fn.point.k ** 2
    lam = fn.point.lam
    x = np.atleast_1d(np.asarray(x, dtype=float))

    def flux(t):
        u, du = fn(t), fn.derivative(t)
        return (k2 * u * u + du * du) * du

    u, du = fn(x), fn.derivative(x)
    q = k2 * u * u + du * du
    dflux = (8.0 * (flux(x + step) - flux(x - step))
             - (flux(x + 2.0 * step) - flux(x - 2.0 * step))) / (12.0 * step)
    scale = lam * abs(fn.c * fn.sine.amplitude) ** 3
    return np.abs(k2 * q * u - dflux - lam * u ** 3) / scale


def sweep_lambda_n(k_values, n: int, tol: float = 1e-8, spec: QuadratureSpec | None = None) -> DispersionCurve:
    pts = [lambda_n(k, n, tol, spec) for k in k_values]
    return DispersionCurve(pts, "k", {"solver": "analytic4", "n": n, "tol": tol})


def sweep_k_set(lam_values, tol: float = 1e-8, spec: QuadratureSpec | None = None) -> DispersionCurve:
    pts = [q for lam in lam_values for q in k_set(lam, tol, spec)]
    return DispersionCurve(pts, "lambda", {"solver": "analytic4", "tol": tol})


def closed_form_lambda_n0(n: int) -> float:
    """(n pi_4)^4, the k = 0 eigenvalues."""
    return (n * beta_pi_p(4.0)) ** 4
