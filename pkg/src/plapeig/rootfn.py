"""Root functional r_lam(u) for the problem with lam fixed and nu = k^2 unknown.

On the shared finite-element grid

    g(nu) = h sum (nu m^2 + s^2)^{p/2} - lam h sum |m|^p,

which increases strictly in nu for u != 0. When g(0) <= 0 the unique root is
r_lam(u). Because g is p-homogeneous in u, r is constant along rays, and its
critical points on the sphere are eigenfunctions with k = sqrt(r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import Inadmissible, InvalidParameter, NoAdmissibleStart, NonConvergence, ZeroFunction
from .model import GridFunction
from .optim import DEFAULT_SETTINGS, OptimizerSettings, SphereGeometry, sphere_descent
from .variational import sine_start

__all__ = [
    "RootEval",
    "RootExtremum",
    "root_defect",
    "eval_root",
    "root_gradient",
    "grad_root",
    "minimize_root",
]

_BRACKET_CAP = 200
_N_SEEDS = 8


@dataclass(frozen=True)
class RootEval:
    nu: float
    lam: float
    admissible: bool
    defect: float


@dataclass(frozen=True)
class RootExtremum:
    nu: float
    u: GridFunction
    residual: float
    iterations: int
    seed: int

    @property
    def k(self) -> float:
        return math.sqrt(self.nu)


def _cells(values, h):
    full = np.concatenate(([0.0], values, [0.0]))
    return 0.5 * (full[:-1] + full[1:]), np.diff(full) / h


def _g(m, s, h, p, lam, nu):
    return h * float(np.sum((nu * m * m + s * s) ** (0.5 * p) - lam * np.abs(m) ** p))


def root_defect(u: GridFunction, p: float, lam: float, nu: float) -> float:
    """g(nu) = f_lam(nu, u)."""
    m, s = _cells(u.values, u.h)
    return _g(m, s, u.h, p, lam, nu)


def _check(p, lam, tol):
    if not p > 1:
        raise InvalidParameter(f"exponent p must exceed 1, got {p}")
    if not lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {lam}")
    if not tol > 0:
        raise InvalidParameter("tol must be positive")


def _solve(values, h, p, lam, tol):
    m, s = _cells(values, h)
    g0 = _g(m, s, h, p, lam, 0.0)
    if not np.any(m):
        return RootEval(0.0, lam, True, 0.0)
    if g0 > 0:
        return RootEval(math.nan, lam, False, g0)
    if g0 == 0:
        return RootEval(0.0, lam, True, g0)
    lo, hi = 0.0, lam ** (2.0 / p)
    for _ in range(_BRACKET_CAP):
        if _g(m, s, h, p, lam, hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NonConvergence("root functional: no upper bracket")
    nu, info = brentq(lambda v: _g(m, s, h, p, lam, v), lo, hi,
                      xtol=tol * 1e-3 * max(lo, 1e-3), rtol=4 * np.finfo(float).eps,
                      full_output=True, disp=False)
    if not info.converged:
        raise NonConvergence(f"root functional solve: {info.flag}")
    return RootEval(nu, lam, True, g0)


def eval_root(u: GridFunction, p: float, lam: float, tol: float = 1e-14) -> RootEval:
    """r_lam(u), or an inadmissible marker carrying the defect g(0) > 0."""
    _check(p, lam, tol)
    return _solve(u.values, u.h, p, lam, tol)


def _gradient(values, h, p, lam, nu):
    # grad r = -d_u f / d_nu f
    m, s = _cells(values, h)
    qe = (nu * m * m + s * s) ** (0.5 * p - 1.0)
    a = p * h * (nu * qe * m - lam * np.sign(m) * np.abs(m) ** (p - 1.0))
    b = p * h * qe * s
    du = 0.5 * (a[:-1] + a[1:]) + (b[:-1] - b[1:]) / h
    dnu = 0.5 * p * h * float(np.sum(qe * m * m))
    return -du / dnu


def root_gradient(u: GridFunction, p: float, lam: float, tol: float = 1e-14) -> np.ndarray:
    """Gradient of r_lam with respect to the interior nodal values."""
    _check(p, lam, tol)
    if not np.any(u.values):
        raise ZeroFunction("r has no derivative at u = 0")
    ev = _solve(u.values, u.h, p, lam, tol)
    if not ev.admissible:
        raise Inadmissible(f"g(0) = {ev.defect:.3g} > 0: r is undefined at u")
    return _gradient(u.values, u.h, p, lam, ev.nu)


def grad_root(u: GridFunction, p: float, lam: float, v: GridFunction, tol: float = 1e-14) -> float:
    """<r'(u), v> = -2 <F'_{lam,r}(u), v> / int |grad_r u|^{p-2} u^2."""
    return float(root_gradient(u, p, lam, tol) @ v.values)


def minimize_root(
    p: float,
    lam: float,
    n_cells: int,
    opt: OptimizerSettings = DEFAULT_SETTINGS,
    tol: float = 1e-14,
) -> RootExtremum:
    """Ground-state critical level of r_lam on the unit sphere.

    This is the largest value of r (the first mode carries the largest k for
    a fixed lam), found by ascent from the best admissible seed sin(j pi x).
    """
    _check(p, lam, tol)
    if n_cells < 8:
        raise InvalidParameter(f"n_cells must be >= 8, got {n_cells}")
    h = 1.0 / n_cells
    best = None
    for j in range(1, _N_SEEDS + 1):
        seed = sine_start(n_cells, j)
        ev = _solve(seed.values, h, p, lam, tol)
        if ev.admissible and (best is None or ev.nu > best[1]):
            best = (j, ev.nu, seed)
    if best is None:
        raise NoAdmissibleStart(f"no admissible seed sin(j pi x), j <= {_N_SEEDS}, at lam={lam}")
    j, _, seed = best

    def fun(v):
        ev = _solve(v, h, p, lam, tol)
        return -ev.nu if ev.admissible else math.inf

    def grad(v):
        ev = _solve(v, h, p, lam, tol)
        return -_gradient(v, h, p, lam, ev.nu)

    geom = SphereGeometry(n_cells, opt.precondition)

    def resid(v):
        # mesh-independent: a nodal max-norm test hits the roundoff floor on fine grids
        ev = _solve(v, h, p, lam, tol)
        return geom.dual_norm(_gradient(v, h, p, lam, ev.nu)) / max(ev.nu, 1.0)

    out = sphere_descent(fun, grad, resid, seed.values, geom, opt)
    u = GridFunction(n_cells, out.u)
    nu = _solve(u.values, h, p, lam, tol).nu
    return RootExtremum(nu, u, out.residual, out.iterations, j)
