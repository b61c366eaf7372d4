"""Finite-element energy functionals and the constrained minimizer.

Nodal values live on a uniform grid with zero boundary values. On each cell
u is replaced by its midpoint value m_j and u' by the cell slope s_j, so

    E(u)   = h sum (k^2 m^2 + s^2)^{p/2} - lam h sum |m|^p
    |u|_2^2 = h sum m^2.

Both are exactly homogeneous in the nodal values. Minimizing E on the unit
sphere gives a positive ground state u and the Lagrange multiplier
w = E(u), so (w, k, lam) is an eigen-triple of the discrete weak form.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .errors import InvalidParameter, ZeroFunction
from .model import EigenResult, GridFunction, ProblemParams
from .optim import DEFAULT_SETTINGS, OptimizerSettings, SphereGeometry, sphere_descent

__all__ = [
    "energy",
    "energy_gradient",
    "functionals",
    "full_objective",
    "weak_residual_vector",
    "weak_residual",
    "minimize_on_sphere",
    "rescale_solution",
    "sine_start",
]

# regularization of |grad_k u|^{p-2} for p < 2
SMOOTHING = 1e-20


def _cells(values: np.ndarray, h: float):
    full = np.concatenate(([0.0], values, [0.0]))
    return 0.5 * (full[:-1] + full[1:]), np.diff(full) / h


def _q(m, s, p, k):
    q = k * k * m * m + s * s
    return q + SMOOTHING if p < 2 else q


def _signed_pow(m, e):
    return np.sign(m) * np.abs(m) ** e


def energy(u: GridFunction, p: float, k: float, lam: float) -> float:
    """Discrete E_{k,lam}(u)."""
    return _energy_values(u.values, u.h, p, k, lam)


def functionals(u: GridFunction, p: float, k: float) -> tuple[float, float]:
    """(Phi, G_k): (1/p) of the discrete integrals of |u|^p and |grad_k u|^p."""
    m, s = _cells(u.values, u.h)
    phi = u.h * float(np.sum(np.abs(m) ** p)) / p
    gk = u.h * float(np.sum(_q(m, s, p, k) ** (0.5 * p))) / p
    return phi, gk


def l2_norm2(u: GridFunction) -> float:
    m, _ = _cells(u.values, u.h)
    return u.h * float(np.sum(m * m))


def full_objective(u: GridFunction, params: ProblemParams) -> float:
    """-(w/2) |u|_2^2 + G_k(u) - lam Phi(u)."""
    phi, gk = functionals(u, params.p, params.k)
    return -0.5 * params.w * l2_norm2(u) + gk - params.lam * phi


def _gradient(values, h, p, k, lam):
    m, s = _cells(values, h)
    qe = _q(m, s, p, k) ** (0.5 * p - 1.0)
    a = p * h * (k * k * qe * m - lam * _signed_pow(m, p - 1.0))  # dE/dm_j
    b = p * h * qe * s  # dE/ds_j
    return 0.5 * (a[:-1] + a[1:]) + (b[:-1] - b[1:]) / h


def energy_gradient(u: GridFunction, p: float, k: float, lam: float) -> np.ndarray:
    """Gradient of :func:`energy` with respect to the interior nodal values."""
    return _gradient(u.values, u.h, p, k, lam)


def _mass(values, h):
    m, _ = _cells(values, h)
    return 0.5 * h * (m[:-1] + m[1:])


def weak_residual_vector(u: GridFunction, params: ProblemParams) -> np.ndarray:
    """<F'(u), e_j> for every interior hat function e_j."""
    p = params.p
    return (_gradient(u.values, u.h, p, params.k, params.lam) / p
            - params.w * _mass(u.values, u.h))


def weak_residual(u: GridFunction, params: ProblemParams) -> float:
    """max_j |<F'(u), e_j>| / (h max|u|^{p-1}); invariant under u -> t u, w -> t^{p-2} w."""
    top = float(np.max(np.abs(u.values)))
    if top == 0.0:
        raise ZeroFunction("weak residual is undefined for u = 0")
    r = weak_residual_vector(u, params)
    return float(np.max(np.abs(r))) / (u.h * top ** (params.p - 1.0))


def sine_start(n_cells: int, j: int = 1) -> GridFunction:
    return GridFunction.from_function(lambda x: np.sin(j * np.pi * x), n_cells)


def minimize_on_sphere(
    p: float,
    k: float,
    lam: float,
    n_cells: int,
    opt: OptimizerSettings = DEFAULT_SETTINGS,
    start: GridFunction | None = None,
) -> EigenResult:
    """Ground state of E_{k,lam} on the unit sphere, with w = E(u).

    The descent is run once from ``start`` (default sin(pi x)), the iterate
    is replaced by |u| and the descent is repeated as a polish.
    """
    if not p > 1:
        raise InvalidParameter(f"exponent p must exceed 1, got {p}")
    if n_cells < 8:
        raise InvalidParameter(f"n_cells must be >= 8, got {n_cells}")
    if start is None:
        start = sine_start(n_cells)
    elif start.n_cells != n_cells:
        raise InvalidParameter("start grid does not match n_cells")
    h = 1.0 / n_cells
    geom = SphereGeometry(n_cells, opt.precondition)
    base = ProblemParams(p, k, lam)

    def fun(v):
        return _energy_values(v, h, p, k, lam)

    def grad(v):
        return _gradient(v, h, p, k, lam)

    def resid(v):
        g = GridFunction(n_cells, v)
        return weak_residual(g, base.with_(w=_energy_values(v, h, p, k, lam)))

    first = sphere_descent(fun, grad, resid, start.values, geom, opt)
    polish = sphere_descent(fun, grad, resid, np.abs(first.u), geom, opt)
    u = GridFunction(n_cells, polish.u)
    w = energy(u, p, k, lam)
    params = base.with_(w=w)
    return EigenResult(
        params=params,
        u=u,
        node_index=1,
        weak_residual=weak_residual(u, params),
        positive=bool(np.min(u.values) > 0),
        diagnostics={
            "solver": "variational",
            "iterations": first.iterations + polish.iterations,
            "l2_norm2": l2_norm2(u),
        },
    )


def _energy_values(v, h, p, k, lam):
    m, s = _cells(v, h)
    return h * float(np.sum(_q(m, s, p, k) ** (0.5 * p) - lam * np.abs(m) ** p))


def rescale_solution(res: EigenResult, t: float) -> EigenResult:
    """(t u, t^{p-2} w): the scaling orbit of an eigen-triple."""
    if not t > 0:
        raise InvalidParameter(f"t must be positive, got {t}")
    if t == 1.0:
        return res
    p = res.params.p
    params = res.params.with_(w=t ** (p - 2.0) * res.params.w)
    u = t * res.u
    return replace(res, params=params, u=u, weak_residual=weak_residual(u, params))
