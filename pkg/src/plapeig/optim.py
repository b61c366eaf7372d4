"""Gradient descent on the discrete L^2 sphere {u : h sum m_j^2 = 1}.

Both the energy minimizer and the root-functional extremizer run on this
chassis. Steps are Barzilai-Borwein seeded, safeguarded by a nonmonotone
Armijo backtracking search, and retracted to the sphere by normalization.
Gradients are taken in the metric of P = K + h I, with K the Dirichlet
stiffness matrix, so the iteration count does not grow with the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidParameter, NonConvergence

__all__ = ["OptimizerSettings", "DescentResult", "SphereGeometry", "sphere_descent"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OptimizerSettings:
    tol: float = 1e-9
    max_iter: int = 50_000
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    memory: int = 10
    patience: int = 2000
    precondition: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParameter("tol must be positive")
        if self.max_iter < 1:
            raise InvalidParameter("max_iter must be >= 1")
        if not 0 < self.shrink < 1:
            raise InvalidParameter("shrink must lie in (0, 1)")
        if self.memory < 1:
            raise InvalidParameter("memory must be >= 1")
        if self.patience < 1:
            raise InvalidParameter("patience must be >= 1")


DEFAULT_SETTINGS = OptimizerSettings()


class SphereGeometry:
    """Mass form, norm and preconditioner for ``n_cells`` uniform cells."""

    def __init__(self, n_cells: int, precondition: bool = True):
        self.n_cells = n_cells
        self.h = 1.0 / n_cells
        n = n_cells - 1
        h = self.h
        h1 = np.zeros((3, n))
        h1[0, 1:] = -1.0 / h
        h1[1, :] = 2.0 / h + h
        h1[2, :-1] = -1.0 / h
        self._h1 = h1
        self._ab = h1 if precondition else np.vstack((np.zeros(n), np.ones(n), np.zeros(n)))

    def mass(self, u: np.ndarray) -> np.ndarray:
        """Gradient of (h/2) sum m_j^2, m_j the cell midpoint values."""
        full = np.concatenate(([0.0], u, [0.0]))
        m = 0.5 * (full[:-1] + full[1:])
        return 0.5 * self.h * (m[:-1] + m[1:])

    def norm2(self, u: np.ndarray) -> float:
        full = np.concatenate(([0.0], u, [0.0]))
        m = 0.5 * (full[:-1] + full[1:])
        return self.h * math.fsum(m * m)

    def normalize(self, u: np.ndarray) -> np.ndarray:
        return u / math.sqrt(self.norm2(u))

    def solve(self, g: np.ndarray) -> np.ndarray:
        return solve_banded((1, 1), self._ab, g)

    def dual_norm(self, g: np.ndarray) -> float:
        """sqrt(g . (K + hI)^{-1} g): the discrete H^{-1} norm of a nodal load."""
        return math.sqrt(max(float(g @ solve_banded((1, 1), self._h1, g)), 0.0))

    def apply(self, v: np.ndarray) -> np.ndarray:
        ab = self._ab
        out = ab[1] * v
        out[:-1] += ab[0, 1:] * v[1:]
        out[1:] += ab[2, :-1] * v[:-1]
        return out


@dataclass(frozen=True)
class DescentResult:
    u: np.ndarray
    value: float
    residual: float
    iterations: int


def sphere_descent(
    fun: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    residual: Callable[[np.ndarray], float],
    u0: np.ndarray,
    geom: SphereGeometry,
    settings: OptimizerSettings = DEFAULT_SETTINGS,
) -> DescentResult:
    """Minimize ``fun`` on the sphere until ``residual(u) <= settings.tol``.

    ``fun`` may return +inf to reject a point; the line search then backs off.
    """
    u = geom.normalize(np.asarray(u0, dtype=float))
    f = fun(u)
    if not math.isfinite(f):
        raise InvalidParameter("objective is not finite at the starting point")

    def tangent(u, g):
        # P-metric gradient projected onto the tangent space {v : v . Mu = 0}
        mu = geom.mass(u)
        d = geom.solve(g)
        z = geom.solve(mu)
        c = (mu @ d) / (mu @ z)
        return d - c * z, g - c * mu

    g = grad(u)
    d, gt = tangent(u, g)
    history = [f]
    frozen = 0
    best, best_it = math.inf, 0
    alpha = 1.0 / max(math.sqrt(abs(d @ gt)), 1e-300)
    for it in range(1, settings.max_iter + 1):
        res = residual(u)
        if res <= settings.tol:
            return DescentResult(u, f, res, it - 1)
        if res < 0.999 * best:
            best, best_it = res, it
        elif it - best_it >= settings.patience:
            raise NonConvergence(
                f"residual stalled at {best:.3g} for {settings.patience} iterations "
                f"(tol {settings.tol}); likely the roundoff floor of this grid"
            )
        slope = d @ gt
        f_ref = max(history)
        slack = 10.0 * _EPS * max(abs(f_ref), 1.0)
        for _ in range(settings.max_backtracks):
            cand = geom.normalize(u - alpha * d)
            fc = fun(cand)
            if fc <= f_ref - settings.armijo * alpha * slope + slack:
                break
            alpha *= settings.shrink
        else:
            raise NonConvergence(
                f"line search failed after {it} iterations (residual {res:.3g})"
            )
        s = cand - u
        frozen = frozen + 1 if not np.any(s) else 0
        if frozen >= 50:
            raise NonConvergence(f"iterate frozen at residual {res:.3g} (tol {settings.tol})")
        g_new = grad(cand)
        d_new, gt_new = tangent(cand, g_new)
        sy = s @ (gt_new - gt)
        sps = s @ geom.apply(s)
        alpha = sps / sy if sy > 0 else 2.0 * alpha
        u, f, d, gt = cand, fc, d_new, gt_new
        history.append(f)
        if len(history) > settings.memory:
            history.pop(0)
    res = residual(u)
    if res <= settings.tol:
        return DescentResult(u, f, res, settings.max_iter)
    raise NonConvergence(
        f"residual {res:.3g} above tol {settings.tol} after {settings.max_iter} iterations"
    )
