"""Shooting solver for k^2 |grad_k u|^{p-2} u - (|grad_k u|^{p-2} u')' = lam |u|^{p-2} u.

The equation is integrated as a first-order system in (u, phi), with the
flux phi = (k^2 u^2 + u'^2)^{(p-2)/2} u', starting from u(0) = 0. Eigenvalues
are located by bisection on the number of interior zeros, then polished by
Brent's method on u(1) inside the final bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import BracketFailure, InvalidParameter, NonConvergence, StepFailure
from .model import EigenResult, GridFunction, ProblemParams
from .quadrature import beta_pi_p

__all__ = [
    "Trajectory",
    "ShootResult",
    "recover_uprime",
    "shoot",
    "count_nodes",
    "eigenvalue",
    "first_integral",
]

RTOL = 1e-10
N_SAMPLES = 1024
DEAD_BAND = 1e-12


def recover_uprime(u: float, phi: float, p: float, k: float, tol: float = 1e-9) -> float:
    """Invert phi = (k^2 u^2 + y^2)^{(p-2)/2} y for y.

    The map y -> phi is odd and strictly increasing, so the root is unique.
    Newton iterates in log|y| until the step drops below ``tol``, then takes
    one more (quadratically convergent) step.
    """
    if phi == 0.0:
        return 0.0
    if p == 2.0:
        return phi
    sign = 1.0 if phi > 0 else -1.0
    a = k * k * u * u
    if a == 0.0:
        return sign * abs(phi) ** (1.0 / (p - 1.0))
    # Newton on log|y|: the slope ((p-1)y^2 + a)/(y^2 + a) lies between 1 and p-1.
    lphi = math.log(abs(phi))
    half = 0.5 * (p - 2.0)
    s = lphi / (p - 1.0)
    if 2.0 * s < math.log(a):
        s = lphi - half * math.log(a)
    done = False
    for _ in range(60):
        t2 = math.exp(2.0 * s)
        h = half * math.log(a + t2) + s - lphi
        ds = h * (a + t2) / ((p - 1.0) * t2 + a)
        s -= ds
        if done:
            return sign * math.exp(s)
        done = abs(ds) <= tol
    raise NonConvergence(f"flux inversion did not converge (u={u}, phi={phi})")


def _rhs_factory(p: float, k: float, lam: float):
    k2 = k * k
    ex = 0.5 * (p - 2.0)
    pm1 = p - 1.0

    if p == 2.0:
        def rhs(x, y):
            u, phi = y
            return (phi, (k2 - lam) * u)
        return rhs

    def rhs(x, y):
        u, phi = y
        up = recover_uprime(u, phi, p, k)
        q = k2 * u * u + up * up
        au = abs(u)
        power = math.copysign(au ** pm1, u) if au > 0.0 else 0.0
        pert = k2 * q ** ex * u if q > 0.0 else 0.0
        return (up, pert - lam * power)

    return rhs


@dataclass(frozen=True)
class Trajectory:
    x: np.ndarray
    u: np.ndarray
    uprime: np.ndarray
    phi: np.ndarray

    def as_grid(self, normalize: bool = True) -> GridFunction:
        """Sampled u as a grid function, u(1) forced to zero."""
        vals = self.u[1:-1]
        if normalize:
            vals = vals / np.max(np.abs(self.u))
        return GridFunction(self.x.size - 1, vals)


@dataclass(frozen=True)
class ShootResult:
    """``node_count`` counts sign changes at samples in (0, 1); ``crossings``
    also includes x = 1, so it steps up exactly as u(1) passes through zero."""

    terminal_u: float
    node_count: int
    crossings: int
    trajectory: Trajectory | None = None


def count_nodes(u: np.ndarray, dead_band: float = DEAD_BAND) -> int:
    """Strict sign changes of sampled ``u``, ignoring |u| <= dead_band * max|u|."""
    u = np.asarray(u, dtype=float)
    scale = np.max(np.abs(u)) if u.size else 0.0
    if scale == 0.0:
        return 0
    s = np.sign(u[np.abs(u) > dead_band * scale])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def shoot(
    params: ProblemParams,
    uprime0: float = 1.0,
    steps: int = N_SAMPLES,
    rtol: float = RTOL,
    keep_trajectory: bool = False,
) -> ShootResult:
    """Integrate from x = 0 with u(0) = 0, u'(0) = uprime0 to x = 1."""
    if params.w != 0.0:
        raise InvalidParameter("shooting handles w = 0 only")
    if uprime0 == 0.0:
        raise InvalidParameter("uprime0 must be nonzero")
    p, k, lam = params.p, params.k, params.lam
    phi0 = math.copysign(abs(uprime0) ** (p - 1.0), uprime0)
    scale_u = abs(uprime0)
    # absolute tolerances follow the degree-(p-1) homogeneity of the system
    atol = [1e-3 * rtol * scale_u, 1e-3 * rtol * abs(phi0)]
    xs = np.linspace(0.0, 1.0, steps + 1)
    sol = solve_ivp(
        _rhs_factory(p, k, lam), (0.0, 1.0), [0.0, phi0],
        method="RK45", t_eval=xs, rtol=rtol, atol=atol,
    )
    if sol.status != 0 or sol.y.shape[1] != xs.size:
        raise StepFailure(f"integrator failed: {sol.message}")
    u, phi = sol.y
    traj = None
    if keep_trajectory:
        up = np.array([recover_uprime(a, b, p, k) for a, b in zip(u, phi)])
        traj = Trajectory(xs, u, up, phi)
    return ShootResult(float(u[-1]), count_nodes(u[:-1]), count_nodes(u), traj)


def first_integral(traj: Trajectory, params: ProblemParams) -> np.ndarray:
    """Conserved quantity along a trajectory.

    k = 0: |u'|^p + lam/(p-1) |u|^p.  p = 4: 3u'^4 + 2k^2u^2u'^2 - (k^4 - lam)u^4.
    """
    p, k, lam = params.p, params.k, params.lam
    u, up = traj.u, traj.uprime
    if k == 0.0:
        return np.abs(up) ** p + lam / (p - 1.0) * np.abs(u) ** p
    if p == 4.0:
        return 3 * up ** 4 + 2 * k * k * u * u * up * up - (k ** 4 - lam) * u ** 4
    raise InvalidParameter("no closed-form first integral for k != 0, p != 4")


def _lambda_cap(p, k, n):
    return max(10.0 * (n * beta_pi_p(p)) ** p * (1.0 + abs(k) ** p), 1e6)


def eigenvalue(
    p: float,
    k: float,
    n: int,
    tol: float = 1e-10,
    uprime0: float = 1.0,
    steps: int = N_SAMPLES,
    rtol: float = RTOL,
    lam_cap: float | None = None,
) -> EigenResult:
    """n-th eigenvalue lam_n(k): the solution with n - 1 interior zeros."""
    if n < 1:
        raise InvalidParameter(f"mode index must be >= 1, got {n}")
    if not tol > 0:
        raise InvalidParameter("tol must be positive")
    base = ProblemParams(p, k, 0.0)
    cap = _lambda_cap(p, k, n) if lam_cap is None else lam_cap
    shots = 0

    def nodes(lam):
        nonlocal shots
        shots += 1
        return shoot(base.with_(lam=lam), uprime0, steps, rtol).crossings

    # for lam <= 0 the solution never turns back, so it has no zeros
    lo, n_lo = 0.0, 0
    hi = min(1.5 * ((n * beta_pi_p(p)) ** p + abs(k) ** p), cap)
    n_hi = nodes(hi)
    while n_hi < n:
        if hi >= cap:
            raise BracketFailure(f"no bracket for lambda_{n} below cap {cap:.3g}")
        lo, n_lo = hi, n_hi
        hi = min(2.0 * hi, cap)
        n_hi = nodes(hi)
    for _ in range(200):
        if n_lo == n - 1 and n_hi == n:
            break
        mid = 0.5 * (lo + hi)
        c = nodes(mid)
        if c >= n:
            hi, n_hi = mid, c
        else:
            lo, n_lo = mid, c
        if hi - lo <= tol * max(lo, 1e-300):
            break
    else:
        raise BracketFailure("node-count bisection did not isolate the eigenvalue")

    def terminal(lam):
        nonlocal shots
        shots += 1
        return shoot(base.with_(lam=lam), uprime0, steps, rtol).terminal_u

    if n_lo == n - 1 and n_hi == n and hi - lo > tol * lo:
        lam = brentq(terminal, lo, hi, xtol=1e-300, rtol=max(tol, 4 * np.finfo(float).eps))
    else:
        lam = 0.5 * (lo + hi)

    params = base.with_(lam=lam)
    res = shoot(params, uprime0, steps, rtol, keep_trajectory=True)
    traj = res.trajectory
    amp = float(np.max(np.abs(traj.u)))
    grid = traj.as_grid()
    return EigenResult(
        params=params,
        u=grid,
        node_index=n,
        weak_residual=abs(res.terminal_u) / amp,
        positive=bool(np.all(grid.values > 0)),
        diagnostics={
            "solver": "shooting",
            "node_count": res.node_count,
            "terminal_u": res.terminal_u / amp,
            "shots": shots,
            "bracket": (lo, hi),
            "trajectory": traj,
        },
    )
