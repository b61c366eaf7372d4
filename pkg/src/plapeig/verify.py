"""Cross-module verification report.

Each check yields a record {check, expected, actual, tol, pass}. The report
depends only on the seed, so two runs with one seed are byte-identical.
"""

from __future__ import annotations

import math

import numpy as np

from .analytic_p4 import k_set, lambda_n, lambda_star
from .errors import PLapError
from .model import GridFunction
from .quadrature import beta_pi_p, pi_4, pi_p
from .rootfn import eval_root, grad_root, minimize_root
from .shooting import eigenvalue, first_integral
from .variational import minimize_on_sphere

__all__ = ["run_checks"]


def _rel(a, b):
    return abs(a - b) / abs(b)


def _record(name, expected, actual, tol, ok):
    return {"check": name, "expected": expected, "actual": actual, "tol": tol, "pass": bool(ok)}


def _close(name, expected, actual, tol):
    return _record(name, expected, actual, tol, _rel(actual, expected) <= tol)


def _quadrature():
    for p in (1.5, 2.0, 3.0, 4.0, 7.0):
        yield _close(f"quadrature_beta_p{p:g}", beta_pi_p(p), pi_p(p).value, 1e-9)


def _linear():
    for k, n in ((0.0, 1), (1.0, 2), (2.0, 3)):
        lam = eigenvalue(2.0, k, n).params.lam
        yield _close(f"shooting_p2_k{k:g}_n{n}", k * k + (n * math.pi) ** 2, lam, 1e-8)


def _nonlinear_k0():
    for p in (1.5, 3.0):
        lam = eigenvalue(p, 0.0, 2).params.lam
        yield _close(f"shooting_p{p:g}_k0_n2", (2 * beta_pi_p(p)) ** p, lam, 1e-6)


def _cross_p4():
    for k, n in ((0.5, 2), (1.0, 1)):
        ref = lambda_n(k, n).lam
        lam = eigenvalue(4.0, k, n).params.lam
        yield _close(f"analytic_vs_shooting_p4_k{k:g}_n{n}", ref, lam, 1e-6)


def _first_integrals():
    for p, k in ((4.0, 1.0), (3.0, 0.0)):
        res = eigenvalue(p, k, 2)
        fi = first_integral(res.diagnostics["trajectory"], res.params)
        drift = float(np.max(np.abs(fi - fi[0])) / abs(fi[0]))
        yield _record(f"first_integral_p{p:g}_k{k:g}", 0.0, drift, 1e-6, drift <= 1e-6)


def _bounds():
    for p, k in ((3.0, 2.0), (4.0, 1.0), (1.5, 1.0)):
        lam = eigenvalue(p, k, 1).params.lam
        bound = max(beta_pi_p(p) ** p, abs(k) ** p)
        yield _record(f"lambda1_lower_bound_p{p:g}_k{k:g}", bound, lam, 0.0, lam >= bound)
    ls = lambda_star()
    pts = k_set(3.0 * ls) + k_set(1e4)
    worst = max(q.k ** 4 / q.lam for q in pts)
    yield _record("kset_parabola", 1.0, worst, 0.0, worst < 1.0)
    empty = len(k_set(0.9 * ls))
    yield _record("kset_empty_below_threshold", 0, empty, 0, empty == 0)
    one = len(k_set(ls * (1 + 1e-6)))
    yield _record("kset_single_above_threshold", 1, one, 0, one == 1)
    ext = minimize_root(4.0, 1.5 * ls, 256)
    ratio = ext.nu ** 2 / (1.5 * ls)
    yield _record("root_parabola_p4", 1.0, ratio, 0.0, ratio < 1.0)


def _root_gradient(seed):
    rng = np.random.default_rng(seed)
    n = 64
    x = np.arange(1, n) / n
    worst = 0.0
    for _ in range(5):
        p = float(rng.uniform(1.5, 5.0))
        c = rng.normal(size=4) / np.arange(1, 5)
        u = GridFunction(n, sum(c[j] * np.sin((j + 1) * np.pi * x) for j in range(4)))
        v = GridFunction(n, rng.normal(size=n - 1))
        full = u.full
        m, s = 0.5 * (full[:-1] + full[1:]), np.diff(full) * n
        lam = 2.0 * float(np.sum(np.abs(s) ** p) / np.sum(np.abs(m) ** p))
        eps = 1e-6
        fd = (eval_root(u + eps * v, p, lam).nu - eval_root(u - eps * v, p, lam).nu) / (2 * eps)
        an = grad_root(u, p, lam, v)
        worst = max(worst, abs(fd - an) / abs(an))
    yield _record("root_gradient_vs_fd", 0.0, worst, 1e-5, worst <= 1e-5)


def _variational():
    ws = [minimize_on_sphere(2.0, 0.0, 0.0, n).params.w for n in (32, 64)]
    rate = math.log2((ws[0] - math.pi ** 2) / (ws[1] - math.pi ** 2))
    yield _record("variational_p2_rate", 2.0, rate, 0.05, abs(rate - 2.0) <= 0.05)
    lam1 = lambda_n(1.0, 1).lam
    below = minimize_on_sphere(4.0, 1.0, 0.6 * lam1, 64)
    above = minimize_on_sphere(4.0, 1.0, 1.4 * lam1, 64)
    yield _record("variational_sign_below", "w>0,positive", below.params.w, 0.0,
                  below.params.w > 0 and below.positive)
    yield _record("variational_sign_above", "w<0", above.params.w, 0.0, above.params.w < 0)


def _precondition():
    try:
        pi_4(1.0, 1.0)
        actual = "no error"
    except PLapError as exc:
        actual = type(exc).__name__
    yield _record("input_outside_parabola", "OutsideParabola", actual, 0, actual == "OutsideParabola")


_GROUPS = (
    lambda seed: _quadrature(),
    lambda seed: _linear(),
    lambda seed: _nonlinear_k0(),
    lambda seed: _cross_p4(),
    lambda seed: _first_integrals(),
    lambda seed: _bounds(),
    _root_gradient,
    lambda seed: _variational(),
    lambda seed: _precondition(),
)


def run_checks(seed: int = 0) -> dict:
    """Run every check; a solver failure becomes a failed record, not a crash."""
    records = []
    for i, group in enumerate(_GROUPS):
        try:
            records.extend(group(seed))
        except PLapError as exc:
            records.append(_record(f"group_{i}", "no error",
                                   f"{type(exc).__name__}: {exc}", 0, False))
    return {
        "seed": seed,
        "checks": records,
        "passed": all(r["pass"] for r in records),
    }
