"""Eigenvalue solvers for the one-dimensional perturbed p-Laplacian

    k^2 |grad_k u|^{p-2} u - (|grad_k u|^{p-2} u')' + w u = lam |u|^{p-2} u,
    u(0) = u(1) = 0,   |grad_k u| = (k^2 u^2 + u'^2)^{1/2}.
"""

from .analytic_p4 import k_set, lambda_n, lambda_star
from .errors import PLapError
from .model import EigenResult, GridFunction, ProblemParams
from .psine import PSineFunction, sin_p
from .quadrature import QuadratureSpec, beta_pi_p, pi_4, pi_p, pi_p_lambda
from .rootfn import eval_root, grad_root, minimize_root
from .shooting import eigenvalue
from .variational import energy, minimize_on_sphere

__all__ = [
    "EigenResult",
    "GridFunction",
    "PLapError",
    "PSineFunction",
    "ProblemParams",
    "QuadratureSpec",
    "beta_pi_p",
    "eigenvalue",
    "energy",
    "eval_root",
    "grad_root",
    "k_set",
    "lambda_n",
    "lambda_star",
    "minimize_on_sphere",
    "minimize_root",
    "pi_4",
    "pi_p",
    "pi_p_lambda",
    "sin_p",
]
