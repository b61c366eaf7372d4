"""Grid convergence of the two sphere-constrained solvers.

Prints the recovered w at p = 2 (exact value pi^2) and the root-functional
level sqrt(nu) at p = 4 (exact value from the dispersion relation) against
n_cells, with the observed order log2(e_n / e_2n).
"""

import argparse
import math

from plapeig.analytic_p4 import k_set, lambda_star
from plapeig.rootfn import minimize_root
from plapeig.variational import minimize_on_sphere


def orders(errs):
    return [math.nan] + [math.log2(a / b) for a, b in zip(errs, errs[1:])]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", default="32,64,128,256,512")
    ap.add_argument("--factor", type=float, default=1.5, help="lambda / lambda* for the p = 4 run")
    args = ap.parse_args(argv)
    cells = [int(s) for s in args.cells.split(",")]

    print("variational, p=2, k=0, lambda=0: w -> pi^2")
    errs = [minimize_on_sphere(2.0, 0.0, 0.0, n).params.w - math.pi ** 2 for n in cells]
    for n, e, r in zip(cells, errs, orders(errs)):
        print(f"  n={n:5d}  err={e: .3e}  order={r:.3f}")

    lam = args.factor * lambda_star()
    exact = max(q.k for q in k_set(lam))
    print(f"root functional, p=4, lambda={lam:.6g}: sqrt(nu) -> {exact:.10f}")
    errs = [exact - minimize_root(4.0, lam, n).k for n in cells]
    for n, e, r in zip(cells, errs, orders(errs)):
        print(f"  n={n:5d}  err={e: .3e}  order={r:.3f}")


if __name__ == "__main__":
    main()
