"""Dispersion curves lam_n(k) at p = 4 from the closed form and from shooting.

    python scripts/dispersion_p4.py --k-grid 0:3:13 --modes 1,2,3 -o disp_p4.csv
"""

import argparse
import sys
import time

from plapeig.analytic_p4 import lambda_n
from plapeig.shooting import eigenvalue
from plapeig.store import CsvTable, parse_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-grid", default="0:3:13")
    ap.add_argument("--modes", default="1,2,3")
    ap.add_argument("-o", "--output")
    args = ap.parse_args(argv)

    table = CsvTable(["n", "k", "lambda_analytic", "lambda_shooting", "rel_diff", "shots"])
    worst = 0.0
    t0 = time.perf_counter()
    for n in (int(s) for s in args.modes.split(",")):
        for k in parse_grid(args.k_grid):
            a = lambda_n(k, n).lam
            res = eigenvalue(4.0, k, n)
            d = abs(res.params.lam - a) / a
            worst = max(worst, d)
            table.add(n, k, a, res.params.lam, d, res.diagnostics["shots"])
    table.comments.append(f"max_rel_diff={worst:.3e} elapsed_s={time.perf_counter() - t0:.1f}")
    text = table.render()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
