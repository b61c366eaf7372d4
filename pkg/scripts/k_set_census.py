"""Number of admissible k per lambda at p = 4, with the mode thresholds (n pi_4)^4.

    python scripts/k_set_census.py --lambda-grid 50:2e4:25:log
"""

import argparse

from plapeig.analytic_p4 import closed_form_lambda_n0, k_set
from plapeig.store import parse_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda-grid", default="50:2e4:25:log")
    args = ap.parse_args(argv)
    thresholds = [closed_form_lambda_n0(n) for n in range(1, 5)]
    print("thresholds:", ", ".join(f"n={i + 1}: {t:.6g}" for i, t in enumerate(thresholds)))
    for lam in parse_grid(args.lambda_grid):
        pts = k_set(lam)
        expected = sum(t <= lam for t in thresholds)
        ks = " ".join(f"k{q.n}={q.k:.6f}" for q in pts)
        flag = "" if len(pts) == expected else "  MISMATCH"
        print(f"lambda={lam:11.5g}  |K|={len(pts)}  {ks}{flag}")


if __name__ == "__main__":
    main()
