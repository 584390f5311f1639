"""Euler and midpoint integration of dg/dt = X(g) against the exact flow."""
from pathlib import Path

import numpy as np

from _common import parser, write_csv
from circleflow.circlemap import ConformalConjugacy, make_linearizable
from circleflow.flow import integrate_flow, phi_exact, sup_distance


def main():
    p = parser(__doc__)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--t-end", type=float, default=0.1)
    args = p.parse_args()
    g = make_linearizable("golden", ConformalConjugacy.moebius(args.a))
    exact = phi_exact(g, args.t_end).map
    rows = []
    for method in ("euler", "midpoint"):
        prev = None
        for dt in (2e-3, 1e-3, 5e-4, 2.5e-4):
            gap = sup_distance(integrate_flow(g, args.t_end, dt, method)[-1].map, exact)
            order = float(np.log2(prev / gap)) if prev else float("nan")
            rows.append((method, dt, gap, order))
            print(f"{method:8s} dt = {dt:.2e}  gap = {gap:.3e}  order = {order:.3f}")
            prev = gap
    write_csv(Path(args.out_dir) / "euler_convergence.csv", ["method", "dt", "gap", "observed_order"], rows)


if __name__ == "__main__":
    main()
