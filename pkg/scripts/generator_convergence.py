"""Difference quotients (Phi_t(g) - g)/t against the generator X(g) for the Moebius family."""
from pathlib import Path

import numpy as np

from _common import parser, write_csv
from circleflow.circlemap import ConformalConjugacy, make_linearizable
from circleflow.flow import generator, phi_exact


def main():
    p = parser(__doc__)
    p.add_argument("--a", type=float, default=0.3)
    args = p.parse_args()
    g = make_linearizable("golden", ConformalConjugacy.moebius(args.a))
    X = generator(g, "oracle").X
    ts = np.geomspace(1e-1, 1e-5, 9)
    rows = []
    for t in ts:
        err = float(np.max(np.abs((phi_exact(g, t).map.samples() - g.samples()) / t - X)))
        rows.append((float(t), err))
        print(f"t = {t:.1e}  sup error = {err:.3e}")
    slope = np.polyfit(np.log(ts), np.log([r[1] for r in rows]), 1)[0]
    print(f"log-log slope {slope:.4f}")
    write_csv(Path(args.out_dir) / "generator_convergence.csv", ["t", "sup_error"], rows)


if __name__ == "__main__":
    main()
