"""Residuals of the conformal radius identities for the Moebius germ as the time step shrinks."""
from pathlib import Path

from _common import parser, write_csv
from circleflow.circlemap import DIOPHANTINE_MENU
from circleflow.flow import Germ
from circleflow.radius import radius_trace, verify_radius_identities


def main():
    p = parser(__doc__)
    p.add_argument("--b", type=float, default=0.2)
    p.add_argument("--t", type=float, default=0.5)
    args = p.parse_args()
    G = Germ("moebius", DIOPHANTINE_MENU["golden"], args.b)
    rows = []
    for h in (4e-3, 2e-3, 1e-3, 5e-4):
        rep = verify_radius_identities(radius_trace(G, [args.t - h, args.t, args.t + h], 2048))
        rows.append((h, rep["max_residual_real"], rep["max_residual_imag"], rep["max_integral_gap"]))
        print(f"dt = {h:.1e}  real {rows[-1][1]:.3e}  k-dot {rows[-1][2]:.3e}  integral {rows[-1][3]:.3e}")
    write_csv(Path(args.out_dir) / "radius_identities.csv",
              ["dt", "residual_real_identity", "residual_imag_identity", "integral_gap"], rows)


if __name__ == "__main__":
    main()
