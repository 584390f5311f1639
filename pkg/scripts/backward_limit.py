"""Distance of backward germ maps g_t to the rotation, including the closed-form round-disk value."""
import math
from pathlib import Path

import numpy as np

from _common import parser, write_csv
from circleflow.circlemap import DIOPHANTINE_MENU
from circleflow.flow import Germ, germ_state
from circleflow.fourier import circle_grid


def closed_form_distance(G: Germ, t: float, M: int) -> float:
    A = abs(G.zstar) ** 2
    R = math.exp(t)
    rho = (-A + math.sqrt(A * A + 4 * R * R * A)) / (2 * R)
    c = -G.zstar * rho ** 2 / (A - rho ** 2)
    xi = np.exp(1j * circle_grid(M))
    return float(np.max(np.abs((G.f(R * xi + c) - c) / R - G.lam * xi)))


def main():
    p = parser(__doc__)
    p.add_argument("--b", type=float, default=0.2)
    args = p.parse_args()
    G = Germ("moebius", DIOPHANTINE_MENU["golden"], args.b)
    rows = []
    for t in (-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0):
        st, rho = germ_state(G, t, 2048)
        d = st.distance_to_rotation()
        ref = closed_form_distance(G, t, 2048)
        rows.append((t, rho, d, ref))
        print(f"t = {t:5.1f}  rho = {rho:.6f}  ||g_t - R|| = {d:.6e}  closed form {ref:.6e}")
    write_csv(Path(args.out_dir) / "backward_limit.csv", ["t", "rho", "sup_distance", "closed_form"], rows)


if __name__ == "__main__":
    main()
