"""Driving measure extracted from chain increments against the 2-conformal measure."""
from pathlib import Path

from _common import parser, write_csv
from circleflow.circlemap import ConformalConjugacy, make_linearizable
from circleflow.flow import loewner_measure, phi_exact
from circleflow.measures import conformal_measure_oracle, weak_distance


def main():
    p = parser(__doc__)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--t", type=float, default=0.05)
    args = p.parse_args()
    g = make_linearizable("golden", ConformalConjugacy.moebius(args.a))
    st = phi_exact(g, args.t)
    ref = conformal_measure_oracle(st.map, 2.0).pullback_conj()
    rows = []
    for ds in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4):
        L = loewner_measure(st, phi_exact(g, args.t + ds))
        wd = weak_distance(L, ref)
        rows.append((ds, wd, L.meta["n_moments_effective"], L.meta["clipped_mass"]))
        print(f"s - t = {ds:.0e}  weak distance = {wd:.3e}  moments kept = {L.meta['n_moments_effective']}")
    write_csv(Path(args.out_dir) / "loewner_measure.csv", ["ds", "weak_distance", "n_moments", "clipped_mass"], rows)


if __name__ == "__main__":
    main()
