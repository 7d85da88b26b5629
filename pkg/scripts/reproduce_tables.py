"""Recompute the H3 reference tables: H-values, orbit rows and d-polynomials."""

import argparse
import json

from kmcf.correction import H3_D_VALUES, H3_H_VALUES, H3_ORBIT_ROWS, d_exact, d_series
from kmcf.hfun import H_partitions, H_product, H_wcircle, labelled_count
from kmcf.rootsys import RootSystem
from kmcf.weyl import WeylWord, circle_act


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=10, help="series depth for d_series")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    rs = RootSystem.preset("h3")
    rows = {"H": [], "orbit": [], "d": []}
    for mu, ref in H3_H_VALUES.items():
        got = H_partitions(rs, mu)
        rows["H"].append(
            {"mu": mu, "H": str(got), "partitions": labelled_count(rs, mu),
             "routes_agree": got == H_product(rs, mu), "matches_reference": got == ref}
        )
    for (lam, word), ref in H3_ORBIT_ROWS.items():
        w = WeylWord.parse(word)
        got = H_wcircle(rs, lam, w)
        rows["orbit"].append(
            {"lambda": lam, "w": word, "-w o lambda": tuple(-c for c in circle_act(rs.cartan, w, lam)),
             "H": str(got), "matches_reference": got == ref}
        )
    for lam, ref in H3_D_VALUES.items():
        exact = d_exact(rs, lam)
        rows["d"].append(
            {"lambda": lam, "d_exact": str(exact), "series_agrees": d_series(rs, lam, args.depth) == exact,
             "matches_reference": exact == ref}
        )

    if args.json:
        print(json.dumps(rows, indent=2, default=list))
        return
    for section, entries in rows.items():
        print(f"[{section}]")
        for e in entries:
            print("  " + "  ".join(f"{k}={v}" for k, v in e.items()))


if __name__ == "__main__":
    main()
