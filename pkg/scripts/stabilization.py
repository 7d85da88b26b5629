"""How much of the Weyl group the truncated series for d_lambda really needs.

d_series sums (-1)^l(w) H(-w o lambda) over every w with l(w) <= D + ht(-lambda).
For each support point this reports the smallest length cutoff L from which the
partial sum already reproduces d_exact mod q^(D+1), next to that safe bound.
"""

import argparse

from kmcf.correction import d_exact, support_points
from kmcf.hfun import H_wcircle_sum
from kmcf.rootsys import PRESETS, RootSystem
from kmcf.series import IntLaurent, IntSeries
from kmcf.weyl import counts_by_length, elements_up_to, poincare


def partial_sums(rs, lam, D):
    """Yield (L, d mod q^(D+1)) using only words of length <= L."""
    A = rs.cartan
    bound = D - sum(lam)
    chi_inv = poincare(A, D).inverse()
    total = IntLaurent()
    elems = elements_up_to(A, bound)
    for L in range(bound + 1):
        for w, _ in elems:
            if w.length == L:
                total = total + H_wcircle_sum(rs, lam, w)
        low = total.truncate(D)
        if low.is_polynomial():
            yield L, IntSeries.from_laurent(low, D) * chi_inv
        else:
            yield L, None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="h3", choices=sorted(PRESETS))
    ap.add_argument("--max-height", type=int, default=10)
    ap.add_argument("--depth", type=int, default=8)
    args = ap.parse_args()

    rs = RootSystem.preset(args.preset)
    D = args.depth
    print(f"{'lambda':>10} {'needed L':>9} {'bound':>6} {'words needed':>13} {'words summed':>13}")
    for lam in support_points(rs.cartan, args.max_height):
        want = IntSeries.from_laurent(d_exact(rs, lam).truncate(D), D)
        bound = D - sum(lam)
        needed = bound
        for L, got in reversed(list(partial_sums(rs, lam, D))):
            if got != want:
                break
            needed = L
        counts = counts_by_length(rs.cartan, bound)
        print(f"{str(lam):>10} {needed:>9} {bound:>6} {sum(counts[: needed + 1]):>13} {sum(counts):>13}")


if __name__ == "__main__":
    main()
