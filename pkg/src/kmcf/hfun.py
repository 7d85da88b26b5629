"""Admissible partitions and the polynomial H(mu; q).

``H`` is the coefficient of ``e^{-mu}`` in ``prod_{a>0} (1 - q e^{-a})^{m(a)}``.
Partitions are stored as root multisets with binomial weights
``prod C(m(root), copies)``, which is the number of index-labelled
partitions collapsing to the multiset.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

from .rootsys import (
    RootSystem,
    RootVector,
    box,
    graded_key,
    in_qminus,
    in_qplus,
    leq,
    unit,
    vadd,
    vneg,
    vscale,
    vsub,
)
from .series import IntLaurent
from .weyl import WeylWord, act, elements_up_to

__all__ = [
    "Part",
    "AdmissiblePartition",
    "partitions",
    "iter_partitions",
    "labelled_count",
    "partition_count",
    "H_partitions",
    "H_product",
    "m_pw",
    "phi",
    "H_wcircle",
    "H_wcircle_sum",
    "twisted_sum",
]


@dataclass(frozen=True, order=True)
class Part:
    root: RootVector
    copies: int
    mult: int
    real: bool


@dataclass(frozen=True)
class AdmissiblePartition:
    parts: tuple[Part, ...]

    @property
    def weight(self) -> int:
        w = 1
        for p in self.parts:
            w *= comb(p.mult, p.copies)
        return w

    @property
    def size(self) -> int:
        """|p|: number of parts counted with copies."""
        return sum(p.copies for p in self.parts)

    def target(self, rank: int) -> RootVector:
        total = (0,) * rank
        for p in self.parts:
            total = vadd(total, vscale(p.copies, p.root))
        return total

    def real_parts(self) -> tuple[Part, ...]:
        return tuple(p for p in self.parts if p.real)

    def __str__(self) -> str:
        if not self.parts:
            return "{}"
        return " + ".join(
            f"{list(p.root)}x{p.copies}" + (f"/{p.mult}" if p.mult > 1 else "") for p in self.parts
        )


def _canon(parts) -> AdmissiblePartition:
    return AdmissiblePartition(tuple(sorted(parts, key=lambda p: graded_key(p.root))))


def _reach_sets(roots, mu) -> list[set]:
    """reach[k]: vectors <= mu expressible with roots[k:] within copy limits."""
    zero = (0,) * len(mu)
    reach = [set() for _ in range(len(roots) + 1)]
    reach[-1] = {zero}
    for k in range(len(roots) - 1, -1, -1):
        root, m = roots[k]
        cur = set(reach[k + 1])
        for v in reach[k + 1]:
            x = v
            for _ in range(m):
                x = vadd(x, root)
                if not leq(x, mu):
                    break
                cur.add(x)
        reach[k] = cur
    return reach


def iter_partitions(rs: RootSystem, mu: Sequence[int]) -> Iterator[AdmissiblePartition]:
    """Stream every admissible partition of mu (as weighted multisets)."""
    mu = tuple(mu)
    if not in_qplus(mu):
        return
    roots = rs.roots_below(mu)
    reals = [rs.is_real(r) for r, _ in roots]
    reach = _reach_sets(roots, mu)
    chosen: list[Part] = []

    def rec(k: int, rem: RootVector):
        if not any(rem):
            yield _canon(chosen)
            return
        if rem not in reach[k]:
            return
        root, m = roots[k]
        # c = 0 first keeps output order deterministic
        yield from rec(k + 1, rem)
        r = rem
        for c in range(1, m + 1):
            r = vsub(r, root)
            if not in_qplus(r):
                break
            chosen.append(Part(root, c, m, reals[k]))
            yield from rec(k + 1, r)
            chosen.pop()

    yield from rec(0, mu)


def _partition_key(p: AdmissiblePartition):
    return (p.size, [(graded_key(x.root), x.copies) for x in p.parts])


def partitions(rs: RootSystem, mu: Sequence[int]) -> list[AdmissiblePartition]:
    mu = tuple(mu)
    cache = rs.memo("partitions")
    if mu not in cache:
        cache[mu] = sorted(iter_partitions(rs, mu), key=_partition_key)
    return cache[mu]


def labelled_count(rs: RootSystem, mu: Sequence[int]) -> int:
    """|P(mu)| counting index-labelled sets."""
    return sum(p.weight for p in partitions(rs, mu))


def partition_count(rs: RootSystem, mu: Sequence[int]) -> int:
    """|P(mu)| = H(mu; -1) without multiplicities or enumeration.

    prod (1 + e^-a)^m = prod (1 - e^-2a)^m / prod (1 - e^-a)^m, and both
    products are alternating sums over W by the denominator identity, so
    only the points rho - w rho below mu are needed.
    """
    mu = tuple(mu)
    if not in_qplus(mu):
        return 0
    A = rs.cartan
    shifts = []
    # ht(rho - w rho) grows with l(w), so stop once a whole length level is too high
    L = 1
    while True:
        level = [(w, vneg(fp)) for w, fp in elements_up_to(A, L) if w.length == L]
        if not level or min(sum(s) for _, s in level) > sum(mu):
            break
        shifts += [(s, (-1) ** L) for _, s in level if leq(s, mu)]
        L += 1
    # kostant[b]: coefficient of e^-b in prod (1 - e^-a)^-m
    kostant: dict[RootVector, int] = {}
    for b in box(mu):
        if not any(b):
            kostant[b] = 1
            continue
        acc = 0
        for s, sign in shifts:
            if leq(s, b):
                acc -= sign * kostant[vsub(b, s)]
        kostant[b] = acc
    total = 0
    for s, sign in [((0,) * len(mu), 1)] + shifts:
        two = vscale(2, s)
        if leq(two, mu):
            total += sign * kostant[vsub(mu, two)]
    return total


def H_partitions(rs: RootSystem, mu: Sequence[int]) -> IntLaurent:
    """H(mu) = sum over admissible partitions of (-q)^{|p|}."""
    mu = tuple(mu)
    cache = rs.memo("H_partitions")
    if mu not in cache:
        acc: dict[int, int] = {}
        for p in iter_partitions(rs, mu):
            t = p.size
            acc[t] = acc.get(t, 0) + (-1) ** t * p.weight
        cache[mu] = IntLaurent(acc)
    return cache[mu]


def H_product(rs: RootSystem, mu: Sequence[int]) -> IntLaurent:
    """H(mu) from the product prod (1 - q e^{-a})^{m(a)} expanded on the box below mu."""
    mu = tuple(mu)
    cache = rs.memo("H_product")
    if mu in cache:
        return cache[mu]
    if not in_qplus(mu):
        return IntLaurent()
    zero = (0,) * len(mu)
    roots = rs.roots_below(mu)
    # only states that can still be completed to mu are kept
    reach = _reach_sets(roots, mu)
    state: dict[RootVector, list[int]] = {zero: [1]}
    for k, (root, m) in enumerate(roots):
        nxt: dict[RootVector, list[int]] = {}
        for v, poly in state.items():
            x = v
            for c in range(0, m + 1):
                if c:
                    x = vadd(x, root)
                    if not leq(x, mu):
                        break
                if vsub(mu, x) not in reach[k + 1]:
                    continue
                coef = (-1) ** c * comb(m, c)
                tgt = nxt.setdefault(x, [])
                need = len(poly) + c
                if len(tgt) < need:
                    tgt.extend([0] * (need - len(tgt)))
                for d, a in enumerate(poly):
                    if a:
                        tgt[d + c] += coef * a
        state = nxt
    result = IntLaurent.from_list(state.get(mu, []))
    cache[mu] = result
    return result


def m_pw(rs: RootSystem, p: AdmissiblePartition, w: WeylWord) -> int:
    """|p| - 2 * #{labelled parts beta with w(beta) < 0}; imaginary parts never flip."""
    A = rs.cartan
    flipped = 0
    for part in p.parts:
        if part.real and in_qminus(act(A, w, part.root)):
            flipped += part.copies
    return p.size - 2 * flipped


def phi(rs: RootSystem, i: int, p: AdmissiblePartition) -> AdmissiblePartition:
    """Bijection P(-lam) -> P(-(s_i o lam)): reflect every part, toggle one alpha_i."""
    A = rs.cartan
    ai = unit(A.rank, i)
    out = []
    had_simple = False
    for part in p.parts:
        if part.root == ai:
            had_simple = True
            continue
        out.append(Part(A.reflect(part.root, i), part.copies, part.mult, part.real))
    if not had_simple:
        out.append(Part(ai, 1, 1, True))
    return _canon(out)


def twisted_sum(rs: RootSystem, lam: Sequence[int], w: WeylWord) -> IntLaurent:
    """sum_p weight * (-q)^{m(p, w)} over p in P(-lam)."""
    acc: dict[int, int] = {}
    for p in partitions(rs, vneg(lam)):
        e = m_pw(rs, p, w)
        acc[e] = acc.get(e, 0) + (-1) ** (e % 2) * p.weight
    return IntLaurent(acc)


def H_wcircle_sum(rs: RootSystem, lam: Sequence[int], w: WeylWord) -> IntLaurent:
    """(-1)^l(w) H(-w o lam) = q^l(w) * sum_p (-q)^{m(p, w)}."""
    return twisted_sum(rs, lam, w).shift(w.length)


def H_wcircle(rs: RootSystem, lam: Sequence[int], w: WeylWord) -> IntLaurent:
    """H(-w o lam) without enumerating partitions of -w o lam."""
    h = H_wcircle_sum(rs, lam, w)
    h = -h if w.length % 2 else h
    return h.require_polynomial()
