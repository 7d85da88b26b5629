"""Truncated formal sums over the negative root lattice.

A :class:`FormalSum` holds ``sum_beta c_beta e^beta`` with every ``beta`` in
``Q^-`` and ``ht(-beta) <= h_max``; coefficients are :class:`IntLaurent`,
optionally truncated above ``q^qdeg``.  Heights add under multiplication, so
products are exact on the retained support.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from math import comb
from typing import Iterator, Mapping, Sequence

from .errors import (
    IdentityViolation,
    NonPolynomial,
    NonTriangularResidue,
    NonUnitConstantTerm,
    NotDominant,
    NotQMinusDominant,
    SupportViolation,
)
from .rootsys import CartanMatrix, RootSystem, RootVector, height, in_qminus, vectors_up_to_height, vneg
from .series import IntLaurent, IntSeries, ONE
from .weyl import WeylWord, elements_up_to, inversion_set, poincare

__all__ = [
    "FormalSum",
    "sum_mul",
    "sum_invert",
    "delta",
    "delta_twisted",
    "correction_M",
    "denominator",
    "verify_denominator_identity",
    "alternating_orbit",
    "xi",
    "character",
    "weight_mult_rho",
    "xi_extract",
    "char_expand",
    "frakm",
]

_BIG = 2**53


def _order(beta: Sequence[int]):
    """Graded lex on -beta."""
    return (-sum(beta), tuple(-x for x in beta))


class FormalSum:
    def __init__(
        self,
        rank: int,
        h_max: int,
        terms: Mapping[Sequence[int], IntLaurent | int] | None = None,
        qdeg: int | None = None,
    ):
        self.rank = rank
        self.h_max = h_max
        self.qdeg = qdeg
        self.terms: dict[RootVector, IntLaurent] = {}
        for beta, c in (terms or {}).items():
            self.add_term(beta, c)

    @classmethod
    def one(cls, rank: int, h_max: int, qdeg: int | None = None) -> FormalSum:
        return cls(rank, h_max, {(0,) * rank: ONE}, qdeg)

    @classmethod
    def monomial(cls, rank: int, h_max: int, beta, coeff=1, qdeg=None) -> FormalSum:
        return cls(rank, h_max, {tuple(beta): coeff}, qdeg)

    def _like(self, h_max=None, qdeg="same") -> FormalSum:
        return FormalSum(
            self.rank, self.h_max if h_max is None else h_max, None, self.qdeg if qdeg == "same" else qdeg
        )

    def in_range(self, beta: Sequence[int]) -> bool:
        return in_qminus(beta) and -sum(beta) <= self.h_max

    def add_term(self, beta: Sequence[int], c) -> None:
        beta = tuple(beta)
        if len(beta) != self.rank:
            raise ValueError(f"exponent {beta} has wrong rank")
        if not in_qminus(beta):
            raise ValueError(f"exponent {beta} is not in Q^-")
        if -sum(beta) > self.h_max:
            return
        if isinstance(c, int):
            c = IntLaurent.const(c)
        c = c.truncate(self.qdeg)
        if not c:
            return
        total = self.terms.get(beta)
        total = c if total is None else total + c
        if total:
            self.terms[beta] = total
        else:
            del self.terms[beta]

    # -- access -------------------------------------------------------------

    def __getitem__(self, beta: Sequence[int]) -> IntLaurent:
        return self.terms.get(tuple(beta), IntLaurent())

    def items(self) -> list[tuple[RootVector, IntLaurent]]:
        return sorted(self.terms.items(), key=lambda kv: _order(kv[0]))

    def __iter__(self) -> Iterator[RootVector]:
        return iter(sorted(self.terms, key=_order))

    def support(self) -> list[RootVector]:
        return sorted(self.terms, key=_order)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> IntLaurent:
        return self[(0,) * self.rank]

    def series(self, beta: Sequence[int]) -> IntSeries:
        if self.qdeg is None:
            raise ValueError("series view needs a q-degree cutoff")
        return IntSeries.from_laurent(self[beta], self.qdeg)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: FormalSum) -> None:
        if other.rank != self.rank:
            raise ValueError("rank mismatch")

    def _cut(self, other: FormalSum) -> tuple[int, int | None]:
        h = min(self.h_max, other.h_max)
        qs = [d for d in (self.qdeg, other.qdeg) if d is not None]
        return h, (min(qs) if qs else None)

    def __add__(self, other: FormalSum) -> FormalSum:
        self._check(other)
        h, d = self._cut(other)
        out = FormalSum(self.rank, h, None, d)
        for beta, c in self.terms.items():
            out.add_term(beta, c)
        for beta, c in other.terms.items():
            out.add_term(beta, c)
        return out

    def __neg__(self) -> FormalSum:
        out = self._like()
        out.terms = {b: -c for b, c in self.terms.items()}
        return out

    def __sub__(self, other: FormalSum) -> FormalSum:
        return self + (-other)

    def scale(self, c: IntLaurent | int) -> FormalSum:
        out = self._like()
        for beta, v in self.terms.items():
            out.add_term(beta, v * c)
        return out

    def shift_q(self, k: int) -> FormalSum:
        """Multiply every coefficient by q^k."""
        return self.scale(IntLaurent.monomial(k))

    def __mul__(self, other) -> FormalSum:
        if isinstance(other, (int, IntLaurent)):
            return self.scale(other)
        if isinstance(other, IntSeries):
            return self.scale(other.to_laurent())
        if not isinstance(other, FormalSum):
            return NotImplemented
        self._check(other)
        h, d = self._cut(other)
        out = FormalSum(self.rank, h, None, d)
        right = [(b, -sum(b), c) for b, c in other.terms.items()]
        for a, ca in self.terms.items():
            ha = -sum(a)
            if ha > h:
                continue
            for b, hb, cb in right:
                if ha + hb <= h:
                    out.add_term(tuple(x + y for x, y in zip(a, b)), ca * cb)
        return out

    __rmul__ = __mul__

    def mul_ray(self, alpha: Sequence[int], coeffs: Sequence[IntLaurent]) -> FormalSum:
        """Multiply by sum_n coeffs[n] e^{-n alpha} (a series along one root ray)."""
        out = self._like()
        ha = sum(alpha)
        for beta, c in self.terms.items():
            hb = -sum(beta)
            for n, cn in enumerate(coeffs):
                if hb + n * ha > self.h_max:
                    break
                if cn:
                    out.add_term(tuple(x - n * a for x, a in zip(beta, alpha)), c * cn)
        return out

    def inverse(self) -> FormalSum:
        """Inverse by recursion on height; the e^0 coefficient must be a unit."""
        zero = (0,) * self.rank
        c0 = self[zero]
        if self.qdeg is None:
            if c0 not in (ONE, -ONE):
                raise NonUnitConstantTerm(f"constant term {c0} is not +-1")
            inv0 = c0
        else:
            if not c0.is_polynomial():
                raise NonUnitConstantTerm(f"constant term {c0} is not a power series")
            inv0 = IntSeries.from_laurent(c0, self.qdeg).inverse().to_laurent()
        rest = [(b, c) for b, c in self.terms.items() if b != zero]
        out = self._like()
        out.terms[zero] = inv0
        for pos in vectors_up_to_height(self.rank, self.h_max, include_zero=False):
            beta = vneg(pos)
            acc = IntLaurent()
            for gamma, cg in rest:
                rem = tuple(x - y for x, y in zip(beta, gamma))
                g = out.terms.get(rem)
                if g is not None:
                    acc = acc + cg * g
            if acc:
                out.add_term(beta, -(acc * inv0))
        return out

    def truncate(self, h_max: int | None = None, qdeg: int | None = None) -> FormalSum:
        h = self.h_max if h_max is None else min(h_max, self.h_max)
        d = self.qdeg if qdeg is None else (qdeg if self.qdeg is None else min(qdeg, self.qdeg))
        out = FormalSum(self.rank, h, None, d)
        for beta, c in self.terms.items():
            out.add_term(beta, c)
        return out

    def require_polynomial(self) -> FormalSum:
        for beta, c in self.terms.items():
            if not c.is_polynomial():
                raise NonPolynomial(f"negative q-power at e^{list(beta)}: {c}")
        return self

    # -- comparison and serialization -----------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return (
            self.rank == other.rank
            and self.h_max == other.h_max
            and self.qdeg == other.qdeg
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        body = " + ".join(f"({c})e^{list(b)}" for b, c in self.items()[:6])
        more = " + ..." if len(self.terms) > 6 else ""
        return f"FormalSum(h_max={self.h_max}, qdeg={self.qdeg}: {body or '0'}{more})"

    def to_json(self) -> dict:
        terms = []
        for beta, c in self.items():
            low = min(c.low, 0)
            entry = {
                "exp": list(beta),
                "coeff": [_num(c[k]) for k in range(low, c.high + 1)],
            }
            if low:
                entry["qlow"] = low
            terms.append(entry)
        return {"cutoff_ht": self.h_max, "qdeg": self.qdeg, "rank": self.rank, "terms": terms}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Mapping | str) -> FormalSum:
        if isinstance(data, str):
            data = json.loads(data)
        terms = data["terms"]
        rank = len(terms[0]["exp"]) if terms else int(data.get("rank", 1))
        out = cls(rank, int(data["cutoff_ht"]), None, data.get("qdeg"))
        for t in terms:
            coeffs = [int(v) for v in t["coeff"]]
            out.add_term(tuple(t["exp"]), IntLaurent.from_list(coeffs, t.get("qlow", 0)))
        return out


def _num(v: int):
    return str(v) if abs(v) >= _BIG else v


def sum_mul(f: FormalSum, g: FormalSum) -> FormalSum:
    return f * g


def sum_invert(f: FormalSum) -> FormalSum:
    return f.inverse()


# -- product forms ------------------------------------------------------------


def _ray_delta(m: int, kmax: int) -> list[IntLaurent]:
    """((1 - q t) / (1 - t))^m up to t^kmax."""
    num = [IntLaurent.const((-1) ** j * comb(m, j)).shift(j) for j in range(min(m, kmax) + 1)]
    den = [comb(n + m - 1, n) for n in range(kmax + 1)]
    out = []
    for n in range(kmax + 1):
        acc = IntLaurent()
        for j in range(min(n, len(num) - 1) + 1):
            acc = acc + num[j] * den[n - j]
        out.append(acc)
    return out


def _ray_binomial(m: int, kmax: int) -> list[IntLaurent]:
    """(1 - t)^m up to t^kmax."""
    return [IntLaurent.const((-1) ** j * comb(m, j)) for j in range(min(m, kmax) + 1)]


def _ray_flip(kmax: int) -> list[IntLaurent]:
    """(1 - q^-1 t) / (1 - q t): turns a Delta factor into its reflected form."""
    out = [ONE]
    for n in range(1, kmax + 1):
        out.append(IntLaurent({n: 1, n - 2: -1}))
    return out


def _roots_for(rs: RootSystem, h_max: int, variant: str) -> list[tuple[RootVector, int]]:
    roots = rs.positive_roots(h_max)
    if variant == "full":
        return roots
    if variant == "re":
        return [(b, m) for b, m in roots if rs.is_real(b)]
    if variant == "im":
        return [(b, m) for b, m in roots if not rs.is_real(b)]
    raise ValueError(f"unknown delta variant {variant!r}")


def delta(rs: RootSystem, h_max: int, variant: str = "full") -> FormalSum:
    """prod over positive roots of ((1 - q e^-a) / (1 - e^-a))^m(a), up to h_max."""
    memo = rs.memo("delta")
    key = (h_max, variant)
    if key not in memo:
        f = FormalSum.one(rs.rank, h_max)
        for beta, m in _roots_for(rs, h_max, variant):
            f = f.mul_ray(beta, _ray_delta(m, h_max // height(beta)))
        memo[key] = f
    return memo[key]


def delta_twisted(rs: RootSystem, w: WeylWord, h_max: int) -> FormalSum:
    """Delta^w = q^l(w) * Delta * prod over Phi(w^-1) of (1 - q^-1 e^-a) / (1 - q e^-a)."""
    f = delta(rs, h_max)
    for gamma in inversion_set(rs.cartan, w):
        if height(gamma) <= h_max:
            f = f.mul_ray(gamma, _ray_flip(h_max // height(gamma)))
    return f.shift_q(w.length) if w.length else f


def _partial_M(args) -> dict[RootVector, IntLaurent]:
    rs, words, h_max = args
    acc = FormalSum(rs.rank, h_max)
    for w in words:
        acc = acc + delta_twisted(rs, w, h_max)
    return acc.terms


def correction_M(rs: RootSystem, h_max: int, D: int, jobs: int = 1) -> FormalSum:
    """M(q) = sum_w Delta^w with coefficients exact modulo q^(D+1).

    Only w with l(w) <= D + h_max can touch degrees <= D.
    """
    memo = rs.memo("correction_M")
    key = (h_max, D)
    if key in memo:
        return memo[key]
    words = [w for w, _ in elements_up_to(rs.cartan, D + h_max)]
    if jobs > 1 and len(words) > 1:
        rs.multiplicity_table(h_max)
        chunks = [words[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_partial_M, [(rs, c, h_max) for c in chunks]))
    else:
        parts = [_partial_M((rs, words, h_max))]
    total = FormalSum(rs.rank, h_max)
    for terms in parts:
        total = total + FormalSum(rs.rank, h_max, terms)
    out = FormalSum(rs.rank, h_max, None, D)
    for beta, c in total.terms.items():
        c = c.truncate(D)
        if not c.is_polynomial():
            raise NonPolynomial(f"M(q) has negative q-powers at e^{list(beta)}: {c}")
        out.add_term(beta, c)
    memo[key] = out
    return out


def denominator(rs: RootSystem, h_max: int) -> FormalSum:
    """prod over positive roots of (1 - e^-a)^m(a)."""
    memo = rs.memo("denominator")
    if h_max not in memo:
        f = FormalSum.one(rs.rank, h_max)
        for beta, m in rs.positive_roots(h_max):
            f = f.mul_ray(beta, _ray_binomial(m, h_max // height(beta)))
        memo[h_max] = f
    return memo[h_max]


def _denominator_inverse(rs: RootSystem, h_max: int) -> FormalSum:
    memo = rs.memo("denominator_inverse")
    if h_max not in memo:
        memo[h_max] = denominator(rs, h_max).inverse()
    return memo[h_max]


def alternating_orbit(A: CartanMatrix, start: Sequence[int], shift: int, h_max: int) -> dict[RootVector, int]:
    """sum_w (-1)^l(w) e^{x_w} where x_{s_i w} = x_w - (<x_w, a_i^v> + shift) a_i.

    With shift 1 this is the circle orbit of ``start``; with shift 2 and start 0
    it is ``w(2 rho) - 2 rho``.  ``start + shift*rho`` must be regular dominant.
    Heights grow strictly along the orbit, so a BFS pruned at h_max is complete.
    """
    start = tuple(start)
    out = {start: 1}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for i in range(A.rank):
                step = A.pairing(x, i) + shift
                if step <= 0:
                    continue
                y = list(x)
                y[i] -= step
                y = tuple(y)
                if -sum(y) > h_max or y in out:
                    continue
                out[y] = -out[x]
                nxt.append(y)
        frontier = nxt
    return out


def verify_denominator_identity(rs: RootSystem, h_max: int, L: int | None = None) -> bool:
    """Compare sum_w (-1)^l(w) e^{w rho - rho} with the product form; raise on mismatch."""
    L = h_max if L is None else L
    alt = FormalSum(rs.rank, h_max)
    for w, fp in elements_up_to(rs.cartan, L):
        alt.add_term(fp, (-1) ** w.length)
    prod = denominator(rs, h_max)
    if alt != prod:
        bad = next(
            b for b in sorted(set(alt.terms) | set(prod.terms), key=_order) if alt[b] != prod[b]
        )
        raise IdentityViolation(
            f"denominator identity fails at e^{list(bad)}: sum side {alt[bad]}, product side {prod[bad]}"
        )
    return True


def xi(rs: RootSystem, lam: Sequence[int], h_max: int) -> FormalSum:
    """sum_w (-1)^l(w) e^{w o lam}, zero when some s_i fixes lam."""
    A = rs.cartan
    lam = tuple(lam)
    if not in_qminus(lam) or any(A.pairing(lam, i) < -1 for i in range(A.rank)):
        raise NotQMinusDominant(f"{lam} needs to lie in Q^- with lam + rho dominant")
    if any(A.pairing(lam, i) == -1 for i in range(A.rank)):
        return FormalSum(A.rank, h_max)
    return FormalSum(A.rank, h_max, alternating_orbit(A, lam, 1, h_max))


def _require_dominant(A: CartanMatrix, lam: RootVector) -> None:
    if not in_qminus(lam) or not A.is_dominant(lam):
        raise NotDominant(f"{lam} is not in P^+ cap Q^-")


def character(rs: RootSystem, lam: Sequence[int], h_max: int) -> FormalSum:
    """ch L(lam) = xi^lam / denominator, as a sum over Q^- up to h_max."""
    lam = tuple(lam)
    _require_dominant(rs.cartan, lam)
    memo = rs.memo("character")
    key = (lam, h_max)
    if key not in memo:
        memo[key] = xi(rs, lam, h_max) * _denominator_inverse(rs, h_max)
    return memo[key]


def weight_mult_rho(rs: RootSystem, lam: Sequence[int], h_max: int | None = None) -> int:
    """dim L(rho)_{lam + rho}."""
    lam = tuple(lam)
    _require_dominant(rs.cartan, lam)
    h = -sum(lam) if h_max is None else h_max
    if -sum(lam) > h:
        raise ValueError(f"h_max={h} is below ht(-lam)={-sum(lam)}")
    num = FormalSum(rs.rank, h, alternating_orbit(rs.cartan, (0,) * rs.rank, 2, h))
    value = (num * _denominator_inverse(rs, h))[lam]
    return value[0]


def _coeff_out(c: IntLaurent, qdeg: int | None):
    return IntLaurent(dict(c.items())) if qdeg is None else IntSeries.from_laurent(c, qdeg)


def xi_extract(rs: RootSystem, big_xi: FormalSum) -> dict[RootVector, IntSeries | IntLaurent]:
    """Write big_xi as sum over P^+ cap Q^- of c_lam xi^lam (triangular in height)."""
    A = rs.cartan
    h = big_xi.h_max
    residual = big_xi
    out = {}
    while not residual.is_zero():
        beta, c = residual.items()[0]
        if not A.is_dominant(beta):
            raise NonTriangularResidue(
                f"leading residual term at {list(beta)} is not dominant",
                point=beta,
                suggested_cutoff=h + 2,
            )
        out[beta] = _coeff_out(c, big_xi.qdeg)
        residual = residual - xi(rs, beta, h).scale(c)
    return out


def char_expand(rs: RootSystem, f: FormalSum) -> dict[RootVector, IntSeries | IntLaurent]:
    """Coefficients d_lam with f = sum d_lam ch L(lam); support must be P^+ cap Q_im^-."""
    A = rs.cartan
    h = f.h_max
    residual = f
    out = {}
    while not residual.is_zero():
        beta, c = residual.items()[0]
        if not A.is_dominant(beta) or not A.in_neg_imaginary_cone(beta):
            raise SupportViolation(f"coefficient {c} at {list(beta)} lies outside P^+ cap Q_im^-")
        out[beta] = _coeff_out(c, f.qdeg)
        residual = residual - character(rs, beta, h).scale(c)
    return out


def frakm(rs: RootSystem, h_max: int, D: int) -> FormalSum:
    """The series m with m * M(q) = Delta_im * chi(q)."""
    M = correction_M(rs, h_max, D)
    chi = M.constant_term()
    m = delta(rs, h_max, "im").truncate(qdeg=D) * M.inverse()
    m = m.scale(chi)
    for beta in m.terms:
        if not rs.cartan.in_neg_imaginary_cone(beta):
            raise SupportViolation(f"frakm has support at {list(beta)} outside Q_im^-")
    return m


def chi_series(rs: RootSystem, D: int) -> IntSeries:
    mode = "closed_form" if rs.cartan.is_universal_coxeter else "enumerated"
    return poincare(rs.cartan, D, mode)
