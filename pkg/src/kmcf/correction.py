"""The coefficients d_lambda of the correction factor M(q) / chi(q).

Two routes are provided: a truncated series from the alternating sum of
``H(-w o lam)`` over the Weyl group, and, for universal Coxeter groups, an
exact polynomial obtained by summing the geometric tails in closed form.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .charring import (
    char_expand,
    correction_M,
    denominator,
    frakm,
    verify_denominator_identity,
    weight_mult_rho,
    xi_extract,
)
from .errors import (
    ConstancyViolation,
    DivisibilityFailure,
    IdentityViolation,
    KMCFError,
    NotInSupport,
    NotUniversalCoxeter,
)
from .hfun import (
    H_partitions,
    H_product,
    H_wcircle,
    H_wcircle_sum,
    labelled_count,
    m_pw,
    partition_count,
    partitions,
    phi,
    twisted_sum,
)
from .rootsys import CartanMatrix, RootSystem, RootVector, in_qminus, vectors_up_to_height, vneg
from .series import IntLaurent, IntSeries, ONE, Q
from .weyl import WeylWord, circle_act, counts_by_length, elements_up_to, poincare

__all__ = [
    "support_points",
    "d_series",
    "N_of",
    "TailData",
    "tail_data",
    "m_pWv",
    "constancy_check",
    "d_exact",
    "verify_suite",
    "PROFILES",
]


def support_points(A: CartanMatrix, h_max: int) -> list[RootVector]:
    """P^+ cap Q_im^- up to height h_max, graded by ht(-lam)."""
    out = []
    for pos in vectors_up_to_height(A.rank, h_max):
        lam = vneg(pos)
        if A.is_dominant(lam) and A.in_neg_imaginary_cone(lam):
            out.append(lam)
    return out


def _in_support(A: CartanMatrix, lam: RootVector) -> bool:
    return in_qminus(lam) and A.is_dominant(lam) and A.in_neg_imaginary_cone(lam)


def d_series(rs: RootSystem, lam: Sequence[int], D: int, strict: bool = True) -> IntSeries:
    """d_lam mod q^(D+1) from chi(q) d_lam = sum_w (-1)^l(w) H(-w o lam).

    The term for w has lowest q-power >= l(w) - ht(-lam), so words longer
    than D + ht(-lam) cannot contribute.  ``strict=False`` evaluates the
    right-hand side at any lam in Q^-.
    """
    lam = tuple(lam)
    A = rs.cartan
    if not in_qminus(lam):
        raise NotInSupport(f"{lam} is not in Q^-")
    if strict and not _in_support(A, lam):
        raise NotInSupport(f"{lam} is not in P^+ cap Q_im^-")
    ht = -sum(lam)
    total = IntLaurent()
    for w, _ in elements_up_to(A, D + ht):
        total = total + H_wcircle_sum(rs, lam, w)
    total = total.truncate(D)
    if not total.is_polynomial():
        raise KMCFError(f"alternating H-sum has negative q-powers: {total}")
    rhs = IntSeries.from_laurent(total, D)
    return rhs * poincare(A, D).inverse()


def _require_universal(A: CartanMatrix) -> None:
    if not A.is_universal_coxeter:
        raise NotUniversalCoxeter("closed form needs a_ij a_ji >= 4 for all i != j")


def N_of(rs: RootSystem, lam: Sequence[int]) -> int:
    """1 + the largest depth of a real root occurring as a part of some partition of -lam."""
    _require_universal(rs.cartan)
    depth = -1
    for p in partitions(rs, vneg(lam)):
        for part in p.parts:
            if part.real:
                depth = max(depth, rs.depth(part.root))
    return depth + 1 if depth >= 0 else 1


def _words_of_length(A: CartanMatrix, k: int) -> list[WeylWord]:
    return [w for w, _ in elements_up_to(A, k) if w.length == k]


def m_pWv(rs: RootSystem, p, v: WeylWord) -> int:
    """m(p, W_v), read off the minimal element v of W_v."""
    return m_pw(rs, p, v)


def constancy_check(rs: RootSystem, lam: Sequence[int], v: WeylWord, sample_depth: int = 3) -> int:
    """Check m(p, u v) = m(p, v) for left extensions u with l(u v) = l(u) + l(v).

    Returns the number of (p, u) pairs checked.
    """
    A = rs.cartan
    _require_universal(A)
    parts = partitions(rs, vneg(lam))
    base = [m_pw(rs, p, v) for p in parts]
    checked = 0
    for u, _ in elements_up_to(A, sample_depth):
        if u.length == 0 or (v.letters and u.letters[-1] == v.letters[0]):
            continue
        uv = u * v
        for p, m0 in zip(parts, base):
            checked += 1
            if m_pw(rs, p, uv) != m0:
                raise ConstancyViolation(
                    f"m(p, w) not constant on W_{v}: p={p}, w={uv}: {m_pw(rs, p, uv)} != {m0}"
                )
    return checked


@dataclass(frozen=True)
class TailData:
    """Geometric-tail data for one v of length N.

    ``F = sum_k a_k q^k`` is ``sum_p weight (-q)^{m(p, v)}``, and
    ``F / (1 - (n-1) q) = Q_v + A_v q^r / (1 - (n-1) q)``.
    """

    v: WeylWord
    N: int
    F: IntLaurent
    P_v: IntLaurent
    Q_v: IntLaurent
    A_v: int
    r: int

    @property
    def a(self) -> dict[int, int]:
        return dict(self.F.items())


def tail_data(rs: RootSystem, lam: Sequence[int], v: WeylWord) -> TailData:
    n = rs.rank
    c = n - 1
    F = twisted_sum(rs, lam, v)
    P_v = F.shift(v.length).require_polynomial()
    if F.is_zero():
        return TailData(v, v.length, F, P_v, IntLaurent(), 0, 0)
    k0, r = F.low, F.high
    q_coeffs = {}
    run = 0
    for k in range(k0, r):
        run = run * c + F[k]
        if run:
            q_coeffs[k] = run
    A_v = run * c + F[r]
    return TailData(v, v.length, F, P_v, IntLaurent(q_coeffs), A_v, r)


def _closed_numerator(rs: RootSystem, lam: Sequence[int], N: int) -> IntLaurent:
    """(1 - (n-1) q) * sum_{l(w)<N} q^l F_w + sum_{l(v)=N} q^N F_v."""
    A = rs.cartan
    head = IntLaurent()
    tail = IntLaurent()
    for w, _ in elements_up_to(A, N):
        term = H_wcircle_sum(rs, lam, w)
        if w.length < N:
            head = head + term
        else:
            tail = tail + term
    return head * (ONE - Q * (A.rank - 1)) + tail


def d_exact(rs: RootSystem, lam: Sequence[int], sample_depth: int = 2) -> IntLaurent:
    """d_lam as a polynomial (universal Coxeter groups only)."""
    lam = tuple(lam)
    A = rs.cartan
    _require_universal(A)
    if not _in_support(A, lam):
        raise NotInSupport(f"{lam} is not in P^+ cap Q_im^-")
    N = N_of(rs, lam)
    if sample_depth:
        for v in _words_of_length(A, N):
            constancy_check(rs, lam, v, sample_depth)
    numer = _closed_numerator(rs, lam, N)
    if not numer.is_polynomial():
        raise DivisibilityFailure(f"numerator {numer} is not a polynomial")
    quo, rem = numer.divmod(ONE + Q)
    if rem:
        raise DivisibilityFailure(f"numerator {numer} leaves remainder {rem} mod 1+q")
    return quo.require_polynomial()


# -- verification profiles ----------------------------------------------------


@dataclass
class FamilyResult:
    name: str
    passed: bool
    checked: int
    counterexample: str | None = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class Report:
    profile: str
    families: list[FamilyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families)

    def as_dict(self) -> dict:
        return {
            "profile": self.profile,
            "passed": self.passed,
            "families": [f.as_dict() for f in self.families],
        }


class _Fail(Exception):
    pass


def _expect(cond: bool, what: str) -> None:
    if not cond:
        raise _Fail(what)


def _run(name: str, fn: Callable[[], int]) -> FamilyResult:
    t0 = time.perf_counter()
    try:
        n = fn()
        return FamilyResult(name, True, n, None, time.perf_counter() - t0)
    except _Fail as exc:
        return FamilyResult(name, False, 0, str(exc), time.perf_counter() - t0)
    except KMCFError as exc:
        return FamilyResult(name, False, 0, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)


def _poly(coeffs: dict[int, int]) -> IntLaurent:
    return IntLaurent(coeffs)


def _macdonald(name: str, h: int = 8, D: int = 8) -> Callable[[], int]:
    def check() -> int:
        rs = RootSystem.preset(name)
        M = correction_M(rs, h, D)
        chi = poincare(rs.cartan, D)
        _expect(M.series((0,) * rs.rank) == chi, f"{name}: constant term {M.constant_term()} != chi")
        others = [b for b in M.terms if any(b)]
        _expect(not others, f"{name}: nonzero coefficient at {others[:1]}")
        d = char_expand(rs, M.scale(chi.inverse().to_laurent()))
        _expect(
            list(d) == [(0,) * rs.rank] and d[(0,) * rs.rank] == 1,
            f"{name}: char_expand gave {d}",
        )
        verify_denominator_identity(rs, h)
        return 1

    return check


# reference values for the hyperbolic matrix [[2,-3],[-3,2]]
H3_H_VALUES: dict[RootVector, IntLaurent] = {
    (2, 2): _poly({1: -1, 2: 2, 3: -1}),
    (5, 2): _poly({1: -1, 2: 2, 3: -1}),
    (2, 3): _poly({1: -2, 2: 3, 3: -1}),
    (8, 3): _poly({1: -1, 2: 3, 3: -2}),
    (2, 4): _poly({1: -1, 2: 3, 3: -2}),
    (3, 3): _poly({1: -3, 2: 6, 3: -3}),
    (8, 22): _poly({2: 1, 3: -3, 4: 2}),
    (11, 4): _poly({2: 2, 3: -3, 4: 1}),
}

H3_D_VALUES: dict[RootVector, IntLaurent] = {
    (0, 0): ONE,
    (-1, -1): _poly({1: 1, 2: -1}),
    (-2, -2): _poly({1: 1, 2: -2, 3: 1}),
    (-2, -3): IntLaurent(),
    (-3, -3): _poly({1: 1, 2: -2, 3: 1}),
    (-3, -4): _poly({2: -2, 3: 2}),
    (-4, -4): _poly({1: 2, 2: -4, 3: 2}),
    (-4, -5): _poly({2: -4, 3: 5, 4: -1}),
    (-4, -6): _poly({1: 1, 2: -3, 3: 2, 4: 1, 5: -1}),
    (-5, -5): _poly({1: 2, 2: -9, 3: 10, 4: -2, 5: -1}),
}

# (lam, w) -> H(-w o lam); rows are keyed by the word that produces the
# tabulated w o lam coordinates
H3_ORBIT_ROWS: dict[tuple[RootVector, str], IntLaurent] = {
    ((-2, -3), "21"): _poly({2: 1, 3: -3, 4: 2}),
    ((-2, -3), "121"): _poly({3: -1, 4: 3, 5: -2}),
    ((-2, -3), "212"): _poly({3: -2, 4: 3, 5: -1}),
    ((-3, -3), "1"): _poly({1: -2, 2: 5, 3: -4, 4: 1}),
    ((-3, -3), "121"): _poly({3: -2, 4: 5, 5: -4, 6: 1}),
    ((-3, -4), "1"): _poly({1: -1, 2: 7, 3: -8, 4: 2}),
    ((-3, -4), "2"): _poly({1: -3, 2: 8, 3: -6, 4: 1}),
    ((-3, -4), "2121"): _poly({4: 1, 5: -7, 6: 8, 7: -2}),
    ((-3, -4), "1212"): _poly({4: 4, 5: -9, 6: 5}),
}


def _h3_reference() -> list[FamilyResult]:
    rs = RootSystem.preset("h3")

    def h_values() -> int:
        for mu, want in H3_H_VALUES.items():
            got = H_partitions(rs, mu)
            _expect(got == want, f"H{mu} = {got}, expected {want}")
            _expect(H_product(rs, mu) == got, f"H routes disagree at {mu}")
        return len(H3_H_VALUES)

    def orbit_rows() -> int:
        for (lam, w), want in H3_ORBIT_ROWS.items():
            got = H_wcircle(rs, lam, WeylWord.parse(w))
            _expect(got == want, f"H(-{w} o {lam}) = {got}, expected {want}")
        return len(H3_ORBIT_ROWS)

    def partition_counts() -> int:
        _expect(labelled_count(rs, (2, 2)) == 4, "|P(2,2)| != 4")
        _expect(labelled_count(rs, (3, 3)) == 12, "|P(3,3)| != 12")
        return 2

    def d_values() -> int:
        for lam, want in H3_D_VALUES.items():
            got = d_exact(rs, lam)
            _expect(got == want, f"d_exact{lam} = {got}, expected {want}")
            s = d_series(rs, lam, 10)
            _expect(s == want, f"d_series{lam} = {s}, expected {want}")
        return 2 * len(H3_D_VALUES)

    return [
        _run("reference-H-values", h_values),
        _run("reference-orbit-rows", orbit_rows),
        _run("reference-partition-counts", partition_counts),
        _run("reference-d-values", d_values),
    ]


def _h3_oracle(h: int = 8, D: int = 8) -> list[FamilyResult]:
    rs = RootSystem.preset("h3")
    A = rs.cartan

    def oracle() -> int:
        M = correction_M(rs, h, D)
        chi = poincare(A, D)
        expanded = char_expand(rs, M.scale(chi.inverse().to_laurent()))
        extracted = xi_extract(rs, M * denominator(rs, h))
        pts = support_points(A, h)
        for lam in pts:
            series = d_series(rs, lam, D)
            exact = d_exact(rs, lam)
            via_char = expanded.get(lam, IntSeries([], D))
            via_xi = extracted.get(lam, IntSeries([], D)) * chi.inverse()
            _expect(series == via_char, f"{lam}: series {series} vs char_expand {via_char}")
            _expect(series == exact, f"{lam}: series {series} vs d_exact {exact}")
            _expect(series == via_xi, f"{lam}: series {series} vs xi_extract {via_xi}")
        stray = [b for b in expanded if b not in pts]
        _expect(not stray, f"char_expand support outside the tested points: {stray}")
        return len(pts)

    return [_run("oracle-equivalence", oracle)]


def _rho_minus_wrho_table(A: CartanMatrix, L: int) -> dict[RootVector, int]:
    return {vneg(fp): w.length for w, fp in elements_up_to(A, L)}


def _identities(seed: int = 0) -> list[FamilyResult]:
    rs = RootSystem.preset("h3")
    A = rs.cartan
    rng = random.Random(seed)

    def denominators() -> int:
        verify_denominator_identity(rs, 10)
        verify_denominator_identity(RootSystem.preset("a2"), 10)
        return 2

    def at_one() -> int:
        table = _rho_minus_wrho_table(A, 10)
        count = 0
        for mu in vectors_up_to_height(2, 10, include_zero=False):
            val = H_partitions(rs, mu)(1)
            want = (-1) ** table[mu] if mu in table else 0
            _expect(val == want, f"H({mu};1) = {val}, expected {want}")
            count += 1
        return count

    def rho_orbit() -> int:
        count = 0
        for w, fp in elements_up_to(A, 6):
            mu = vneg(fp)
            _expect(
                H_wcircle(rs, (0, 0), w) == IntLaurent.monomial(w.length, (-1) ** w.length),
                f"H(rho - {w} rho) != (-q)^{w.length}",
            )
            _expect(partition_count(rs, mu) == 1, f"|P({mu})| != 1")
            count += 1
        return count

    def transport() -> int:
        lams = [(-2, -2), (-2, -3), (-3, -3), (-3, -4), (-1, -1)]
        words = [w for w, _ in elements_up_to(A, 4)]
        for _ in range(200):
            lam = rng.choice(lams)
            p = rng.choice(partitions(rs, vneg(lam)))
            i = rng.randrange(2)
            w = rng.choice([w for w in words if not w.letters or w.letters[-1] != i])
            ws = WeylWord(w.letters + (i,))
            q = phi(rs, i, p)
            _expect(
                q.target(2) == vneg(circle_act(A, WeylWord((i,)), lam)),
                f"phi_{i + 1}({p}) does not partition -s_i o lam",
            )
            _expect(phi(rs, i, q) == p, f"phi_{i + 1} is not an involution at {p}")
            _expect(m_pw(rs, q, w) == m_pw(rs, p, ws) + 1, f"transport fails at ({p}, {w}, {i + 1})")
        return 200

    def twisted_vs_direct() -> int:
        count = 0
        for lam in [(0, 0), (-1, -1), (-2, -2), (-2, -3), (-3, -3)]:
            for w, _ in elements_up_to(A, 3):
                mu = vneg(circle_act(A, w, lam))
                _expect(H_wcircle(rs, lam, w) == H_product(rs, mu), f"twisted H != direct H at {lam}, {w}")
                count += 1
        return count

    def at_minus_one() -> int:
        count = 0
        for lam in support_points(A, 6):
            dim = weight_mult_rho(rs, lam, 6)
            for w, _ in elements_up_to(A, 4):
                val = H_wcircle(rs, lam, w)(-1)
                _expect(val == dim, f"H(-{w} o {lam}; -1) = {val} != {dim}")
                count += 1
        return count

    def sum_to_zero() -> int:
        count = 0
        for lam in support_points(A, 8):
            if not any(lam):
                continue
            for w, _ in elements_up_to(A, 6):
                _expect(H_wcircle(rs, lam, w)(1) == 0, f"H(-{w} o {lam}; 1) != 0")
                count += 1
        return count

    def divisibility() -> int:
        count = 0
        for lam in support_points(A, 10):
            numer = _closed_numerator(rs, lam, N_of(rs, lam))
            _, rem = numer.divmod(ONE + Q)
            _expect(not rem, f"1+q does not divide the numerator at {lam}")
            count += 1
        return count

    def alternating_count() -> int:
        for n in (2, 3):
            B = RootSystem.from_matrix([[2 if i == j else -2 for j in range(n)] for i in range(n)]).cartan
            counts = counts_by_length(B, 6)
            for N in range(1, 7):
                alt = sum((-1) ** k * counts[k] for k in range(N))
                _expect(alt == (1 - n) ** (N - 1), f"alternating count fails for n={n}, N={N}")
        return 12

    def constant_term() -> int:
        M = correction_M(rs, 6, 8)
        _expect(M.series((0, 0)) == poincare(A, 8), "constant term of M(q) != chi(q)")
        bad = [b for b in M.terms if not A.in_neg_imaginary_cone(b)]
        _expect(not bad, f"M(q) support leaves Q_im^- at {bad[:1]}")
        return 1

    def frakm_support() -> int:
        m = frakm(rs, 6, 6)
        _expect(m.constant_term() == ONE, "frakm constant term != 1")
        return len(m)

    return [
        _run("denominator-identity", denominators),
        _run("H-at-q=1", at_one),
        _run("rho-minus-w-rho", rho_orbit),
        _run("phi-transport", transport),
        _run("twisted-vs-direct-H", twisted_vs_direct),
        _run("H-at-q=-1", at_minus_one),
        _run("sum-to-zero", sum_to_zero),
        _run("divisibility", divisibility),
        _run("alternating-count", alternating_count),
        _run("M-constant-term", constant_term),
        _run("frakm-support", frakm_support),
    ]


def _rank3() -> list[FamilyResult]:
    rs = RootSystem.preset("universal3")
    A = rs.cartan

    def chi() -> int:
        closed = poincare(A, 10, "closed_form")
        _expect(closed == poincare(A, 10), "closed-form chi disagrees with enumeration")
        rational = (ONE + Q).truncate(10)
        want = IntSeries.from_laurent(rational, 10) * IntSeries.from_laurent(ONE - Q * 2, 10).inverse()
        _expect(closed == want, "chi != (1+q)/(1-2q)")
        return 11

    def d_value() -> int:
        lam = (-1, -1, -1)
        exact = d_exact(rs, lam)
        _expect(exact.is_polynomial(), "d_exact is not a polynomial")
        _expect(d_series(rs, lam, 10) == exact, "d_exact disagrees with d_series")
        return 1

    return [_run("rank3-chi", chi), _run("rank3-d-exact-vs-series", d_value)]


PROFILES: dict[str, Callable[[], list[FamilyResult]]] = {
    "finite-A2": lambda: [_run("macdonald-A1", _macdonald("a1")), _run("macdonald-A2", _macdonald("a2"))],
    "h3-reference": _h3_reference,
    "h3-oracle": _h3_oracle,
    "identities": _identities,
    "rank3-universal": _rank3,
}


def verify_suite(profile: str) -> Report:
    """Run one bundle of cross-checks; failures become report entries."""
    if profile not in PROFILES:
        raise KeyError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    return Report(profile, PROFILES[profile]())
