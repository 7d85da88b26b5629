"""Generalized Cartan matrices, positive roots and their multiplicities.

Lattice vectors are plain tuples of ints giving coordinates over the simple
roots.  The pairing convention is ``<alpha_j, alpha_i^vee> = a_ij``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import MalformedGCM, NonIntegralMultiplicity, NotSymmetrizable

__all__ = [
    "RootVector",
    "CartanMatrix",
    "MultiplicityTable",
    "RootSystem",
    "validate_gcm",
    "height",
    "in_qplus",
    "in_qminus",
    "graded_key",
    "vectors_up_to_height",
    "box",
    "PRESETS",
]

RootVector = tuple  # tuple[int, ...]


def height(beta: Sequence[int]) -> int:
    return sum(beta)


def in_qplus(beta: Sequence[int]) -> bool:
    return all(c >= 0 for c in beta)


def in_qminus(beta: Sequence[int]) -> bool:
    return all(c <= 0 for c in beta)


def vadd(a: Sequence[int], b: Sequence[int]) -> RootVector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[int], b: Sequence[int]) -> RootVector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(k: int, a: Sequence[int]) -> RootVector:
    return tuple(k * x for x in a)


def vneg(a: Sequence[int]) -> RootVector:
    return tuple(-x for x in a)


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def unit(n: int, i: int) -> RootVector:
    return tuple(1 if j == i else 0 for j in range(n))


def graded_key(beta: Sequence[int]):
    """Graded lexicographic order on vectors of Q^+ (use on ``-beta`` for Q^-)."""
    return (sum(beta), tuple(beta))


def vectors_up_to_height(n: int, h_max: int, *, include_zero: bool = True) -> list[RootVector]:
    """All of Q^+ with height <= h_max, graded-lex sorted."""
    out = []
    for h in range(0 if include_zero else 1, h_max + 1):
        level = [tuple(c) for c in _compositions(h, n)]
        out.extend(sorted(level))
    return out


def _compositions(h: int, n: int) -> Iterator[list[int]]:
    if n == 1:
        yield [h]
        return
    for first in range(h + 1):
        for rest in _compositions(h - first, n - 1):
            yield [first, *rest]


def box(beta: Sequence[int]) -> list[RootVector]:
    """Every gamma with 0 <= gamma <= beta, graded-lex sorted."""
    pts = itertools.product(*(range(c + 1) for c in beta))
    return sorted(pts, key=graded_key)


def _det(rows: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


@dataclass(frozen=True)
class CartanMatrix:
    """A validated generalized Cartan matrix. Build with :func:`validate_gcm`."""

    entries: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...] | None
    is_universal_coxeter: bool
    kind: str  # "finite" | "affine" | "indefinite"

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def is_symmetrizable(self) -> bool:
        return self.symmetrizer is not None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def content_hash(self) -> str:
        blob = json.dumps([list(r) for r in self.entries]).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    # -- lattice actions ----------------------------------------------------

    def pairing(self, lam: Sequence[int], i: int) -> int:
        """<lam, alpha_i^vee> for lam in the root lattice."""
        row = self.entries[i]
        return sum(c * a for c, a in zip(lam, row))

    def pairings(self, lam: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.pairing(lam, i) for i in range(self.rank))

    def is_dominant(self, lam: Sequence[int]) -> bool:
        return all(self.pairing(lam, i) >= 0 for i in range(self.rank))

    def reflect(self, lam: Sequence[int], i: int) -> RootVector:
        """s_i(lam) = lam - <lam, alpha_i^vee> alpha_i."""
        p = self.pairing(lam, i)
        out = list(lam)
        out[i] -= p
        return tuple(out)

    def form(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Invariant form (alpha_i, alpha_j) = d_i a_ij."""
        if self.symmetrizer is None:
            raise NotSymmetrizable("no symmetrizer for this GCM")
        d = self.symmetrizer
        n = self.rank
        return sum(
            a[i] * b[j] * d[i] * self.entries[i][j]
            for i in range(n)
            if a[i]
            for j in range(n)
            if b[j]
        )

    def in_neg_imaginary_cone(self, lam: Sequence[int]) -> bool:
        """Whether lam lies in Q_im^- (0 counts as a member)."""
        beta = list(vneg(lam))
        if not in_qplus(beta):
            return False
        if not any(beta):
            return True
        n = self.rank
        while True:
            for i in range(n):
                p = self.pairing(beta, i)
                if p > 0:
                    beta[i] -= p
                    if beta[i] < 0:
                        return False
                    break
            else:
                return True

    def real_roots(self, h_max: int) -> dict[RootVector, int]:
        """Positive real roots of height <= h_max mapped to their depth."""
        n = self.rank
        depth: dict[RootVector, int] = {}
        frontier = deque()
        for i in range(n):
            e = unit(n, i)
            depth[e] = 0
            frontier.append(e)
        while frontier:
            beta = frontier.popleft()
            for i in range(n):
                gamma = self.reflect(beta, i)
                if gamma in depth or not in_qplus(gamma) or height(gamma) > h_max:
                    continue
                depth[gamma] = depth[beta] + 1
                frontier.append(gamma)
        return dict(sorted(depth.items(), key=lambda kv: graded_key(kv[0])))

    def real_depth(self, beta: Sequence[int]) -> int | None:
        """Depth of a positive real root found by height descent; None if not real."""
        b = list(beta)
        if not in_qplus(b) or not any(b):
            return None
        steps = 0
        n = self.rank
        while sum(b) > 1:
            for i in range(n):
                p = self.pairing(b, i)
                if p > 0:
                    b[i] -= p
                    break
            else:
                return None
            if b[i] < 0:
                return None
            steps += 1
        return steps

    def is_real_root(self, beta: Sequence[int]) -> bool:
        return self.real_depth(beta) is not None


def _components(entries: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(entries)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and entries[i][j] != 0:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _find_symmetrizer(entries, comps) -> tuple[int, ...] | None:
    n = len(entries)
    d: list[Fraction | None] = [None] * n
    for comp in comps:
        root = comp[0]
        d[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in comp:
                if j == i or entries[i][j] == 0:
                    continue
                dj = d[i] * entries[i][j] / entries[j][i]
                if d[j] is None:
                    d[j] = dj
                    stack.append(j)
        for i in comp:
            for j in comp:
                if d[i] * entries[i][j] != d[j] * entries[j][i]:
                    return None
        den = 1
        for i in comp:
            den = den * d[i].denominator // gcd(den, d[i].denominator)
        ints = [int(d[i] * den) for i in comp]
        g = 0
        for v in ints:
            g = gcd(g, v)
        for i, v in zip(comp, ints):
            d[i] = Fraction(v // g)
    return tuple(int(x) for x in d)


def _classify_component(entries, comp) -> str:
    sub = [[Fraction(entries[i][j]) for j in comp] for i in comp]
    k = len(comp)
    for size in range(1, k):
        for idx in itertools.combinations(range(k), size):
            if _det([[sub[a][b] for b in idx] for a in idx]) <= 0:
                return "indefinite"
    full = _det(sub)
    if full > 0:
        return "finite"
    if full == 0:
        return "affine"
    return "indefinite"


def validate_gcm(entries: Iterable[Iterable[int]]) -> CartanMatrix:
    """Validate a generalized Cartan matrix and populate its flags."""
    try:
        rows = tuple(tuple(int(x) for x in row) for row in entries)
    except (TypeError, ValueError) as exc:
        raise MalformedGCM(f"not an integer matrix: {exc}") from None
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise MalformedGCM("matrix must be square and nonempty")
    for i in range(n):
        if rows[i][i] != 2:
            raise MalformedGCM(f"diagonal entry a_{i + 1}{i + 1} = {rows[i][i]} != 2")
        for j in range(n):
            if i == j:
                continue
            if rows[i][j] > 0:
                raise MalformedGCM(f"positive off-diagonal entry a_{i + 1}{j + 1}")
            if (rows[i][j] == 0) != (rows[j][i] == 0):
                raise MalformedGCM(f"zero pattern asymmetric at ({i + 1},{j + 1})")
    comps = _components(rows)
    sym = _find_symmetrizer(rows, comps)
    universal = all(
        rows[i][j] * rows[j][i] >= 4 for i in range(n) for j in range(n) if i != j
    )
    kinds = {_classify_component(rows, c) for c in comps}
    if kinds == {"finite"}:
        kind = "finite"
    elif "indefinite" in kinds:
        kind = "indefinite"
    else:
        kind = "affine"
    return CartanMatrix(rows, sym, universal, kind)


PRESETS: dict[str, list[list[int]]] = {
    "h3": [[2, -3], [-3, 2]],
    "a1": [[2]],
    "a2": [[2, -1], [-1, 2]],
    "a1_affine": [[2, -2], [-2, 2]],
    "universal3": [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]],
}


@dataclass
class MultiplicityTable:
    """Root multiplicities for every beta in Q^+ with ht(beta) <= h_max."""

    mult: dict[RootVector, int]
    h_max: int
    provenance: str  # "computed" | "user-supplied"

    def __getitem__(self, beta: RootVector) -> int:
        return self.mult.get(tuple(beta), 0)

    def roots(self) -> list[tuple[RootVector, int]]:
        return sorted(((b, m) for b, m in self.mult.items() if m), key=lambda t: graded_key(t[0]))


class RootSystem:
    """Cartan matrix plus lazily grown multiplicity data.

    Multiplicities come from the Peterson recursion when the matrix is
    symmetrizable, otherwise from a user-supplied table (real roots are
    always 1 and unlisted vectors are 0).
    """

    def __init__(
        self,
        cartan: CartanMatrix,
        user_table: Mapping[Sequence[int], int] | None = None,
        cache=None,
    ):
        self.cartan = cartan
        self.rank = cartan.rank
        self._user = {tuple(k): int(v) for k, v in user_table.items()} if user_table else None
        if self._user is None and not cartan.is_symmetrizable:
            raise NotSymmetrizable(
                "Peterson recursion needs a symmetrizer; supply a multiplicity table"
            )
        self._cache = cache
        self._lock = threading.RLock()
        self._c: dict[RootVector, Fraction] = {}
        self._m: dict[RootVector, int] = {}
        self._support: list[RootVector] = []  # vectors with nonzero c, in insertion order
        self._full_height = 0
        self._depth: dict[RootVector, int | None] = {}
        self._memos: dict[str, dict] = {}

    @classmethod
    def from_matrix(cls, entries, user_table=None, cache=None) -> RootSystem:
        return cls(validate_gcm(entries), user_table, cache)

    @classmethod
    def preset(cls, name: str, cache=None) -> RootSystem:
        return cls.from_matrix(PRESETS[name.lower()], cache=cache)

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_lock")
        state["_cache"] = None
        state["_memos"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.RLock()

    def memo(self, name: str) -> dict:
        """Named per-system result cache shared by the downstream modules."""
        with self._lock:
            return self._memos.setdefault(name, {})

    @property
    def lock(self) -> threading.RLock:
        return self._lock

    # -- multiplicities -----------------------------------------------------

    @property
    def provenance(self) -> str:
        return "user-supplied" if self._user is not None else "computed"

    def multiplicity(self, beta: Sequence[int]) -> int:
        beta = tuple(beta)
        if not in_qplus(beta) or not any(beta):
            return 0
        if self._user is not None:
            if beta in self._user:
                return self._user[beta]
            return 1 if self.cartan.is_real_root(beta) else 0
        m = self._m.get(beta)
        if m is None:
            self._ensure(box(beta))
            m = self._m[beta]
        return m

    def multiplicity_table(self, h_max: int) -> MultiplicityTable:
        pts = vectors_up_to_height(self.rank, h_max, include_zero=False)
        if self._user is not None:
            mult = {b: self.multiplicity(b) for b in pts}
            return MultiplicityTable({b: m for b, m in mult.items() if m}, h_max, self.provenance)
        with self._lock:
            if h_max > self._full_height:
                loaded = self._cache.load(self.cartan, h_max) if self._cache else None
                if loaded is not None:
                    self._absorb(*loaded)
                self._ensure(pts)
                if self._cache and loaded is None:
                    self._cache.store(
                        self.cartan, h_max, {b: self._m[b] for b in pts if self._m[b]}
                    )
                self._full_height = h_max
        return MultiplicityTable(
            {b: self._m[b] for b in pts if self._m[b]}, h_max, self.provenance
        )

    def _absorb(self, mult: Mapping[RootVector, int], h_max: int) -> None:
        """Seed the recursion state from a complete table up to h_max."""
        for b in vectors_up_to_height(self.rank, h_max, include_zero=False):
            if b in self._m:
                continue
            m = int(mult.get(b, 0))
            c = Fraction(m)
            g = 0
            for x in b:
                g = gcd(g, x)
            for k in range(2, g + 1):
                if g % k == 0:
                    c += Fraction(self._m[tuple(x // k for x in b)], k)
            self._m[b] = m
            self._c[b] = c
            if c:
                self._support.append(b)

    def _ensure(self, pts: Iterable[RootVector]) -> None:
        with self._lock:
            A = self.cartan
            d = A.symmetrizer
            n = self.rank
            for beta in pts:
                if beta in self._m or not any(beta):
                    continue
                if sum(beta) == 1:
                    self._c[beta] = Fraction(1)
                    self._m[beta] = 1
                    self._support.append(beta)
                    continue
                lhs = A.form(beta, beta) - 2 * sum(beta[i] * d[i] for i in range(n))
                rhs = Fraction(0)
                for b1 in self._support:
                    if not leq(b1, beta):
                        continue
                    b2 = vsub(beta, b1)
                    c2 = self._c.get(b2)
                    if not c2:
                        continue
                    rhs += A.form(b1, b2) * self._c[b1] * c2
                g = 0
                for x in beta:
                    g = gcd(g, x)
                lower = Fraction(0)
                for k in range(2, g + 1):
                    if g % k == 0:
                        lower += Fraction(self._m[tuple(x // k for x in beta)], k)
                if lhs == 0:
                    # beta = rho - w rho: the recursion is silent here
                    if rhs != 0:
                        raise NonIntegralMultiplicity(f"degenerate Peterson step at {beta}")
                    m = Fraction(self._mult_from_denominator(beta))
                    c = m + lower
                else:
                    c = rhs / lhs
                    m = c - lower
                if m.denominator != 1 or m < 0:
                    raise NonIntegralMultiplicity(f"m{beta} = {m}")
                self._c[beta] = c
                self._m[beta] = int(m)
                if c:
                    self._support.append(beta)

    def _mult_from_denominator(self, beta: RootVector) -> int:
        """m(beta) read off the denominator identity at e^{-beta}.

        Every root strictly below beta must already be known.
        """
        A = self.cartan
        n = self.rank
        # alternating side: (-1)^l(w) if beta = rho - w rho, else 0
        x = list(vneg(beta))
        steps = 0
        while True:
            j = next((j for j in range(n) if A.pairing(x, j) <= -2), None)
            if j is None:
                break
            x[j] -= A.pairing(x, j) + 1
            steps += 1
            if x[j] > 0:
                break
        alt = (-1) ** steps if not any(x) else 0
        # product side without the beta factor
        coeffs: dict[RootVector, int] = {tuple([0] * n): 1}
        for alpha in box(beta):
            if not any(alpha) or alpha == beta:
                continue
            m = self._m.get(alpha, 0)
            if not m:
                continue
            new = dict(coeffs)
            for gamma, v in coeffs.items():
                k, binom, cur = 1, 1, gamma
                while True:
                    cur = vadd(cur, alpha)
                    if not leq(cur, beta) or k > m:
                        break
                    binom = binom * (m - k + 1) // k
                    new[cur] = new.get(cur, 0) + (-1) ** k * binom * v
                    k += 1
            coeffs = new
        return coeffs.get(beta, 0) - alt

    # -- root lists ---------------------------------------------------------

    def positive_roots(self, h_max: int) -> list[tuple[RootVector, int]]:
        """(root, multiplicity) for all positive roots of height <= h_max."""
        return self.multiplicity_table(h_max).roots()

    def roots_below(self, mu: Sequence[int]) -> list[tuple[RootVector, int]]:
        """(root, multiplicity) for positive roots beta <= mu, graded-lex order."""
        out = []
        for b in box(tuple(mu)):
            if any(b):
                m = self.multiplicity(b)
                if m:
                    out.append((b, m))
        return out

    def depth(self, beta: Sequence[int]) -> int | None:
        """Depth of a real root (None for imaginary roots and non-roots)."""
        beta = tuple(beta)
        if beta not in self._depth:
            self._depth[beta] = self.cartan.real_depth(beta)
        return self._depth[beta]

    def is_real(self, beta: Sequence[int]) -> bool:
        return self.depth(beta) is not None

    def __repr__(self) -> str:
        return f"RootSystem({[list(r) for r in self.cartan.entries]})"
