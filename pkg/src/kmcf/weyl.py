"""Weyl group words, the linear and circle actions, and enumeration by length.

Group elements are identified through the fingerprint ``w rho - rho`` (which
is ``w o 0`` for the circle action); ``rho`` is regular, so the fingerprint
is faithful and no rewriting system is needed.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import ClosedFormUnavailable, LeftNegativeCone, NotReduced
from .rootsys import CartanMatrix, RootVector, in_qminus, in_qplus, unit, vneg
from .series import IntSeries

__all__ = [
    "WeylWord",
    "act",
    "circle_act",
    "inversion_set",
    "rho_minus_wrho",
    "enumerate_weyl",
    "elements_up_to",
    "counts_by_length",
    "poincare",
    "dominant_circle_rep",
    "in_qprime",
    "is_reduced",
    "left_length_increases",
]


@dataclass(frozen=True, order=True)
class WeylWord:
    """Word ``s_{i1} s_{i2} ... s_{ik}`` stored as 0-based generator indices."""

    letters: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> WeylWord:
        """Parse the 1-based digit form (``"121"`` is s1 s2 s1; ``""``/``"e"`` is 1)."""
        text = text.strip()
        if text in ("", "e", "id"):
            return cls(())
        if "." in text:
            return cls(tuple(int(t) - 1 for t in text.split(".")))
        return cls(tuple(int(ch) - 1 for ch in text))

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def length(self) -> int:
        return len(self.letters)

    def inverse(self) -> WeylWord:
        return WeylWord(self.letters[::-1])

    def __mul__(self, other: WeylWord) -> WeylWord:
        return WeylWord(self.letters + other.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        if max(self.letters) >= 9:
            return ".".join(str(i + 1) for i in self.letters)
        return "".join(str(i + 1) for i in self.letters)


IDENTITY = WeylWord()


def act(A: CartanMatrix, w: WeylWord, lam: Sequence[int]) -> RootVector:
    """w(lam), letters applied right to left."""
    x = list(lam)
    for i in reversed(w.letters):
        x[i] -= A.pairing(x, i)
    return tuple(x)


def circle_act(A: CartanMatrix, w: WeylWord, lam: Sequence[int]) -> RootVector:
    """w o lam = w(lam + rho) - rho, via s_i o lam = lam - (<lam, a_i^v> + 1) a_i."""
    x = list(lam)
    for i in reversed(w.letters):
        x[i] -= A.pairing(x, i) + 1
    return tuple(x)


def rho_minus_wrho(A: CartanMatrix, w: WeylWord) -> RootVector:
    return vneg(circle_act(A, w, (0,) * A.rank))


def inversion_set(A: CartanMatrix, w: WeylWord) -> list[RootVector]:
    """Phi(w^-1) = [a_i1, s_i1 a_i2, ..., s_i1...s_i(k-1) a_ik] for a reduced word."""
    n = A.rank
    out: list[RootVector] = []
    seen = set()
    letters = w.letters
    for k, i in enumerate(letters):
        beta = act(A, WeylWord(letters[:k]), unit(n, i))
        if not in_qplus(beta) or beta in seen:
            raise NotReduced(f"word {w} is not reduced")
        seen.add(beta)
        out.append(beta)
    return out


def is_reduced(A: CartanMatrix, w: WeylWord) -> bool:
    try:
        inversion_set(A, w)
    except NotReduced:
        return False
    return True


def left_length_increases(A: CartanMatrix, fingerprint: Sequence[int], i: int) -> bool:
    """l(s_i w) = l(w) + 1, given fingerprint = w o 0."""
    return A.pairing(fingerprint, i) >= 0


class _Levels:
    """Lazily grown BFS levels of W: lists of (word, fingerprint)."""

    def __init__(self, A: CartanMatrix):
        self.A = A
        zero = (0,) * A.rank
        self.levels: list[list[tuple[WeylWord, RootVector]]] = [[(IDENTITY, zero)]]
        self.lock = threading.Lock()

    def upto(self, max_len: int) -> list[list[tuple[WeylWord, RootVector]]]:
        with self.lock:
            A = self.A
            while len(self.levels) <= max_len and self.levels[-1]:
                nxt: dict[RootVector, WeylWord] = {}
                for word, fp in self.levels[-1]:
                    for i in range(A.rank):
                        if not left_length_increases(A, fp, i):
                            continue
                        x = list(fp)
                        x[i] -= A.pairing(fp, i) + 1
                        key = tuple(x)
                        cand = WeylWord((i,) + word.letters)
                        old = nxt.get(key)
                        if old is None or cand.letters < old.letters:
                            nxt[key] = cand
                level = sorted(((w, fp) for fp, w in nxt.items()), key=lambda t: t[0].letters)
                self.levels.append(level)
            return self.levels[: max_len + 1]


_LEVELS: dict[CartanMatrix, _Levels] = {}
_LEVELS_LOCK = threading.Lock()


def _levels(A: CartanMatrix) -> _Levels:
    with _LEVELS_LOCK:
        lv = _LEVELS.get(A)
        if lv is None:
            lv = _LEVELS[A] = _Levels(A)
        return lv


def enumerate_weyl(A: CartanMatrix, max_len: int) -> Iterator[tuple[WeylWord, int]]:
    """Yield (canonical reduced word, length) for each w with l(w) <= max_len."""
    lv = _levels(A)
    length = 0
    while length <= max_len:
        levels = lv.upto(length)
        if length >= len(levels):
            return
        for word, _ in levels[length]:
            yield word, length
        length += 1


def elements_up_to(A: CartanMatrix, max_len: int) -> list[tuple[WeylWord, RootVector]]:
    """(word, w o 0) for every w with l(w) <= max_len, in BFS order."""
    return [item for level in _levels(A).upto(max_len) for item in level]


def counts_by_length(A: CartanMatrix, max_len: int) -> list[int]:
    levels = _levels(A).upto(max_len)
    counts = [len(level) for level in levels]
    return counts + [0] * (max_len + 1 - len(counts))


def poincare(A: CartanMatrix, D: int, mode: str = "enumerated") -> IntSeries:
    """Poincare series sum_w q^l(w) modulo q^(D+1)."""
    if mode == "enumerated":
        return IntSeries(counts_by_length(A, D), D)
    if mode != "closed_form":
        raise ValueError(f"unknown mode {mode!r}")
    if A.is_universal_coxeter:
        n = A.rank
        coeffs = [1] + [n * (n - 1) ** (k - 1) for k in range(1, D + 1)]
        return IntSeries(coeffs, D)
    if A.is_finite:
        # finite W: the length generating polynomial, exhausted by BFS
        return IntSeries(counts_by_length(A, D), D)
    raise ClosedFormUnavailable("closed form needs a universal Coxeter or finite Weyl group")


def dominant_circle_rep(A: CartanMatrix, lam: Sequence[int]) -> tuple[RootVector, WeylWord]:
    """(mu, v) with v o lam = mu, mu in Q^-, mu + rho dominant."""
    x = list(lam)
    if not in_qminus(x):
        raise LeftNegativeCone(f"{tuple(lam)} is not in Q^-")
    letters: list[int] = []
    n = A.rank
    while True:
        j = next((j for j in range(n) if A.pairing(x, j) <= -2), None)
        if j is None:
            break
        x[j] -= A.pairing(x, j) + 1
        letters.insert(0, j)
        if x[j] > 0:
            raise LeftNegativeCone(f"{tuple(lam)} is not in Q'")
    return tuple(x), WeylWord(tuple(letters))


def in_qprime(A: CartanMatrix, lam: Sequence[int]) -> bool:
    try:
        dominant_circle_rep(A, lam)
    except LeftNegativeCone:
        return False
    return True
