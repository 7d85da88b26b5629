"""Exact integer Laurent polynomials and truncated power series in ``q``.

Coefficients are Python ints, so nothing overflows. ``IntLaurent`` is the
workhorse; ``IntSeries`` is a thin truncated view used for elements of
``Z[[q]]`` such as Poincare series and the ``d_lambda`` expansions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import NonPolynomial, NonUnitConstantTerm

__all__ = ["IntLaurent", "IntSeries", "Q", "ONE", "ZERO"]


class IntLaurent:
    """Finitely supported Laurent polynomial with integer coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        if coeffs:
            self._c = {int(e): int(v) for e, v in coeffs.items() if v}
        else:
            self._c = {}

    @classmethod
    def _raw(cls, d: dict[int, int]) -> IntLaurent:
        obj = cls.__new__(cls)
        obj._c = d
        return obj

    @classmethod
    def const(cls, c: int) -> IntLaurent:
        return cls._raw({0: c} if c else {})

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> IntLaurent:
        return cls._raw({e: c} if c else {})

    @classmethod
    def from_list(cls, coeffs: Sequence[int], low: int = 0) -> IntLaurent:
        """Little-endian coefficient list starting at ``q**low``."""
        return cls._raw({low + k: int(v) for k, v in enumerate(coeffs) if v})

    # -- inspection ---------------------------------------------------------

    def __getitem__(self, e: int) -> int:
        return self._c.get(e, 0)

    def items(self):
        return sorted(self._c.items())

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def low(self) -> int:
        """Lowest exponent present (0 for the zero polynomial)."""
        return min(self._c) if self._c else 0

    @property
    def high(self) -> int:
        return max(self._c) if self._c else 0

    @property
    def degree(self) -> int:
        """Degree; -1 for zero."""
        return max(self._c) if self._c else -1

    def is_polynomial(self) -> bool:
        return not self._c or min(self._c) >= 0

    def to_list(self, length: int | None = None) -> list[int]:
        """Little-endian coefficients from ``q**0``; requires a polynomial."""
        self.require_polynomial()
        n = self.degree + 1 if length is None else length
        return [self._c.get(k, 0) for k in range(n)]

    def require_polynomial(self) -> IntLaurent:
        if not self.is_polynomial():
            raise NonPolynomial(f"negative q-power in {self}")
        return self

    def __call__(self, x):
        """Evaluate at ``x`` (int or Fraction); negative powers need x != 0."""
        total = 0
        for e, v in self._c.items():
            total += v * (x**e if e >= 0 else Fraction(1, x ** (-e)))
        return total

    def coeff_sum(self) -> int:
        return sum(self._c.values())

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> IntLaurent:
        other = _lift(other)
        if other is NotImplemented:
            return other
        d = dict(self._c)
        for e, v in other._c.items():
            s = d.get(e, 0) + v
            if s:
                d[e] = s
            else:
                d.pop(e, None)
        return IntLaurent._raw(d)

    __radd__ = __add__

    def __neg__(self) -> IntLaurent:
        return IntLaurent._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other) -> IntLaurent:
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> IntLaurent:
        return (-self) + other

    def __mul__(self, other) -> IntLaurent:
        if isinstance(other, int):
            if not other:
                return IntLaurent()
            return IntLaurent._raw({e: v * other for e, v in self._c.items()})
        other = _lift(other)
        if other is NotImplemented:
            return other
        d: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                d[e] = d.get(e, 0) + v1 * v2
        return IntLaurent._raw({e: v for e, v in d.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntLaurent:
        if k < 0:
            raise ValueError("negative power")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> IntLaurent:
        """Multiply by ``q**k``."""
        return IntLaurent._raw({e + k: v for e, v in self._c.items()})

    def truncate(self, deg: int | None) -> IntLaurent:
        """Drop every term of exponent greater than ``deg``."""
        if deg is None or not self._c or max(self._c) <= deg:
            return self
        return IntLaurent._raw({e: v for e, v in self._c.items() if e <= deg})

    def divmod(self, divisor: IntLaurent) -> tuple[IntLaurent, IntLaurent]:
        """Polynomial long division in Z[q]; the divisor must be monic up to sign."""
        self.require_polynomial()
        divisor.require_polynomial()
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        lead = divisor[divisor.degree]
        if lead not in (1, -1):
            raise ValueError("divisor must have leading coefficient +-1")
        rem = dict(self._c)
        quo: dict[int, int] = {}
        dd = divisor.degree
        while rem and max(rem) >= dd:
            top = max(rem)
            c = rem[top] * lead
            quo[top - dd] = c
            for e, v in divisor._c.items():
                k = e + top - dd
                s = rem.get(k, 0) - c * v
                if s:
                    rem[k] = s
                else:
                    rem.pop(k, None)
        return IntLaurent._raw(quo), IntLaurent._raw(rem)

    # -- comparison, hashing, display ---------------------------------------

    def __eq__(self, other) -> bool:
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._c.items())))

    def __repr__(self) -> str:
        return f"IntLaurent({self})"

    def __str__(self) -> str:
        """Canonical space-free form, ascending powers: ``-2*q+3*q^2-q^3``."""
        if not self._c:
            return "0"
        out = []
        for e, v in sorted(self._c.items()):
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if e == 0:
                body = str(a)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            out.append(sign + body)
        s = "".join(out)
        return s[1:] if s.startswith("+") else s


def _lift(x) -> IntLaurent:
    if isinstance(x, IntLaurent):
        return x
    if isinstance(x, int):
        return IntLaurent.const(x)
    if isinstance(x, IntSeries):
        return x.to_laurent()
    return NotImplemented


ZERO = IntLaurent()
ONE = IntLaurent.const(1)
Q = IntLaurent.monomial(1)


class IntSeries:
    """Element of ``Z[[q]]`` known modulo ``q**(prec + 1)``."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Iterable[int], prec: int):
        if prec < 0:
            raise ValueError("precision must be nonnegative")
        c = [int(v) for v in coeffs][: prec + 1]
        c += [0] * (prec + 1 - len(c))
        self.coeffs: tuple[int, ...] = tuple(c)
        self.prec = prec

    @classmethod
    def from_laurent(cls, p: IntLaurent, prec: int) -> IntSeries:
        p.truncate(prec).require_polynomial()
        return cls([p[k] for k in range(prec + 1)], prec)

    def to_laurent(self) -> IntLaurent:
        return IntLaurent.from_list(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k <= self.prec else 0

    def __add__(self, other: IntSeries) -> IntSeries:
        p = min(self.prec, other.prec)
        return IntSeries((self[k] + other[k] for k in range(p + 1)), p)

    def __sub__(self, other: IntSeries) -> IntSeries:
        p = min(self.prec, other.prec)
        return IntSeries((self[k] - other[k] for k in range(p + 1)), p)

    def __neg__(self) -> IntSeries:
        return IntSeries((-v for v in self.coeffs), self.prec)

    def __mul__(self, other) -> IntSeries:
        if isinstance(other, int):
            return IntSeries((v * other for v in self.coeffs), self.prec)
        if isinstance(other, IntLaurent):
            other = IntSeries.from_laurent(other, self.prec)
        p = min(self.prec, other.prec)
        out = [0] * (p + 1)
        for i, a in enumerate(self.coeffs[: p + 1]):
            if a:
                for j in range(p + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return IntSeries(out, p)

    __rmul__ = __mul__

    def inverse(self) -> IntSeries:
        """Multiplicative inverse; the constant term must be +-1."""
        c0 = self.coeffs[0]
        if c0 not in (1, -1):
            raise NonUnitConstantTerm(f"constant term {c0} is not a unit in Z[[q]]")
        out = [0] * (self.prec + 1)
        out[0] = c0
        for m in range(1, self.prec + 1):
            s = 0
            for k in range(1, m + 1):
                s += self.coeffs[k] * out[m - k]
            out[m] = -s * c0
        return IntSeries(out, self.prec)

    def truncate(self, prec: int) -> IntSeries:
        return IntSeries(self.coeffs, min(prec, self.prec))

    def __eq__(self, other) -> bool:
        if isinstance(other, IntSeries):
            p = min(self.prec, other.prec)
            return self.coeffs[: p + 1] == other.coeffs[: p + 1]
        if isinstance(other, (IntLaurent, int)):
            # agreement modulo q^(prec+1)
            other = _lift(other)
            if not other.truncate(self.prec).is_polynomial():
                return False
            return all(self[k] == other[k] for k in range(self.prec + 1))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coeffs, self.prec))

    def __repr__(self) -> str:
        return f"IntSeries({list(self.coeffs)}, prec={self.prec})"

    def __str__(self) -> str:
        body = str(self.to_laurent())
        return f"{body}+O(q^{self.prec + 1})"
