"""Exception hierarchy shared by the kmcf modules."""

from __future__ import annotations


class KMCFError(Exception):
    """Base class for every error raised by this package."""


class MalformedGCM(KMCFError, ValueError):
    pass


class NotSymmetrizable(KMCFError):
    pass


class NonIntegralMultiplicity(KMCFError):
    """Peterson recursion produced a non-integer or negative multiplicity."""


class NotReduced(KMCFError, ValueError):
    pass


class ClosedFormUnavailable(KMCFError):
    pass


class LeftNegativeCone(KMCFError, ValueError):
    """Circle iteration left Q^-; the input is not in Q'."""


class NonUnitConstantTerm(KMCFError, ArithmeticError):
    pass


class IdentityViolation(KMCFError):
    pass


class NotQMinusDominant(KMCFError, ValueError):
    pass


class NotDominant(KMCFError, ValueError):
    pass


class NonTriangularResidue(KMCFError):
    def __init__(self, msg: str, point=None, suggested_cutoff: int | None = None):
        super().__init__(msg)
        self.point = point
        self.suggested_cutoff = suggested_cutoff


class SupportViolation(KMCFError):
    pass


class NotInSupport(KMCFError, ValueError):
    pass


class NotUniversalCoxeter(KMCFError):
    pass


class ConstancyViolation(KMCFError):
    pass


class DivisibilityFailure(KMCFError, ArithmeticError):
    pass


class NonPolynomial(KMCFError, ArithmeticError):
    """A quantity expected to lie in Z[q] (or Z[[q]]) has negative q-powers."""


class ParseError(KMCFError, ValueError):
    """Malformed command-line vector or GCM file."""
