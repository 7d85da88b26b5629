"""Exact computations for Kac-Moody root systems and the correction factor M(q)/chi(q)."""

from .charring import FormalSum, char_expand, character, correction_M, delta, delta_twisted, xi
from .correction import d_exact, d_series, verify_suite
from .hfun import H_partitions, H_product, H_wcircle, partitions
from .rootsys import CartanMatrix, RootSystem, validate_gcm
from .series import IntLaurent, IntSeries
from .weyl import WeylWord, poincare

__all__ = [
    "CartanMatrix",
    "FormalSum",
    "H_partitions",
    "H_product",
    "H_wcircle",
    "IntLaurent",
    "IntSeries",
    "RootSystem",
    "WeylWord",
    "char_expand",
    "character",
    "correction_M",
    "d_exact",
    "d_series",
    "delta",
    "delta_twisted",
    "partitions",
    "poincare",
    "validate_gcm",
    "verify_suite",
    "xi",
]

__version__ = "0.1.0"
