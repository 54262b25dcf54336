"""Wigner / Cohen-class transforms of differential operators with polynomial coefficients."""

from .algebra import (
    D1, D2, ID, M1, M2, KernelError, KernelSpec, WeylOp, a_of_q, bar_transform,
    normal_mul, substitute_ordered, symbol_of, tilde_transform, wig_pushforward,
)
from .dsl import format_op, format_poly, lower, op, parse_op, parse_poly2
from .poly import Poly, Poly2

__version__ = "0.1.0"
