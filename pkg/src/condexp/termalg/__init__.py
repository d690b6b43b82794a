"""Rational points of a presentation: terms, their numbering, and commutator bounds."""

from .bounds import AdjointStructure, adjoint_close, commutator_bound_j, leaf_cost
from .coding import decode, encode, pair, terms_over, unpair
from .sexpr import TermSyntaxError, format_term, parse_term
from .terms import (
    ZERO_TERM,
    Adj,
    Comb,
    Gen,
    IllFormedTerm,
    Prod,
    Term,
    average,
    generators_of,
    half_commutator,
    half_difference,
    is_rounded,
    scale,
    size,
    substitute,
)

__all__ = [
    "AdjointStructure",
    "adjoint_close",
    "commutator_bound_j",
    "leaf_cost",
    "decode",
    "encode",
    "pair",
    "unpair",
    "terms_over",
    "TermSyntaxError",
    "format_term",
    "parse_term",
    "ZERO_TERM",
    "Adj",
    "Comb",
    "Gen",
    "IllFormedTerm",
    "Prod",
    "Term",
    "average",
    "generators_of",
    "half_commutator",
    "half_difference",
    "is_rounded",
    "scale",
    "size",
    "substitute",
]
