"""Exact algebra for pointed Abelian lattice-ordered groups over lexicographic chains."""
from .chain import (
    ChainError,
    Generator,
    Kind,
    LexChain,
    Sqrt2,
    classify,
    is_p_simple,
    p_radical,
    parse_chain,
    rank,
    shift_normalize,
    strongly_pointed_part,
)
from .equations import CheckResult, Family, check_bruteforce, check_oracle, parse_family, witness_bound
from .terms import Equation, parse_equations, parse_term, print_term

__version__ = "0.1.0"

__all__ = [
    "ChainError",
    "CheckResult",
    "Equation",
    "Family",
    "Generator",
    "Kind",
    "LexChain",
    "Sqrt2",
    "check_bruteforce",
    "check_oracle",
    "classify",
    "is_p_simple",
    "p_radical",
    "parse_chain",
    "parse_equations",
    "parse_family",
    "parse_term",
    "print_term",
    "rank",
    "shift_normalize",
    "strongly_pointed_part",
    "witness_bound",
]
