"""Terms of pointed lattice-ordered groups: syntax trees, parser, printer, evaluators.

Concrete syntax::

    t ::= t v t | t /\\ t | t + t | t - t | -t | k*t | (k)*t | x | 0 | f | (t)

``v`` is join and ``/\\`` is meet.  They have no relative precedence, so a
chain mixing both must be parenthesised.  Sums bind tighter than lattice
operations and scaling binds tighter than sums.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple, Union

from .chain import Element, LexChain

__all__ = [
    "Term",
    "Var",
    "Zero",
    "F",
    "Add",
    "Neg",
    "Scale",
    "Join",
    "Meet",
    "Equation",
    "TermSyntaxError",
    "EvaluationError",
    "parse_term",
    "parse_equations",
    "print_term",
    "eval_term",
    "expand_scales",
    "free_vars",
    "join_all",
    "sub",
    "MVTerm",
    "MVar",
    "MZero",
    "MOne",
    "Oplus",
    "Otimes",
    "MNeg",
    "MJoin",
    "MMeet",
    "eval_mvterm",
    "derive_mvterm",
]


class TermSyntaxError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(ValueError):
    """Unbound variable, foreign element, or out-of-carrier binding."""


# -- group terms -------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class F:
    pass


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Neg:
    arg: "Term"


@dataclass(frozen=True)
class Scale:
    k: int
    arg: "Term"


@dataclass(frozen=True)
class Join:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"


Term = Union[Var, Zero, F, Add, Neg, Scale, Join, Meet]


def sub(a: Term, b: Term) -> Term:
    return Add(a, Neg(b))


def join_all(*ts: Term) -> Term:
    out = ts[0]
    for t in ts[1:]:
        out = Join(out, t)
    return out


def free_vars(t: Term) -> Tuple[str, ...]:
    """Variable names in order of first occurrence."""
    seen: Dict[str, None] = {}

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            seen.setdefault(u.name, None)
        elif isinstance(u, (Add, Join, Meet)):
            walk(u.left)
            walk(u.right)
        elif isinstance(u, (Neg, Scale)):
            walk(u.arg)

    walk(t)
    return tuple(seen)


@dataclass(frozen=True)
class Equation:
    """The equation ``lhs >= 0``."""

    lhs: Term

    def __str__(self) -> str:
        return f"{print_term(self.lhs)} >= 0"


# -- lexer / parser ----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<meet>/\\)|(?P<op>>=|<=|[-+*()=])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _lex(src: str) -> list:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            kind = {"v": "join", "f": "f"}.get(text, "var")
        if kind != "ws":
            toks.append(_Tok(kind, text, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


@dataclass(frozen=True)
class _Int:
    """A bare integer literal; only legal as a coefficient or as ``0``."""

    k: int
    pos: int


class _Parser:
    def __init__(self, src: str) -> None:
        self.toks = _lex(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "eof":
            raise TermSyntaxError(f"expected {text!r}", self.tok.pos)
        return self.take()

    def term(self, node) -> Term:
        if isinstance(node, _Int):
            if node.k == 0:
                return Zero()
            raise TermSyntaxError("integer literal must be a coefficient", node.pos)
        return node

    def lattice(self) -> Term:
        left = self.term(self.sum())
        op = None
        while self.tok.kind in ("join", "meet"):
            if op is not None and self.tok.kind != op:
                raise TermSyntaxError("mixed join/meet needs parentheses", self.tok.pos)
            op = self.take().kind
            right = self.term(self.sum())
            left = Join(left, right) if op == "join" else Meet(left, right)
        return left

    def sum(self):
        left = self.unary()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.take().text
            left = self.term(left)
            right = self.term(self.unary())
            left = Add(left, right) if op == "+" else Add(left, Neg(right))
        return left

    def unary(self):
        if self.tok.text == "-" and self.tok.kind == "op":
            self.take()
            arg = self.unary()
            if isinstance(arg, _Int) and arg.k != 0:
                return _Int(-arg.k, arg.pos)
            return Neg(self.term(arg))
        return self.scaled()

    def scaled(self):
        node = self.atom()
        if self.tok.text == "*":
            star = self.take()
            if not isinstance(node, _Int):
                raise TermSyntaxError("left operand of '*' must be an integer", star.pos)
            return Scale(node.k, self.term(self.unary()))
        return node

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.take()
            return _Int(int(t.text), t.pos)
        if t.kind == "var":
            self.take()
            return Var(t.text)
        if t.kind == "f":
            self.take()
            return F()
        if t.text == "(":
            self.take()
            inner = self.sum_or_lattice()
            self.expect(")")
            return inner
        raise TermSyntaxError(
            "unexpected end of input" if t.kind == "eof" else f"unexpected {t.text!r}",
            t.pos,
        )

    def sum_or_lattice(self):
        # a parenthesised integer such as "(4)" or "(-3)" stays a coefficient
        start = self.i
        node = self.sum()
        if isinstance(node, _Int) and self.tok.text == ")":
            return node
        self.i = start
        return self.lattice()


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.lattice()
    if p.tok.kind != "eof":
        raise TermSyntaxError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return t


def parse_equations(src: str) -> Tuple[Equation, ...]:
    """Parse ``s >= t``, ``s <= t`` or ``s = t`` into ``>= 0`` normal form.

    Equalities become the pair ``s - t >= 0`` and ``t - s >= 0``;
    a right-hand side of literally ``0`` is not subtracted.
    """
    p = _Parser(src)
    lhs = p.lattice()
    rel = p.tok
    if rel.text not in (">=", "<=", "="):
        raise TermSyntaxError("expected '>=', '<=' or '='", rel.pos)
    p.take()
    rhs = p.lattice()
    if p.tok.kind != "eof":
        raise TermSyntaxError(f"unexpected {p.tok.text!r}", p.tok.pos)

    def diff(a: Term, b: Term) -> Term:
        return a if isinstance(b, Zero) else sub(a, b)

    if rel.text == ">=":
        return (Equation(diff(lhs, rhs)),)
    if rel.text == "<=":
        return (Equation(diff(rhs, lhs)),)
    return (Equation(diff(lhs, rhs)), Equation(diff(rhs, lhs)))


# -- printer -------------------------------------------------------------------

_LAT, _SUM, _UNARY = 0, 1, 2


def _prec(t: Term) -> int:
    if isinstance(t, (Join, Meet)):
        return _LAT
    if isinstance(t, Add):
        return _SUM
    if isinstance(t, (Neg, Scale)):
        return _UNARY
    return 3


def _wrap(t: Term, need: int) -> str:
    s = print_term(t)
    return f"({s})" if _prec(t) < need else s


def print_term(t: Term) -> str:
    """Canonical text with the fewest parentheses that still round-trip."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, F):
        return "f"
    if isinstance(t, (Join, Meet)):
        sym = " v " if isinstance(t, Join) else " /\\ "
        left = print_term(t.left) if type(t.left) is type(t) else _wrap(t.left, _SUM)
        return left + sym + _wrap(t.right, _SUM)
    if isinstance(t, Add):
        left = _wrap(t.left, _SUM)
        if isinstance(t.right, Neg):
            return f"{left} - {_wrap(t.right.arg, _UNARY)}"
        return f"{left} + {_wrap(t.right, _UNARY)}"
    if isinstance(t, Neg):
        return "-" + _wrap(t.arg, _UNARY)
    if isinstance(t, Scale):
        coef = str(t.k) if t.k >= 0 else f"({t.k})"
        arg = t.arg
        inner = f"({print_term(arg)})" if _prec(arg) < _UNARY or isinstance(arg, Neg) else print_term(arg)
        return f"{coef}*{inner}"
    raise TypeError(f"not a term: {t!r}")


# -- evaluation ----------------------------------------------------------------


def eval_term(c: LexChain, t: Term, e: Mapping[str, Element]) -> Element:
    """Structural evaluation of ``t`` in ``c`` under the assignment ``e``."""
    for name, v in e.items():
        if not c.contains(v):
            raise EvaluationError(f"{name} = {v!r} is not an element of {c}")
    return _eval(c, t, e)


def _eval(c: LexChain, t: Term, e: Mapping[str, Element]) -> Element:
    if isinstance(t, Var):
        try:
            return e[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, Zero):
        return c.zero()
    if isinstance(t, F):
        return c.point
    if isinstance(t, Add):
        return c.add(_eval(c, t.left, e), _eval(c, t.right, e))
    if isinstance(t, Neg):
        return c.neg(_eval(c, t.arg, e))
    if isinstance(t, Scale):
        return c.scale(t.k, _eval(c, t.arg, e))
    if isinstance(t, Join):
        return c.join(_eval(c, t.left, e), _eval(c, t.right, e))
    if isinstance(t, Meet):
        return c.meet(_eval(c, t.left, e), _eval(c, t.right, e))
    raise TypeError(f"not a term: {t!r}")


def expand_scales(t: Term) -> Term:
    """Rewrite every ``k*t`` as iterated addition (negated when ``k < 0``)."""
    if isinstance(t, Scale):
        arg = expand_scales(t.arg)
        if t.k == 0:
            return Zero()
        out = arg
        for _ in range(abs(t.k) - 1):
            out = Add(out, arg)
        return out if t.k > 0 else Neg(out)
    if isinstance(t, (Add, Join, Meet)):
        return type(t)(expand_scales(t.left), expand_scales(t.right))
    if isinstance(t, Neg):
        return Neg(expand_scales(t.arg))
    return t


# -- MV-algebra terms ----------------------------------------------------------


@dataclass(frozen=True)
class MVar:
    name: str


@dataclass(frozen=True)
class MZero:
    pass


@dataclass(frozen=True)
class MOne:
    pass


@dataclass(frozen=True)
class Oplus:
    left: "MVTerm"
    right: "MVTerm"


@dataclass(frozen=True)
class Otimes:
    left: "MVTerm"
    right: "MVTerm"


@dataclass(frozen=True)
class MNeg:
    arg: "MVTerm"


@dataclass(frozen=True)
class MJoin:
    left: "MVTerm"
    right: "MVTerm"


@dataclass(frozen=True)
class MMeet:
    left: "MVTerm"
    right: "MVTerm"


MVTerm = Union[MVar, MZero, MOne, Oplus, Otimes, MNeg, MJoin, MMeet]


def eval_mvterm(m, t: MVTerm, e: Mapping[str, object]):
    """Evaluate in any object offering ``zero, one, oplus, otimes, neg, join, meet, contains``."""
    for name, v in e.items():
        if not m.contains(v):
            raise EvaluationError(f"{name} = {v!r} lies outside the carrier")
    return _eval_mv(m, t, e)


def _eval_mv(m, t: MVTerm, e):
    if isinstance(t, MVar):
        try:
            return e[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, MZero):
        return m.zero
    if isinstance(t, MOne):
        return m.one
    if isinstance(t, MNeg):
        return m.neg(_eval_mv(m, t.arg, e))
    ops = {Oplus: m.oplus, Otimes: m.otimes, MJoin: m.join, MMeet: m.meet}
    op = ops.get(type(t))
    if op is None:
        raise TypeError(f"not an MV term: {t!r}")
    return op(_eval_mv(m, t.left, e), _eval_mv(m, t.right, e))


def derive_mvterm(t: MVTerm) -> MVTerm:
    """Rewrite ``⊗``, ``∨``, ``∧`` in terms of ``⊕`` and ``¬`` only."""
    if isinstance(t, (MVar, MZero, MOne)):
        return t
    if isinstance(t, MNeg):
        return MNeg(derive_mvterm(t.arg))
    a, b = derive_mvterm(t.left), derive_mvterm(t.right)
    if isinstance(t, Oplus):
        return Oplus(a, b)
    if isinstance(t, Otimes):
        return MNeg(Oplus(MNeg(a), MNeg(b)))
    if isinstance(t, MJoin):
        return Oplus(MNeg(Oplus(MNeg(a), b)), b)
    if isinstance(t, MMeet):
        na, nb = MNeg(a), MNeg(b)
        return MNeg(Oplus(MNeg(Oplus(MNeg(na), nb)), nb))
    raise TypeError(f"not an MV term: {t!r}")
