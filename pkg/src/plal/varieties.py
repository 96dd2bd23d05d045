"""The lattice of varieties of pointed Abelian lattice-ordered groups.

A variety is described by its positive and negative halves.  Each half is
either the whole positively (negatively) pointed class, written ``TOP+``
(``TOP-``), or a pair ``(I, J)`` of divisor-closed sets of positive
integers with ``J`` inside ``I``: the half generated by ``Z_i`` for ``i``
in ``I`` and ``Z_j x| Z_0`` for ``j`` in ``J``.  Both halves empty is the
variety generated by ``Z_0``; the one-element variety is ``TRIVIAL``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .chain import Generator, LexChain, classify
from .equations import Family, check_oracle
from .terms import Equation, Neg, Var

__all__ = [
    "Side",
    "Variety",
    "Lattice",
    "TRIVIAL",
    "FLOOR",
    "divisors",
    "div_closure",
    "is_div_closed",
    "div_closed_subsets",
    "axioms_Zn",
    "axioms_VIJ",
    "axioms_variety",
    "member",
    "deciding_axiom",
    "generated_by",
    "join",
    "meet",
    "leq",
    "enumerate_lattice",
    "join_irreducibles",
    "induced_covers",
    "export_dot",
    "parse_variety",
]


def divisors(n: int) -> FrozenSet[int]:
    return frozenset(d for d in range(1, n + 1) if n % d == 0)


def div_closure(ks: Iterable[int]) -> FrozenSet[int]:
    out: set = set()
    for k in ks:
        out |= divisors(abs(k))
    return frozenset(out)


def is_div_closed(s: Iterable[int]) -> bool:
    s = frozenset(s)
    return all(k > 0 for k in s) and all(divisors(k) <= s for k in s)


def div_closed_subsets(nmax: int) -> List[FrozenSet[int]]:
    """All divisor-closed subsets of ``{1..nmax}``, the empty set included."""
    out = [frozenset()]
    # a nonempty divisor-closed set always contains 1
    rest = list(range(2, nmax + 1))
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            s = frozenset((1,) + combo)
            if is_div_closed(s):
                out.append(s)
    out.sort(key=_set_key)
    return out


def _set_key(s: FrozenSet[int]) -> Tuple[int, Tuple[int, ...]]:
    return (len(s), tuple(sorted(s)))


def _fmt_set(s: FrozenSet[int]) -> str:
    return "{" + ",".join(str(k) for k in sorted(s)) + "}"


@dataclass(frozen=True)
class Side:
    """One half of a variety: ``top`` or the generator sets ``(I, J)``."""

    top: bool = False
    I: FrozenSet[int] = frozenset()
    J: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "I", frozenset(self.I))
        object.__setattr__(self, "J", frozenset(self.J))
        if self.top and (self.I or self.J):
            raise ValueError("a top side carries no generator sets")
        if not is_div_closed(self.I):
            raise ValueError(f"I={_fmt_set(self.I)} is not divisor-closed")
        if not is_div_closed(self.J):
            raise ValueError(f"J={_fmt_set(self.J)} is not divisor-closed")
        if not self.J <= self.I:
            raise ValueError(f"J={_fmt_set(self.J)} is not contained in I={_fmt_set(self.I)}")

    def leq(self, other: Side) -> bool:
        if other.top:
            return True
        if self.top:
            return False
        return self.I <= other.I and self.J <= other.J

    def join(self, other: Side) -> Side:
        if self.top or other.top:
            return Side(top=True)
        return Side(False, self.I | other.I, self.J | other.J)

    def meet(self, other: Side) -> Side:
        if self.top:
            return other
        if other.top:
            return self
        return Side(False, self.I & other.I, self.J & other.J)

    def key(self) -> tuple:
        if self.top:
            return (1,)
        return (0, _set_key(self.I), _set_key(self.J))

    def render(self, sign: str) -> str:
        if self.top:
            return f"TOP{sign}"
        return f"V{sign}(I={_fmt_set(self.I)};J={_fmt_set(self.J)})"


EMPTY = Side()


@dataclass(frozen=True)
class Variety:
    pos: Side = EMPTY
    neg: Side = EMPTY
    trivial: bool = False

    def __post_init__(self) -> None:
        if self.trivial and (self.pos != EMPTY or self.neg != EMPTY):
            raise ValueError("the trivial variety has no generators")

    def __str__(self) -> str:
        if self.trivial:
            return "TRIVIAL"
        return f"{self.pos.render('+')} & {self.neg.render('-')}"

    def key(self) -> tuple:
        if self.trivial:
            return (0,)
        return (1, self.pos.key(), self.neg.key())

    def label(self) -> str:
        """Short name when the variety is generated by one canonical chain."""
        if self.trivial:
            return "T"
        g = _single_generator(self)
        return _generator_label(g) if g is not None else str(self)


TRIVIAL = Variety(trivial=True)
FLOOR = Variety()


def _generator_label(g: Generator) -> str:
    if g.kind == "Z0":
        return "V(Z_0)"
    if g.kind == "Zn":
        return f"V(Z_{g.n})"
    if g.kind == "ZnLexZ0":
        return f"V(Z_{g.n} ⋉ Z_0)"
    return "pAL+" if g.kind == "RPos" else "pAL-"


def _single_generator(v: Variety) -> Optional[Generator]:
    for g in _canonical_generators(v):
        if generated_by(g.chain()) == v:
            return g
    if v == FLOOR:
        return Generator("Z0")
    return None


def _canonical_generators(v: Variety) -> List[Generator]:
    out = []
    for side, sgn in ((v.pos, 1), (v.neg, -1)):
        if side.top:
            out.append(Generator("RPos" if sgn > 0 else "RNeg"))
            continue
        out += [Generator("Zn", sgn * i) for i in sorted(side.I)]
        out += [Generator("ZnLexZ0", sgn * j) for j in sorted(side.J)]
    return out


def generated_by(c: Union[LexChain, Generator]) -> Variety:
    """The variety generated by one chain."""
    g = c if isinstance(c, Generator) else classify(c)
    if g.kind == "Z0":
        return FLOOR
    if g.kind in ("RPos", "RNeg"):
        side = Side(top=True)
    else:
        ds = divisors(abs(g.n))
        side = Side(False, ds, ds if g.kind == "ZnLexZ0" else frozenset())
    return Variety(side, EMPTY) if g.sign > 0 else Variety(EMPTY, side)


# -- axioms ----------------------------------------------------------------------


def axioms_Zn(n: int) -> Tuple[Family, ...]:
    """Equations axiomatizing the variety of ``Z_n`` inside the positively pointed class."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (Family("s-rank", n),) + tuple(
        Family("div", n, p) for p in range(1, n) if n % p
    )


def axioms_VIJ(I: Iterable[int], J: Iterable[int], dual: bool = False) -> Tuple[Family, ...]:
    """Basis for the half generated by ``Z_i`` (i in I) and ``Z_j x| Z_0`` (j in J).

    ``n = max I`` (0 for empty I) and ``p`` runs over ``1..n``.  With
    ``dual`` the mirrored families are returned for the negative half.
    """
    side = Side(False, frozenset(I), frozenset(J))
    n = max(side.I, default=0)
    fams = [Family("rank", n, 0, dual)]
    fams += [Family("div", n, p, dual) for p in range(1, n + 1) if p not in side.I]
    fams += [Family("mix", n, p, dual) for p in range(1, n + 1) if p in side.I - side.J]
    return tuple(fams)


def axioms_variety(v: Variety) -> Tuple[Union[Family, Equation], ...]:
    """Families for nontrivial varieties; ``x >= 0`` and ``-x >= 0`` for the trivial one."""
    if v.trivial:
        return (Equation(Var("x")), Equation(Neg(Var("x"))))
    out: List[Union[Family, Equation]] = []
    if not v.pos.top:
        out += axioms_VIJ(v.pos.I, v.pos.J)
    if not v.neg.top:
        out += axioms_VIJ(v.neg.I, v.neg.J, dual=True)
    return tuple(out)


# -- membership and order ----------------------------------------------------------


def member(c: LexChain, v: Variety) -> bool:
    if v.trivial:
        return False
    g = classify(c)
    if g.kind == "Z0":
        return True
    side = v.pos if g.sign > 0 else v.neg
    if side.top:
        return True
    if g.kind == "Zn":
        return abs(g.n) in side.I
    if g.kind == "ZnLexZ0":
        return abs(g.n) in side.J
    return False


def deciding_axiom(c: LexChain, v: Variety) -> Optional[Union[Family, Equation]]:
    """The first axiom of ``v`` that fails in ``c``, or None if all hold."""
    for ax in axioms_variety(v):
        if isinstance(ax, Equation):
            # only the trivial variety has raw equations; every chain breaks x >= 0
            return ax
        if not check_oracle(c, ax).valid:
            return ax
    return None


def leq(a: Variety, b: Variety) -> bool:
    if a.trivial:
        return True
    if b.trivial:
        return False
    return a.pos.leq(b.pos) and a.neg.leq(b.neg)


def join(a: Variety, b: Variety) -> Variety:
    if a.trivial:
        return b
    if b.trivial:
        return a
    return Variety(a.pos.join(b.pos), a.neg.join(b.neg))


def meet(a: Variety, b: Variety) -> Variety:
    if a.trivial or b.trivial:
        return TRIVIAL
    return Variety(a.pos.meet(b.pos), a.neg.meet(b.neg))


# -- enumeration -----------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """Finite varieties with generator indices up to ``nmax``, plus cover edges.

    ``covers`` holds index pairs ``(lower, upper)`` into ``nodes``.
    """

    nmax: int
    side: str
    nodes: Tuple[Variety, ...]
    covers: Tuple[Tuple[int, int], ...]
    index: Dict[Variety, int] = field(default_factory=dict, compare=False, repr=False)

    def leq(self, i: int, j: int) -> bool:
        return leq(self.nodes[i], self.nodes[j])


MAX_NMAX = 12


def _side_pairs(nmax: int) -> List[Side]:
    subsets = div_closed_subsets(nmax)
    out = [Side(False, I, J) for I in subsets for J in subsets if J <= I]
    out.sort(key=Side.key)
    return out


def _upper_sides(s: Side, nmax: int) -> List[Side]:
    """Sides covering ``s``: add one minimal missing generator."""
    out = []
    for k in range(1, nmax + 1):
        proper = divisors(k) - {k}
        if k not in s.I and proper <= s.I:
            out.append(Side(False, s.I | {k}, s.J))
        if k in s.I and k not in s.J and proper <= s.J:
            out.append(Side(False, s.I, s.J | {k}))
    return out


def enumerate_lattice(nmax: int, side: str = "both") -> Lattice:
    """All finite varieties with I+, I- inside ``{1..nmax}``, in deterministic order.

    ``side`` restricts to the positive half (``"pos"``), the negative half
    (``"neg"``) or keeps both.  The top markers are not part of the finite
    enumeration.
    """
    if not 1 <= nmax <= MAX_NMAX:
        raise ValueError(f"nmax must lie in [1, {MAX_NMAX}]")
    if side not in ("pos", "neg", "both"):
        raise ValueError("side must be 'pos', 'neg' or 'both'")
    pairs = _side_pairs(nmax)
    pos_sides = pairs if side in ("pos", "both") else [EMPTY]
    neg_sides = pairs if side in ("neg", "both") else [EMPTY]
    nodes = [TRIVIAL] + [Variety(p, n) for p in pos_sides for n in neg_sides]
    index = {v: i for i, v in enumerate(nodes)}
    covers = [(0, index[FLOOR])]
    pos_ok = side in ("pos", "both")
    neg_ok = side in ("neg", "both")
    for i, v in enumerate(nodes[1:], start=1):
        if pos_ok:
            for up in _upper_sides(v.pos, nmax):
                covers.append((i, index[Variety(up, v.neg)]))
        if neg_ok:
            for up in _upper_sides(v.neg, nmax):
                covers.append((i, index[Variety(v.pos, up)]))
    covers.sort()
    return Lattice(nmax, side, tuple(nodes), tuple(covers), index)


def join_irreducibles(nmax: int, side: str = "both") -> List[Variety]:
    """``V(Z_n)`` and ``V(Z_n x| Z_0)`` for ``1 <= n <= nmax`` on the requested sides."""
    signs = {"pos": (1,), "neg": (-1,), "both": (1, -1)}[side]
    out = []
    for sgn in signs:
        for n in range(1, nmax + 1):
            out.append(generated_by(Generator("Zn", sgn * n)))
        for n in range(1, nmax + 1):
            out.append(generated_by(Generator("ZnLexZ0", sgn * n)))
    return out


def induced_covers(nodes: Sequence[Variety]) -> List[Tuple[Variety, Variety]]:
    """Hasse edges of the order restricted to ``nodes``."""
    nodes = list(dict.fromkeys(nodes))
    below = {
        (a, b) for a in nodes for b in nodes if a != b and leq(a, b)
    }
    edges = []
    for a, b in below:
        if not any((a, c) in below and (c, b) in below for c in nodes):
            edges.append((a, b))
    pos = {v: i for i, v in enumerate(nodes)}
    edges.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
    return edges


def _dot_id(v: Variety) -> str:
    if v.trivial:
        return "T"
    g = _single_generator(v)
    if g.kind == "Z0":
        return "Z0"
    return ("Z" if g.kind == "Zn" else "K") + str(g.n)


def export_dot(lat: Lattice) -> str:
    """DOT rendering of the join-irreducible skeleton of ``lat``.

    Nodes are the trivial variety, ``V(Z_0)``, every ``V(Z_n)`` and
    ``V(Z_n ⋉ Z_0)`` with ``n <= nmax`` and the tops.  Solid undirected
    edges are covers among them, arrows run ``V(Z_n) -> V(Z_n ⋉ Z_0)``,
    and dashed edges join the maximal nodes of each half to its top.
    """
    jis = join_irreducibles(lat.nmax, lat.side)
    nodes = [TRIVIAL, FLOOR] + jis
    lines = [
        "digraph subvarieties {",
        "  rankdir=BT;",
        "  node [shape=plaintext];",
    ]
    for v in nodes:
        color = ""
        if not v.trivial and v != FLOOR:
            color = ", fontcolor=blue" if _dot_id(v).startswith("Z") else ", fontcolor=red"
        elif v == FLOOR:
            color = ", fontcolor=blue"
        lines.append(f'  "{_dot_id(v)}" [label="{v.label()}"{color}];')
    tops = []
    if lat.side in ("pos", "both"):
        tops.append(("TOP+", "pAL+", 1))
    if lat.side in ("neg", "both"):
        tops.append(("TOP-", "pAL-", -1))
    for ident, label, _ in tops:
        lines.append(f'  "{ident}" [label="{label}"];')
    if lat.side == "both":
        lines.append('  "TOP" [label="pAL"];')
    for a, b in induced_covers(nodes):
        ia, ib = _dot_id(a), _dot_id(b)
        if ia.startswith("Z") and ib.startswith("K") and ia[1:] == ib[1:]:
            lines.append(f'  "{ia}" -> "{ib}" [color=gray];')
        else:
            lines.append(f'  "{ia}" -> "{ib}" [dir=none];')
    for ident, _, sgn in tops:
        side_nodes = [v for v in jis if (v.pos if sgn > 0 else v.neg) != EMPTY]
        maximal = [
            v for v in side_nodes if not any(w != v and leq(v, w) for w in side_nodes)
        ]
        lines.append(f'  "Z0" -> "{ident}" [style=dashed, dir=none, color=gray];')
        for v in maximal:
            lines.append(f'  "{_dot_id(v)}" -> "{ident}" [style=dashed, dir=none];')
        if lat.side == "both":
            lines.append(f'  "{ident}" -> "TOP" [dir=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- literal grammar ---------------------------------------------------------------

_SIDE_RE = re.compile(
    r"\s*(?:(TOP)([+-])|V([+-])\(\s*I\s*=\s*\{([^}]*)\}\s*;\s*J\s*=\s*\{([^}]*)\}\s*\))\s*"
)


def _parse_set(text: str) -> FrozenSet[int]:
    text = text.strip()
    if not text:
        return frozenset()
    return frozenset(int(t) for t in text.split(","))


def parse_variety(text: str) -> Variety:
    """``V+(I={1,2,6};J={1,2}) & V-(I={1};J={})``, ``TOP+``, ``TRIVIAL``.

    A missing half defaults to the empty one.
    """
    if text.strip() == "TRIVIAL":
        return TRIVIAL
    sides: Dict[str, Side] = {}
    for chunk in text.split("&"):
        m = _SIDE_RE.fullmatch(chunk)
        if m is None:
            raise ValueError(f"not a variety half: {chunk.strip()!r}")
        if m.group(1):
            sign, side = m.group(2), Side(top=True)
        else:
            sign = m.group(3)
            side = Side(False, _parse_set(m.group(4)), _parse_set(m.group(5)))
        if sign in sides:
            raise ValueError(f"half {sign} given twice")
        sides[sign] = side
    return Variety(sides.get("+", EMPTY), sides.get("-", EMPTY))
