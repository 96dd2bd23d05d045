"""MV-algebras as unit intervals of strongly pointed chains.

For a chain with strong unit ``u > 0`` the interval ``[0, u]`` carries

    a ⊕ b = (a + b) ∧ u,    a ⊗ b = 0 ∨ (a + b - u),    ¬a = u - a.

Infinite intervals are never materialised: :class:`MVAlgebra` is a view
with a membership test, and exhaustive checks run over coordinate windows.
:class:`FiniteMV` holds an explicit operation table for structures that
are not (yet) known to come from a chain.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .chain import ChainError, Element, Kind, LexChain
from .embeddings import (
    PartialEmbedding,
    find_mv_partial_embedding,
    find_partial_embedding,
    verify_partial_embedding,
)

__all__ = [
    "MVAlgebra",
    "FiniteMV",
    "gamma",
    "MVReport",
    "MVAxiomError",
    "check_mv_axioms",
    "GammaInverse",
    "gamma_inverse_finite",
    "UDecomposition",
    "udecompose",
    "TransferReport",
    "gamma_partial_embedding_transfer",
]


@dataclass(frozen=True)
class MVAlgebra:
    """The interval ``[0, u]`` of ``chain`` with the operations above."""

    chain: LexChain

    @property
    def zero(self) -> Element:
        return self.chain.zero()

    @property
    def one(self) -> Element:
        return self.chain.point

    @property
    def finite(self) -> bool:
        return self.chain.kinds == (Kind.Z,)

    def contains(self, a: object) -> bool:
        return self.chain.contains(a) and self.zero <= a <= self.one

    def oplus(self, a: Element, b: Element) -> Element:
        return self.chain.meet(self.chain.add(a, b), self.one)

    def otimes(self, a: Element, b: Element) -> Element:
        c = self.chain
        return c.join(self.zero, c.sub(c.add(a, b), self.one))

    def neg(self, a: Element) -> Element:
        return self.chain.sub(self.one, a)

    def join(self, a: Element, b: Element) -> Element:
        return self.chain.join(a, b)

    def meet(self, a: Element, b: Element) -> Element:
        return self.chain.meet(a, b)

    def le(self, a: Element, b: Element) -> bool:
        return a <= b

    def elements(self, window: Optional[int] = None) -> List[Element]:
        """The whole carrier when finite, else the carrier inside ``[-window, window]``."""
        if self.finite:
            return [(k,) for k in range(self.one[0] + 1)]
        if window is None:
            raise ValueError("an infinite carrier needs a window")
        return sorted(a for a in self.chain.window(window) if self.contains(a))


def gamma(c: LexChain) -> MVAlgebra:
    """The unit interval of ``c``; the point must be a positive strong unit."""
    if not c.is_strongly_pointed():
        raise ChainError(f"the point of {c} is not a strong unit")
    if c.point <= c.zero():
        raise ChainError(f"the point of {c} is not positive")
    return MVAlgebra(c)


@dataclass(frozen=True)
class FiniteMV:
    """An abstract finite structure ``{0..size-1}`` given by its ⊕ and ¬ tables."""

    oplus_table: Tuple[Tuple[int, ...], ...]
    neg_table: Tuple[int, ...]
    zero: int = 0

    @property
    def size(self) -> int:
        return len(self.neg_table)

    @property
    def one(self) -> int:
        return self.neg_table[self.zero]

    def contains(self, a: object) -> bool:
        return isinstance(a, int) and 0 <= a < self.size

    def oplus(self, a: int, b: int) -> int:
        return self.oplus_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def otimes(self, a: int, b: int) -> int:
        return self.neg(self.oplus(self.neg(a), self.neg(b)))

    def join(self, a: int, b: int) -> int:
        return self.oplus(self.neg(self.oplus(self.neg(a), b)), b)

    def meet(self, a: int, b: int) -> int:
        return self.neg(self.join(self.neg(a), self.neg(b)))

    def le(self, a: int, b: int) -> bool:
        return self.oplus(self.neg(a), b) == self.one

    def elements(self, window: Optional[int] = None) -> List[int]:
        return list(range(self.size))

    @classmethod
    def from_algebra(cls, m: MVAlgebra) -> Tuple["FiniteMV", List[Element]]:
        """Tables of a finite view, with the element list used for numbering."""
        elems = m.elements()
        idx = {e: i for i, e in enumerate(elems)}
        table = tuple(tuple(idx[m.oplus(a, b)] for b in elems) for a in elems)
        negs = tuple(idx[m.neg(a)] for a in elems)
        return cls(table, negs, idx[m.zero]), elems


# -- axioms ---------------------------------------------------------------------

AXIOMS = (
    "oplus-associative",
    "oplus-commutative",
    "zero-neutral",
    "double-negation",
    "one-absorbing",
    "complement",
    "lukasiewicz",
)


@dataclass(frozen=True)
class MVReport:
    """Per-axiom failures with a witness tuple; empty means every check passed."""

    failures: Tuple[Tuple[str, tuple], ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def witness(self, axiom: str) -> Optional[tuple]:
        return dict(self.failures).get(axiom)


class MVAxiomError(ValueError):
    def __init__(self, report: MVReport) -> None:
        name, wit = report.failures[0]
        super().__init__(f"not an MV-algebra: {name} fails at {wit}")
        self.report = report


def check_mv_axioms(m, window: Optional[int] = None) -> MVReport:
    """Check the MV axioms on every tuple from the carrier (or its window).

    One witness is recorded per failing axiom: the first in carrier order.
    """
    xs = m.elements(window)
    o, n = m.oplus, m.neg
    zero = m.zero
    one = n(zero)
    fails: Dict[str, tuple] = {}
    checked = 0

    def fail(name: str, wit: tuple) -> None:
        fails.setdefault(name, wit)

    for x in xs:
        checked += 4
        if o(x, zero) != x:
            fail("zero-neutral", (x,))
        if n(n(x)) != x:
            fail("double-negation", (x,))
        if o(x, one) != one:
            fail("one-absorbing", (x,))
        if o(x, n(x)) != one:
            fail("complement", (x,))
        for y in xs:
            checked += 2
            if o(x, y) != o(y, x):
                fail("oplus-commutative", (x, y))
            if o(n(o(n(x), y)), y) != o(n(o(n(y), x)), x):
                fail("lukasiewicz", (x, y))
            if "oplus-associative" in fails:
                continue
            xy = o(x, y)
            for z in xs:
                checked += 1
                if o(xy, z) != o(x, o(y, z)):
                    fail("oplus-associative", (x, y, z))
                    break
    order = {name: i for i, name in enumerate(AXIOMS)}
    return MVReport(tuple(sorted(fails.items(), key=lambda kv: order[kv[0]])), checked)


@dataclass(frozen=True)
class GammaInverse:
    """``chain`` is ``Z_n``; ``iso`` sends each element of the input to its integer."""

    chain: LexChain
    iso: Tuple[Tuple[object, int], ...]


def gamma_inverse_finite(m) -> GammaInverse:
    """Recover ``Z_n`` from a finite MV-chain with ``n + 1`` elements."""
    report = check_mv_axioms(m)
    if not report.ok:
        raise MVAxiomError(report)
    xs = m.elements()
    for x, y in itertools.combinations(xs, 2):
        if not (m.le(x, y) or m.le(y, x)):
            raise ValueError(f"not a chain: {x} and {y} are incomparable")
    below = {x: sum(1 for y in xs if m.le(y, x)) - 1 for x in xs}
    n = len(xs) - 1
    for x in xs:
        if m.neg(x) != _lookup(xs, below, n - below[x]):
            raise ValueError(f"negation of {x} does not match Z_{n}")
        for y in xs:
            if below[m.oplus(x, y)] != min(below[x] + below[y], n):
                raise ValueError(f"{x} ⊕ {y} does not match Z_{n}")
    iso = tuple(sorted(((x, below[x]) for x in xs), key=lambda p: p[1]))
    return GammaInverse(LexChain.of("Z", n), iso)


def _lookup(xs, below, k):
    for x in xs:
        if below[x] == k:
            return x
    raise ValueError("rank out of range")


# -- unit decomposition -----------------------------------------------------------


@dataclass(frozen=True)
class UDecomposition:
    """``a = n*u + r`` with ``0 <= r < u``."""

    n: int
    r: Element


def udecompose(c: LexChain, a: Element) -> UDecomposition:
    """Split ``a`` into whole multiples of the point and a remainder in ``[0, u)``."""
    u = c.point
    if not c.is_strongly_pointed() or u <= c.zero():
        raise ChainError(f"{c} is not strongly positively pointed")
    c.check(a)

    def fits(k: int) -> bool:
        return c.scale(k, u) <= a

    # exponential search for a bracket lo <= n < hi, then bisect
    if fits(0):
        lo, hi = 0, 1
        while fits(hi):
            lo, hi = hi, hi * 2
    else:
        lo, hi = -1, 0
        while not fits(lo):
            lo, hi = lo * 2, lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    r = c.sub(a, c.scale(lo, u))
    if not (c.zero() <= r < u) or c.add(c.scale(lo, u), r) != a:
        raise AssertionError("decomposition invariant broken")
    return UDecomposition(lo, r)


# -- transfer between the two sides --------------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    """Outcome of one transfer direction; ``ok`` means the built map verified."""

    ok: bool
    reason: str
    mv_map: Optional[PartialEmbedding] = None
    l_map: Optional[PartialEmbedding] = None


def _decomposition_closure(c: LexChain, F: Iterable[Element]) -> set:
    """Smallest superset closed under negation and under ``a -> n_a*u, r_a``."""
    todo = list(F)
    out: set = set()
    while todo:
        a = todo.pop()
        if a in out:
            continue
        out.add(a)
        d = udecompose(c, a)
        todo += [c.neg(a), c.scale(d.n, c.point), d.r]
    return out


def lift_mv_embedding(
    A: LexChain, B: LexChain, F: Iterable[Element], budget: int
) -> TransferReport:
    """Build an ``l``-side partial embedding of ``F`` from an MV-side one.

    ``f(a) = n_a*v + g(r_a)`` where ``g`` embeds the unit-interval part of
    the decomposition closure of ``F``.
    """
    MA, MB = gamma(A), gamma(B)
    F = [A.check(a) for a in F]
    closed = _decomposition_closure(A, F)
    F0 = {a for a in closed if MA.contains(a)} | {MA.zero, MA.one}
    g = find_mv_partial_embedding(MA, F0, MB, budget)
    if g is None:
        return TransferReport(False, "no MV-side embedding found within the budget")
    gm = g.mapping
    pairs = []
    for a in sorted(set(F)):
        d = udecompose(A, a)
        pairs.append((a, B.add(B.scale(d.n, B.point), gm[d.r])))
    f = PartialEmbedding(A, B, tuple(pairs), "l")
    if not verify_partial_embedding(g):
        return TransferReport(False, "MV-side map failed verification", g, f)
    if not verify_partial_embedding(f):
        return TransferReport(False, "lifted map failed verification", g, f)
    return TransferReport(True, "verified", g, f)


def restrict_l_embedding(
    A: LexChain, B: LexChain, G: Iterable[Element], budget: int
) -> TransferReport:
    """Build an MV-side partial embedding of ``G`` from an ``l``-side one.

    The ``l``-side map is found on the set of pairwise sums and negatives
    of ``G`` together with 0 and the unit, then restricted to ``G``.
    """
    MA, MB = gamma(A), gamma(B)
    G = [a for a in G]
    for a in G:
        if not MA.contains(a):
            raise ChainError(f"{a!r} is outside the MV carrier")
    base = set(G) | {MA.zero, MA.one}
    H = set(base)
    for a in base:
        H.add(A.neg(a))
        for b in base:
            H.add(A.add(a, b))
    f = find_partial_embedding(A, H, B, budget)
    if f is None:
        return TransferReport(False, "no l-side embedding found within the budget")
    fm = f.mapping
    g = PartialEmbedding(MA, MB, tuple((a, fm[a]) for a in sorted(set(G))), "mv")
    if not verify_partial_embedding(f):
        return TransferReport(False, "l-side map failed verification", g, f)
    if not verify_partial_embedding(g):
        return TransferReport(False, "restricted map failed verification", g, f)
    return TransferReport(True, "verified", g, f)


def gamma_partial_embedding_transfer(
    A: LexChain, B: LexChain, F: Iterable[Element], budget: int = 24
) -> Tuple[TransferReport, TransferReport]:
    """Run both directions on ``F``: lift to the ``l`` side, and restrict from it.

    For the second direction ``F`` is intersected with the unit interval.
    """
    F = list(F)
    up = lift_mv_embedding(A, B, F, budget)
    MA = gamma(A)
    down = restrict_l_embedding(A, B, [a for a in F if MA.contains(a)], budget)
    return up, down
