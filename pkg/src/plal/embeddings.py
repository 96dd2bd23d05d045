"""Finite partial embeddings between chains, and universal classes of chains.

A partial embedding of a finite set ``F`` is an injective map that
respects every operation instance whose arguments and result all lie in
``F``.  Between totally ordered structures such a map is automatically
strictly monotone, which the search exploits: every new image must fall
strictly between the images of its already placed neighbours.

Membership in a universal class is only semi-decidable here: fragments
of increasing size are embedded into generators, and failure to find one
within the budget yields ``Unknown``, never ``No``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .chain import ChainError, Element, LexChain, lex_product

__all__ = [
    "PartialEmbedding",
    "find_partial_embedding",
    "find_mv_partial_embedding",
    "verify_partial_embedding",
    "LexTransferReport",
    "lex_transfer_check",
    "UClassPart",
    "UniversalClass",
    "parse_universal_class",
    "normalize_universal_class",
    "universal_generators",
    "MemberResult",
    "universal_member",
]


@dataclass(frozen=True)
class PartialEmbedding:
    """A finite map ``pairs`` from ``source`` to ``target``.

    ``kind`` is ``"l"`` for pointed lattice-ordered groups (sources and
    targets are LexChains) and ``"mv"`` for MV-algebras.
    """

    source: object
    target: object
    pairs: Tuple[Tuple[Element, Element], ...]
    kind: str = "l"

    @property
    def mapping(self) -> Dict[Element, Element]:
        return dict(self.pairs)

    @property
    def domain(self) -> Tuple[Element, ...]:
        return tuple(a for a, _ in self.pairs)


# -- the search engine -----------------------------------------------------------


@dataclass
class _Problem:
    dom: List[Element]
    cands: List[Element]
    consts: List[Tuple[int, Element]]
    # (i, j, fwd, inv): phi(j) = fwd(phi(i)); phi(i) = inv(phi(j)) when inv is given
    unary: List[Tuple[int, int, Callable, Optional[Callable]]]
    # (i, j, k, fwd, solve): phi(k) = fwd(phi(i), phi(j)); solve(phi(k), phi(i)) = phi(j)
    binary: List[Tuple[int, int, int, Callable, Optional[Callable]]]
    rank: List[int] = field(default_factory=list)


def _search(prob: _Problem) -> Optional[Dict[int, Element]]:
    n = len(prob.dom)
    touching: List[list] = [[] for _ in range(n)]
    for inst in prob.unary:
        touching[inst[0]].append(("u", inst))
        touching[inst[1]].append(("u", inst))
    for inst in prob.binary:
        for idx in {inst[0], inst[1], inst[2]}:
            touching[idx].append(("b", inst))
    # elements sorted by source order, to locate neighbours quickly
    by_rank = sorted(range(n), key=lambda i: prob.rank[i])

    phi: Dict[int, Element] = {}
    used: Dict[Element, int] = {}

    def consistent(i: int, v: Element) -> bool:
        if v in used and used[v] != i:
            return False
        ri = prob.rank[i]
        for j, w in phi.items():
            rj = prob.rank[j]
            if (ri < rj) != (v < w) or (ri > rj) != (v > w):
                return False
        return True

    def assign(i: int, v: Element, trail: list) -> bool:
        queue = [(i, v)]
        while queue:
            i, v = queue.pop()
            if i in phi:
                if phi[i] != v:
                    return False
                continue
            if not consistent(i, v):
                return False
            phi[i] = v
            used[v] = i
            trail.append(i)
            for tag, inst in touching[i]:
                if tag == "u":
                    a, b, fwd, inv = inst
                    if a in phi:
                        queue.append((b, fwd(phi[a])))
                    elif b in phi and inv is not None:
                        queue.append((a, inv(phi[b])))
                else:
                    a, b, c, fwd, solve = inst
                    if a in phi and b in phi:
                        queue.append((c, fwd(phi[a], phi[b])))
                    elif solve is not None and c in phi:
                        if a in phi:
                            queue.append((b, solve(phi[c], phi[a])))
                        elif b in phi:
                            queue.append((a, solve(phi[c], phi[b])))
        return True

    def undo(trail: list) -> None:
        for i in reversed(trail):
            del used[phi[i]]
            del phi[i]
        trail.clear()

    root: list = []
    for i, v in prob.consts:
        if not assign(i, v, root):
            return None

    def bounds(i: int):
        lo = hi = None
        pos = by_rank.index(i)
        for j in reversed(by_rank[:pos]):
            if j in phi:
                lo = phi[j]
                break
        for j in by_rank[pos + 1 :]:
            if j in phi:
                hi = phi[j]
                break
        return lo, hi

    def solve() -> bool:
        free = [i for i in range(n) if i not in phi]
        if not free:
            return True
        i = free[0]
        lo, hi = bounds(i)
        for v in prob.cands:
            if (lo is not None and not lo < v) or (hi is not None and not v < hi):
                continue
            trail: list = []
            if assign(i, v, trail) and solve():
                return True
            undo(trail)
        return False

    return dict(phi) if solve() else None


def _order_key(c: LexChain) -> Callable[[Element], tuple]:
    return lambda e: (c.magnitude(e), e)


def _rank_of(dom: Sequence[Element]) -> List[int]:
    order = sorted(range(len(dom)), key=lambda i: dom[i])
    rank = [0] * len(dom)
    for r, i in enumerate(order):
        rank[i] = r
    return rank


def find_partial_embedding(
    A: LexChain, F: Iterable[Element], B: LexChain, budget: int
) -> Optional[PartialEmbedding]:
    """Backtracking search for a partial embedding of ``F`` into ``B``.

    Free choices range over elements of ``B`` with coordinates in
    ``[-budget, budget]``, smallest magnitude first.  Values forced by
    constants, negation or addition may fall outside that window.
    ``None`` means nothing was found within the budget.
    """
    dom = sorted({A.check(a) for a in F}, key=_order_key(A))
    if not dom:
        return PartialEmbedding(A, B, (), "l")
    index = {a: i for i, a in enumerate(dom)}
    consts = []
    if A.zero() in index:
        consts.append((index[A.zero()], B.zero()))
    if A.point in index:
        consts.append((index[A.point], B.point))
    unary, binary = [], []
    for a in dom:
        na = A.neg(a)
        if na in index and index[a] <= index[na]:
            unary.append((index[a], index[na], B.neg, B.neg))
    for i, a in enumerate(dom):
        for j in range(i, len(dom)):
            s = A.add(a, dom[j])
            if s in index:
                binary.append((i, j, index[s], B.add, B.sub))
    cands = sorted(B.window(budget), key=_order_key(B))
    prob = _Problem(dom, cands, consts, unary, binary, _rank_of(dom))
    phi = _search(prob)
    if phi is None:
        return None
    return PartialEmbedding(A, B, tuple((dom[i], phi[i]) for i in range(len(dom))), "l")


def find_mv_partial_embedding(
    M, F: Iterable[Element], N, budget: Optional[int] = None
) -> Optional[PartialEmbedding]:
    """Partial embedding of ``F`` (inside the MV-chain ``M``) into the MV-chain ``N``.

    ``M`` and ``N`` are chain-backed MV-algebras.  Finite targets are
    searched exhaustively; infinite ones over their carrier elements with
    coordinates in ``[-budget, budget]``.
    """
    dom = sorted({a for a in F}, key=lambda e: (M.chain.magnitude(e), e))
    for a in dom:
        if not M.contains(a):
            raise ChainError(f"{a!r} is outside the MV carrier")
    index = {a: i for i, a in enumerate(dom)}
    consts = []
    if M.zero in index:
        consts.append((index[M.zero], N.zero))
    if M.one in index:
        consts.append((index[M.one], N.one))
    unary, binary = [], []
    for a in dom:
        na = M.neg(a)
        if na in index and index[a] <= index[na]:
            unary.append((index[a], index[na], N.neg, N.neg))
    for i, a in enumerate(dom):
        for j in range(i, len(dom)):
            for op_m, op_n in ((M.oplus, N.oplus), (M.otimes, N.otimes)):
                s = op_m(a, dom[j])
                if s in index:
                    binary.append((i, j, index[s], op_n, None))
    cands = N.elements(budget)
    cands = sorted(cands, key=lambda e: (N.chain.magnitude(e), e))
    prob = _Problem(dom, cands, consts, unary, binary, _rank_of(dom))
    phi = _search(prob)
    if phi is None:
        return None
    return PartialEmbedding(M, N, tuple((dom[i], phi[i]) for i in range(len(dom))), "mv")


# -- verification -------------------------------------------------------------------


def verify_partial_embedding(pe: PartialEmbedding) -> bool:
    """Re-check injectivity, every closed operation instance, constants and strict order."""
    phi = pe.mapping
    if len(phi) != len(pe.pairs) or len(set(phi.values())) != len(phi):
        return False
    if pe.kind == "l":
        A, B = pe.source, pe.target
        if not all(A.contains(a) and B.contains(b) for a, b in pe.pairs):
            return False
        consts = [(A.zero(), B.zero()), (A.point, B.point)]
        unary = [(A.neg, B.neg)]
        binary = [(A.add, B.add), (A.join, B.join), (A.meet, B.meet)]
    elif pe.kind == "mv":
        M, N = pe.source, pe.target
        if not all(M.contains(a) and N.contains(b) for a, b in pe.pairs):
            return False
        consts = [(M.zero, N.zero), (M.one, N.one)]
        unary = [(M.neg, N.neg)]
        binary = [(M.oplus, N.oplus), (M.otimes, N.otimes), (M.join, N.join), (M.meet, N.meet)]
    else:
        raise ValueError(f"unknown embedding kind {pe.kind!r}")
    for c_src, c_tgt in consts:
        if c_src in phi and phi[c_src] != c_tgt:
            return False
    dom = list(phi)
    for a in dom:
        for op_s, op_t in unary:
            r = op_s(a)
            if r in phi and phi[r] != op_t(phi[a]):
                return False
        for b in dom:
            if (a < b) != (phi[a] < phi[b]):
                return False
            for op_s, op_t in binary:
                r = op_s(a, b)
                if r in phi and phi[r] != op_t(phi[a], phi[b]):
                    return False
    return True


# -- lexicographic transfer ------------------------------------------------------------


@dataclass(frozen=True)
class LexTransferReport:
    ok: bool
    reason: str
    inner: Optional[PartialEmbedding] = None
    outer: Optional[PartialEmbedding] = None


def lex_transfer_check(
    C: Optional[LexChain],
    A: LexChain,
    B: LexChain,
    D: Optional[LexChain],
    F: Iterable[Element],
    budget: int,
    phi: Optional[Mapping[Element, Element]] = None,
) -> LexTransferReport:
    """Lift a partial embedding ``A -> B`` to ``C x| A x| D -> C x| B x| D``.

    ``F`` lives in ``C x| A x| D``; the middle projections of ``F`` are
    embedded (by ``phi`` when given, else by search) and the outer map
    ``<c, a, d> -> <c, phi(a), d>`` is verified directly.
    """
    outer_parts = [x for x in (C, A, D) if x is not None]
    src = lex_product(*outer_parts)
    tgt = lex_product(*[B if x is A else x for x in outer_parts])
    lo = C.dim if C is not None else 0
    hi = lo + A.dim
    F = [src.check(x) for x in F]
    middle = {x[lo:hi] for x in F}
    if phi is None:
        inner = find_partial_embedding(A, middle, B, budget)
        if inner is None:
            return LexTransferReport(False, "no embedding of the middle projection found")
    else:
        inner = PartialEmbedding(A, B, tuple((a, phi[a]) for a in sorted(middle)), "l")
    m = inner.mapping
    outer = PartialEmbedding(
        src, tgt, tuple((x, x[:lo] + m[x[lo:hi]] + x[hi:]) for x in sorted(set(F))), "l"
    )
    if not verify_partial_embedding(outer):
        return LexTransferReport(False, "lifted map is not a partial embedding", inner, outer)
    return LexTransferReport(True, "verified", inner, outer)


# -- universal classes ---------------------------------------------------------------


@dataclass(frozen=True)
class UClassPart:
    """Generators of one sign, given by magnitudes.

    ``D`` maps ``j`` to the set of ``d`` with generator ``Z_j x| Z_d``;
    ``flagged`` lists pairs whose class mod ``j`` meets no divisor of ``j``.
    """

    sign: str
    I: FrozenSet[int] = frozenset()
    D: Tuple[Tuple[int, FrozenSet[int]], ...] = ()
    K: FrozenSet[int] = frozenset()
    flagged: Tuple[Tuple[int, int], ...] = ()

    def render(self) -> str:
        def fmt(s):
            return "{" + ",".join(str(k) for k in sorted(s)) + "}"

        d = ",".join(f"{j}:[{','.join(str(x) for x in sorted(ds))}]" for j, ds in self.D)
        return f"U{self.sign}(I={fmt(self.I)}; D={{{d}}}; K={fmt(self.K)})"


@dataclass(frozen=True)
class UniversalClass:
    parts: Tuple[UClassPart, ...]

    @property
    def sign(self) -> str:
        signs = {p.sign for p in self.parts}
        return signs.pop() if len(signs) == 1 else "mixed"

    def __str__(self) -> str:
        return " & ".join(p.render() for p in self.parts)


_PART_RE = re.compile(r"\s*U([+-])\((.*)\)\s*", re.S)
_FIELD_RE = re.compile(r"\s*([IDK])\s*=\s*\{(.*?)\}\s*(?:;|$)", re.S)
_DENTRY_RE = re.compile(r"\s*(\d+)\s*:\s*\[([^\]]*)\]\s*")


def _ints(text: str) -> FrozenSet[int]:
    text = text.strip()
    return frozenset(int(t) for t in text.split(",")) if text else frozenset()


def parse_universal_class(text: str) -> UniversalClass:
    """``U+(I={2,3}; D={6:[1,2]}; K={1})``; join signs with ``&``."""
    parts = []
    for chunk in text.split("&"):
        m = _PART_RE.fullmatch(chunk)
        if m is None:
            raise ValueError(f"not a universal class: {chunk.strip()!r}")
        sign, body = m.groups()
        fields: Dict[str, str] = {}
        pos = 0
        body = body.strip()
        while pos < len(body):
            fm = _FIELD_RE.match(body, pos)
            if fm is None:
                raise ValueError(f"bad field near {body[pos:]!r}")
            if fm.group(1) in fields:
                raise ValueError(f"field {fm.group(1)} given twice")
            fields[fm.group(1)] = fm.group(2)
            pos = fm.end()
        dmap: Dict[int, FrozenSet[int]] = {}
        raw = fields.get("D", "").strip()
        if raw:
            for entry in re.split(r",(?![^\[]*\])", raw):
                em = _DENTRY_RE.fullmatch(entry)
                if em is None:
                    raise ValueError(f"bad D entry {entry!r}")
                j = int(em.group(1))
                dmap[j] = dmap.get(j, frozenset()) | _ints(em.group(2))
        for j, ds in dmap.items():
            if j < 1 or not ds:
                raise ValueError(f"D entry for {j} needs j >= 1 and a nonempty list")
        parts.append(
            UClassPart(
                sign,
                _ints(fields.get("I", "")),
                tuple(sorted(dmap.items())),
                _ints(fields.get("K", "")),
            )
        )
    return UniversalClass(tuple(parts))


def normalize_universal_class(u: UniversalClass) -> UniversalClass:
    """Reduce each ``d`` mod ``j`` into ``[1, j]``, keeping it when that lands on a divisor.

    ``Z_j x| Z_d`` and ``Z_j x| Z_(d+j)`` are isomorphic by a shear, so
    the reduction is exact.  Pairs whose residue is not a divisor are kept
    verbatim and flagged.  Parts of equal sign are merged.
    """
    merged: Dict[str, Dict[str, object]] = {}
    for part in u.parts:
        acc = merged.setdefault(part.sign, {"I": set(), "D": {}, "K": set(), "flag": set()})
        acc["I"] |= part.I
        acc["K"] |= part.K
        acc["flag"] |= set(part.flagged)
        for j, ds in part.D:
            for d in ds:
                r = d % j or j
                if j % r == 0:
                    acc["D"].setdefault(j, set()).add(r)
                else:
                    acc["D"].setdefault(j, set()).add(d)
                    acc["flag"].add((j, d))
    parts = []
    for sign in sorted(merged):
        acc = merged[sign]
        parts.append(
            UClassPart(
                sign,
                frozenset(acc["I"]),
                tuple(sorted((j, frozenset(ds)) for j, ds in acc["D"].items())),
                frozenset(acc["K"]),
                tuple(sorted(acc["flag"])),
            )
        )
    return UniversalClass(tuple(parts))


def universal_generators(u: UniversalClass) -> List[LexChain]:
    """``Z_i``, ``Z_j x| Z_d`` and ``S_k`` (the dense chain pointed by ``k``), signed per part."""
    out = []
    for part in u.parts:
        s = 1 if part.sign == "+" else -1
        out += [LexChain.of("Z", s * i) for i in sorted(part.I)]
        for j, ds in part.D:
            out += [LexChain.of("ZZ", s * j, s * d) for d in sorted(ds)]
        out += [LexChain.of("S", (s * k, 0)) for k in sorted(part.K)]
    return out


@dataclass(frozen=True)
class MemberResult:
    """``answer`` is ``"Yes"`` or ``"Unknown"``; each witness is ``(w, generator, embedding)``."""

    answer: str
    witnesses: Tuple[Tuple[int, LexChain, PartialEmbedding], ...] = ()
    failed_window: Optional[int] = None


def _image_radius(c: LexChain, g: LexChain, w: int) -> int:
    scale = max(c.magnitude(c.point), g.magnitude(g.point), 1)
    return 4 * (w + 1) * scale


def universal_member(c: LexChain, u: UniversalClass, budget: int) -> MemberResult:
    """Try to embed the windows ``[-w, w]`` of ``c`` (``w = 1..budget``) into generators.

    Each window may use a different generator.  ``Yes`` when every window
    succeeds; otherwise ``Unknown`` together with the first failing window.
    """
    gens = universal_generators(u)
    witnesses = []
    for w in range(1, budget + 1):
        F = list(c.window(w))
        found = None
        for g in gens:
            pe = find_partial_embedding(c, F, g, _image_radius(c, g, w))
            if pe is not None and verify_partial_embedding(pe):
                found = (w, g, pe)
                break
        if found is None:
            return MemberResult("Unknown", tuple(witnesses), w)
        witnesses.append(found)
    return MemberResult("Yes", tuple(witnesses))
