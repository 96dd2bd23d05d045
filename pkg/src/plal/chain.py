"""Exact lexicographic-product chains over Z and Z[sqrt 2].

A chain is a finite lexicographic product of base chains, each either the
integers ``Z`` or the dense group ``S = Z[sqrt 2]``, together with a
distinguished point (the interpretation of the constant ``f``).  Elements
are plain tuples with one entry per coordinate: ``int`` for ``Z``
coordinates and :class:`Sqrt2` for ``S`` coordinates.  Python's tuple
comparison is exactly the lexicographic order, so the lattice operations
come for free once every coordinate type is totally ordered.
"""
from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, Optional, Tuple, Union

import numpy as np

__all__ = [
    "ChainError",
    "ChainSyntaxError",
    "Kind",
    "Sqrt2",
    "Ordering",
    "LexChain",
    "ShiftIso",
    "parse_chain",
    "format_element",
    "strongly_pointed_part",
    "p_radical",
    "rank",
    "is_p_simple",
    "shift_normalize",
    "leading_index",
    "Generator",
    "classify",
    "lex_product",
]


class ChainError(ValueError):
    """Raised on malformed chains, foreign elements or violated preconditions."""


class ChainSyntaxError(ChainError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class Kind(enum.Enum):
    Z = "Z"
    S = "S"

    def __str__(self) -> str:
        return self.value


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _sqrt2_sign(a: int, b: int) -> int:
    """Sign of ``a + b*sqrt(2)`` using integer arithmetic only."""
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1
    # opposite signs; a*a == 2*b*b has no nonzero solution
    if a > 0:
        return 1 if a * a > 2 * b * b else -1
    return 1 if 2 * b * b > a * a else -1


@total_ordering
@dataclass(frozen=True)
class Sqrt2:
    """The number ``a + b*sqrt(2)`` with integer ``a`` and ``b``."""

    a: int
    b: int = 0

    def sign(self) -> int:
        return _sqrt2_sign(self.a, self.b)

    def __add__(self, other: Sqrt2) -> Sqrt2:
        if not isinstance(other, Sqrt2):
            return NotImplemented
        return Sqrt2(self.a + other.a, self.b + other.b)

    def __sub__(self, other: Sqrt2) -> Sqrt2:
        if not isinstance(other, Sqrt2):
            return NotImplemented
        return Sqrt2(self.a - other.a, self.b - other.b)

    def __neg__(self) -> Sqrt2:
        return Sqrt2(-self.a, -self.b)

    def __mul__(self, k: int) -> Sqrt2:
        if not isinstance(k, int):
            return NotImplemented
        return Sqrt2(k * self.a, k * self.b)

    __rmul__ = __mul__

    def __lt__(self, other: Sqrt2) -> bool:
        if not isinstance(other, Sqrt2):
            return NotImplemented
        return _sqrt2_sign(self.a - other.a, self.b - other.b) < 0

    def __abs__(self) -> Sqrt2:
        return -self if self.sign() < 0 else self

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


BaseValue = Union[int, Sqrt2]
Element = Tuple[BaseValue, ...]


def _zero_of(kind: Kind) -> BaseValue:
    return 0 if kind is Kind.Z else Sqrt2(0, 0)


def _value_ok(kind: Kind, v: object) -> bool:
    if kind is Kind.Z:
        return isinstance(v, int) and not isinstance(v, bool)
    return isinstance(v, Sqrt2)


def _coord_magnitude(v: BaseValue) -> int:
    if isinstance(v, Sqrt2):
        return abs(v.a) + abs(v.b)
    return abs(v)


@dataclass(frozen=True)
class LexChain:
    """A pointed chain ``K1 x| K2 x| ... x| Kd`` with point ``point``."""

    kinds: Tuple[Kind, ...]
    point: Element

    def __post_init__(self) -> None:
        if not self.kinds:
            raise ChainError("a chain needs at least one coordinate")
        if len(self.point) != len(self.kinds):
            raise ChainError(
                f"point has {len(self.point)} coordinates, chain has {len(self.kinds)}"
            )
        for kind, v in zip(self.kinds, self.point):
            if not _value_ok(kind, v):
                raise ChainError(f"point coordinate {v!r} does not belong to {kind}")

    @classmethod
    def of(cls, kinds: str, *point) -> LexChain:
        """Shorthand: ``LexChain.of("ZZ", 4, 0)``; S coordinates take ``(a, b)`` pairs."""
        ks = tuple(Kind(ch) for ch in kinds)
        pt = tuple(
            Sqrt2(*p) if k is Kind.S and not isinstance(p, Sqrt2) else p
            for k, p in zip(ks, point)
        )
        return cls(ks, pt)

    @classmethod
    def parse(cls, text: str) -> LexChain:
        return parse_chain(text)

    @property
    def dim(self) -> int:
        return len(self.kinds)

    def __str__(self) -> str:
        kinds = ",".join(k.value for k in self.kinds)
        pts = ",".join(str(v) for v in self.point)
        return f"lex({kinds})@({pts})"

    # -- elements ---------------------------------------------------------

    def zero(self) -> Element:
        return tuple(_zero_of(k) for k in self.kinds)

    def contains(self, x: object) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == len(self.kinds)
            and all(_value_ok(k, v) for k, v in zip(self.kinds, x))
        )

    def check(self, x: object) -> Element:
        if not isinstance(x, tuple) or len(x) != len(self.kinds):
            raise ChainError(f"dimension mismatch: {x!r} is not an element of {self}")
        if not all(_value_ok(k, v) for k, v in zip(self.kinds, x)):
            raise ChainError(f"{x!r} is not an element of {self}")
        return x

    def element(self, *coords) -> Element:
        """Build an element, accepting ``(a, b)`` pairs for S coordinates."""
        return self.check(
            tuple(
                Sqrt2(*c) if k is Kind.S and not isinstance(c, Sqrt2) else c
                for k, c in zip(self.kinds, coords)
            )
            if len(coords) == len(self.kinds)
            else coords
        )

    # -- operations -------------------------------------------------------

    def cmp(self, x: Element, y: Element) -> Ordering:
        self.check(x)
        self.check(y)
        return Ordering((x > y) - (x < y))

    def sign(self, x: Element) -> int:
        return int(self.cmp(x, self.zero()))

    def add(self, x: Element, y: Element) -> Element:
        self.check(x)
        self.check(y)
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x: Element) -> Element:
        self.check(x)
        return tuple(-a for a in x)

    def sub(self, x: Element, y: Element) -> Element:
        return self.add(x, self.neg(y))

    def scale(self, k: int, x: Element) -> Element:
        self.check(x)
        return tuple(k * a for a in x)

    def join(self, x: Element, y: Element) -> Element:
        return y if self.cmp(x, y) < 0 else x

    def meet(self, x: Element, y: Element) -> Element:
        return y if self.cmp(x, y) > 0 else x

    def magnitude(self, x: Element) -> int:
        """Total coordinate magnitude (``|a| + |b|`` for S coordinates)."""
        return sum(_coord_magnitude(v) for v in x)

    def window(self, w: int) -> Iterator[Element]:
        """All elements whose integer coordinates lie in ``[-w, w]``."""
        rng = range(-w, w + 1)
        per_coord = [
            list(rng) if k is Kind.Z else [Sqrt2(a, b) for a in rng for b in rng]
            for k in self.kinds
        ]
        return itertools.product(*per_coord)

    def mirror(self) -> LexChain:
        """The same chain with negated point (``x -> -x`` is an anti-automorphism)."""
        return LexChain(self.kinds, tuple(-v for v in self.point))

    def is_strongly_pointed(self) -> bool:
        return _is_nonzero(self.point[0])


def _is_nonzero(v: BaseValue) -> bool:
    return v.sign() != 0 if isinstance(v, Sqrt2) else v != 0


def lex_product(*chains: LexChain) -> LexChain:
    """Lexicographic product of pointed chains; points are concatenated."""
    kinds: Tuple[Kind, ...] = ()
    point: Element = ()
    for c in chains:
        kinds += c.kinds
        point += c.point
    return LexChain(kinds, point)


def format_element(x: Element) -> str:
    """Render an element in chain-literal point syntax."""
    parts = [str(v) for v in x]
    if len(parts) == 1:
        return parts[0]
    return "(" + ",".join(parts) + ")"


# -- literal grammar -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(lex)|(-?\d+)|([ZS])|(.))")


def parse_chain(text: str) -> LexChain:
    """Parse ``lex(Z,S)@(4,(1,0))`` style literals."""
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            toks.append(("lex", "lex", start))
        elif m.group(2):
            toks.append(("int", int(m.group(2)), start))
        elif m.group(3):
            toks.append(("kind", m.group(3), start))
        elif m.group(4):
            if m.group(4).isspace():
                pos = m.end()
                continue
            toks.append(("sym", m.group(4), start))
        pos = m.end()
    toks.append(("eof", None, len(text)))
    i = 0

    def expect(kind, value=None):
        nonlocal i
        tk = toks[i]
        if tk[0] != kind or (value is not None and tk[1] != value):
            want = value if value is not None else kind
            raise ChainSyntaxError(f"expected {want!r}", tk[2])
        i += 1
        return tk[1]

    expect("lex")
    expect("sym", "(")
    kinds = [Kind(expect("kind"))]
    while toks[i][:2] == ("sym", ","):
        i += 1
        kinds.append(Kind(expect("kind")))
    expect("sym", ")")
    expect("sym", "@")
    expect("sym", "(")
    points = []
    while True:
        if toks[i][:2] == ("sym", "("):
            i += 1
            a = expect("int")
            expect("sym", ",")
            b = expect("int")
            expect("sym", ")")
            points.append(Sqrt2(a, b))
        else:
            points.append(expect("int"))
        if toks[i][:2] == ("sym", ","):
            i += 1
            continue
        break
    expect("sym", ")")
    expect("eof")
    if len(points) != len(kinds):
        raise ChainSyntaxError(
            f"{len(kinds)} kinds but {len(points)} point coordinates", toks[i - 1][2]
        )
    return LexChain(tuple(kinds), tuple(points))


# -- structure ---------------------------------------------------------------


def leading_index(c: LexChain) -> int:
    """Index of the first nonzero point coordinate; ChainError if the point is 0."""
    for i, v in enumerate(c.point):
        if _is_nonzero(v):
            return i
    raise ChainError(f"{c} is 0-pointed")


def strongly_pointed_part(c: LexChain) -> LexChain:
    """The smallest convex subgroup containing the point, pointed by it."""
    i = leading_index(c)
    return LexChain(c.kinds[i:], c.point[i:])


def p_radical(c: LexChain) -> Optional[LexChain]:
    """Maximal convex ideal avoiding the point, or ``None`` when it is trivial.

    The radical keeps the truncated point vector, so that the chain
    decomposes as ``quotient x| radical``.
    """
    i = leading_index(c)
    if i + 1 == c.dim:
        return None
    return LexChain(c.kinds[i + 1 :], c.point[i + 1 :])


def is_p_simple(c: LexChain) -> bool:
    return leading_index(c) == c.dim - 1


def rank(c: LexChain) -> Union[int, float]:
    """0, a nonzero integer, or +-inf when the quotient is dense."""
    try:
        i = leading_index(c)
    except ChainError:
        return 0
    lead = c.point[i]
    if c.kinds[i] is Kind.Z:
        return lead
    return math.inf if lead.sign() > 0 else -math.inf


@dataclass(frozen=True)
class Generator:
    """Canonical generator of the variety generated by a chain.

    ``kind`` is one of ``Z0``, ``Zn``, ``ZnLexZ0``, ``RPos``, ``RNeg``;
    ``n`` is the rank for the two integer kinds and 0 otherwise.
    """

    kind: str
    n: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Z0", "Zn", "ZnLexZ0", "RPos", "RNeg"):
            raise ChainError(f"unknown generator kind {self.kind!r}")
        if self.kind in ("Zn", "ZnLexZ0") and self.n == 0:
            raise ChainError(f"{self.kind} needs a nonzero rank")

    def __str__(self) -> str:
        return f"{self.kind}({self.n})" if self.kind in ("Zn", "ZnLexZ0") else self.kind

    @property
    def sign(self) -> int:
        if self.kind == "Z0":
            return 0
        if self.kind == "RPos":
            return 1
        if self.kind == "RNeg":
            return -1
        return 1 if self.n > 0 else -1

    def mirror(self) -> Generator:
        flip = {"RPos": "RNeg", "RNeg": "RPos"}
        if self.kind in flip:
            return Generator(flip[self.kind])
        return Generator(self.kind, -self.n)

    def chain(self) -> LexChain:
        if self.kind == "Z0":
            return LexChain.of("Z", 0)
        if self.kind == "Zn":
            return LexChain.of("Z", self.n)
        if self.kind == "ZnLexZ0":
            return LexChain.of("ZZ", self.n, 0)
        return LexChain.of("S", (1 if self.kind == "RPos" else -1, 0))


def classify(c: LexChain) -> Generator:
    """Which canonical chain generates the same variety as ``c``."""
    r = rank(c)
    if r == 0:
        return Generator("Z0")
    if isinstance(r, float):
        return Generator("RPos" if r > 0 else "RNeg")
    return Generator("Zn" if is_p_simple(c) else "ZnLexZ0", r)


@dataclass(frozen=True)
class ShiftIso:
    """The shear ``<x, y> -> <x, y + t*x>`` between two Z x| Z chains."""

    t: int

    def __call__(self, e: Element) -> Element:
        x, y = e
        return (x, y + self.t * x)

    def inverse(self) -> ShiftIso:
        return ShiftIso(-self.t)


def shift_normalize(c: LexChain) -> Tuple[LexChain, ShiftIso]:
    """Reduce the point ``<a, k>`` of a Z x| Z chain to ``<a, k mod |a|>``."""
    if c.kinds != (Kind.Z, Kind.Z):
        raise ChainError(f"shift normalization needs a Z x| Z chain, got {c}")
    a, k = c.point
    if a == 0:
        raise ChainError("shift normalization needs a nonzero leading point coordinate")
    k2 = k % abs(a)
    t = (k2 - k) // a
    iso = ShiftIso(t)
    return LexChain(c.kinds, iso(c.point)), iso


def verify_shift_window(src: LexChain, dst: LexChain, iso: ShiftIso, w: int) -> bool:
    """Check on the square window ``[-w, w]^2`` that ``iso`` is an isomorphism.

    Injectivity, 0, point, negation, every in-window sum, and strict order
    preservation are all checked; order is checked on the sorted window,
    which for total orders is equivalent to checking every pair.
    """
    if src.kinds != (Kind.Z, Kind.Z) or dst.kinds != (Kind.Z, Kind.Z):
        raise ChainError("window verification is for Z x| Z chains")
    if iso(src.point) != dst.point or iso((0, 0)) != (0, 0):
        return False
    r = np.arange(-w, w + 1, dtype=np.int64)
    xs, ys = np.meshgrid(r, r, indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    ix, iy = xs, ys + iso.t * xs
    # injective: the inverse shear recovers the input
    if not (np.array_equal(iy - iso.t * ix, ys)):
        return False
    # negation commutes with a linear map; check anyway
    if not (np.array_equal(-iy, (-ys) + iso.t * (-xs))):
        return False
    # additivity on every pair whose sum stays in the window
    sx = xs[:, None] + xs[None, :]
    sy = ys[:, None] + ys[None, :]
    inside = (np.abs(sx) <= w) & (np.abs(sy) <= w)
    lhs = sy + iso.t * sx
    rhs = iy[:, None] + iy[None, :]
    if not np.array_equal(lhs[inside], rhs[inside]):
        return False
    # xs, ys are already in lexicographic order; images must be strictly increasing
    dx = np.diff(ix)
    dy = np.diff(iy)
    return bool(np.all((dx > 0) | ((dx == 0) & (dy > 0))))
