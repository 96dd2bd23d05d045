"""The equation families, an exhaustive bounded checker, and a closed-form oracle.

Every family is an equation ``t >= 0``.  The positive families are

* ``s-rank(n)``:  ``(n*x - f) v -x``
* ``rank(n)``:    ``((2n+1)*x - 2*f) v (f - (2n+2)*x) v -x``
* ``div(p,n)``:   ``((n+1)*|p*x - f| - f) v -x``
* ``mix(p,n)``:   ``((n+1)*|p*x - f| - f) v (n*y - f) v -y``

where ``|u|`` abbreviates ``u v -u``.  Each has a dual, written with a
``^d`` suffix (``div^d(3,6)``), which holds in a chain exactly when the
positive family holds in the chain with negated point.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .chain import Element, Generator, Kind, LexChain, classify, leading_index
from .terms import (
    Equation,
    F,
    Join,
    Meet,
    Neg,
    Scale,
    Term,
    Var,
    eval_term,
    free_vars,
    join_all,
    sub,
)

__all__ = [
    "Family",
    "CheckResult",
    "parse_family",
    "check_bruteforce",
    "check_oracle",
    "witness_bound",
    "read_fixtures",
    "GridTooLarge",
]

KINDS = ("s-rank", "rank", "div", "mix")
GRID_LIMIT = 10**9


class GridTooLarge(ValueError):
    """The requested search grid exceeds the safety limit."""


@dataclass(frozen=True)
class Family:
    """One member of an equation family; ``p`` is 0 for the p-less kinds."""

    kind: str
    n: int
    p: int = 0
    dual: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if self.kind in ("div", "mix"):
            if self.p < 1:
                raise ValueError("p must be >= 1")
        elif self.p != 0:
            raise ValueError(f"{self.kind} takes no p")

    def __str__(self) -> str:
        name = self.kind + ("^d" if self.dual else "")
        if self.kind in ("div", "mix"):
            return f"{name}({self.p},{self.n})"
        return f"{name}({self.n})"

    @property
    def positive(self) -> Family:
        return Family(self.kind, self.n, self.p, False)

    def swap_dual(self) -> Family:
        return Family(self.kind, self.n, self.p, not self.dual)

    def term(self) -> Term:
        x, y, f = Var("x"), Var("y"), F()
        n, p = self.n, self.p
        px = Scale(p, x)
        if not self.dual:
            abs_dist = Join(sub(px, f), sub(f, px))
            if self.kind == "s-rank":
                return Join(sub(Scale(n, x), f), Neg(x))
            if self.kind == "rank":
                return join_all(
                    sub(Scale(2 * n + 1, x), Scale(2, f)),
                    sub(f, Scale(2 * n + 2, x)),
                    Neg(x),
                )
            if self.kind == "div":
                return Join(sub(Scale(n + 1, abs_dist), f), Neg(x))
            return join_all(
                sub(Scale(n + 1, abs_dist), f), sub(Scale(n, y), f), Neg(y)
            )
        neg_dist = Meet(sub(px, f), sub(f, px))
        if self.kind == "s-rank":
            return Join(sub(f, Scale(n, x)), x)
        if self.kind == "rank":
            return join_all(
                sub(Scale(2, f), Scale(2 * n + 1, x)),
                sub(Scale(2 * n + 2, x), f),
                x,
            )
        if self.kind == "div":
            return Join(sub(f, Scale(n + 1, neg_dist)), x)
        return join_all(sub(f, Scale(n, y)), y, sub(f, Scale(n + 1, neg_dist)), x)

    def equation(self) -> Equation:
        return Equation(self.term())


_FAMILY_RE = re.compile(
    r"^\s*(s-rank|rank|div|mix)(\^d)?\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$"
)


def parse_family(text: str) -> Family:
    """``s-rank(4)``, ``rank^d(2)``, ``div(3,6)``, ``mix^d(1,2)``."""
    m = _FAMILY_RE.match(text)
    if m is None:
        raise ValueError(f"not a family: {text!r}")
    kind, dual, a, b = m.groups()
    if kind in ("div", "mix"):
        if b is None:
            raise ValueError(f"{kind} takes two arguments (p,n)")
        return Family(kind, int(b), int(a), bool(dual))
    if b is not None:
        raise ValueError(f"{kind} takes one argument")
    return Family(kind, int(a), 0, bool(dual))


@dataclass(frozen=True)
class CheckResult:
    """A verdict; ``witness`` is a falsifying assignment when ``valid`` is false.

    ``bound`` is the search radius for exhaustive checks (so a valid result
    means valid within that window) and ``None`` for exact verdicts.
    """

    valid: bool
    witness: Optional[Tuple[Tuple[str, Element], ...]] = None
    bound: Optional[int] = None

    @property
    def assignment(self) -> Dict[str, Element]:
        return dict(self.witness or ())


# -- exhaustive search ---------------------------------------------------------


def _joinands(t: Term) -> List[Term]:
    if isinstance(t, Join):
        return _joinands(t.left) + _joinands(t.right)
    return [t]


def _components(parts: Sequence[Term]) -> List[Tuple[Tuple[str, ...], Term]]:
    """Group joinands into blocks that share no variables."""
    blocks: List[Tuple[set, List[Term]]] = []
    for part in parts:
        vs = set(free_vars(part))
        merged_vars, merged_parts = set(vs), [part]
        keep = []
        for bvars, bparts in blocks:
            if bvars & vs:
                merged_vars |= bvars
                merged_parts = bparts + merged_parts
            else:
                keep.append((bvars, bparts))
        keep.append((merged_vars, merged_parts))
        blocks = keep
    out = []
    for bvars, bparts in blocks:
        term = join_all(*bparts)
        names = tuple(v for v in free_vars(term))
        out.append((names, term))
    out.sort(key=lambda nb: nb[0])
    return out


def _point_bound(c: LexChain) -> int:
    _, point = _kernels.slot_layout(c)
    return int(np.max(np.abs(point))) if point.size else 0


def _search_grid(c: LexChain, names: Tuple[str, ...], term: Term, bound: int):
    """Canonically first assignment in the window making ``term`` negative."""
    codes, point = _kernels.slot_layout(c)
    width = len(codes)
    dims = len(names) * width
    side = 2 * bound + 1
    total = side**dims
    if total > GRID_LIMIT:
        raise GridTooLarge(f"search grid of {total} points exceeds {GRID_LIMIT}")
    if _kernels.magnitude_bound(term, bound, _point_bound(c)) >= _kernels.MAGNITUDE_LIMIT:
        return _search_exact(c, names, term, bound)
    prog = _kernels.compile_term(term, names)
    best_key = None
    best_row = None
    chunk = 1 << 18
    shape = (side,) * dims
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.stack(np.unravel_index(idx, shape), axis=1).astype(np.int64) - bound
        signs = _kernels.eval_signs(prog, digits.reshape(-1, len(names), width), point, codes)
        hits = digits[signs < 0]
        if hits.shape[0] == 0:
            continue
        mags = np.abs(hits).sum(axis=1)
        low = hits[mags == mags.min()]
        # np.lexsort treats the last key as primary
        first = low[np.lexsort(low.T[::-1])[0]]
        key = (int(mags.min()), tuple(int(v) for v in first))
        if best_key is None or key < best_key:
            best_key, best_row = key, first
    if best_row is None:
        return None
    rows = best_row.reshape(len(names), width)
    return {nm: _kernels.slots_to_element(c, rows[i]) for i, nm in enumerate(names)}


def _search_exact(c: LexChain, names: Tuple[str, ...], term: Term, bound: int):
    """Pure-Python fallback for terms whose values could overflow int64."""
    window = sorted(c.window(bound), key=lambda e: (c.magnitude(e), _slot_tuple(e)))
    best = None
    for combo in itertools.product(window, repeat=len(names)):
        env = dict(zip(names, combo))
        if c.sign(eval_term(c, term, env)) < 0:
            key = (sum(c.magnitude(e) for e in combo), tuple(v for e in combo for v in _slot_tuple(e)))
            if best is None or key < best[0]:
                best = (key, env)
    return None if best is None else best[1]


def _slot_tuple(e: Element) -> Tuple[int, ...]:
    out = []
    for v in e:
        if isinstance(v, int):
            out.append(v)
        else:
            out.extend((v.a, v.b))
    return tuple(out)


def check_bruteforce(
    c: LexChain,
    eq: Union[Equation, Family],
    bound: int,
    decompose: bool = True,
) -> CheckResult:
    """Search every assignment with coordinates in ``[-bound, bound]``.

    With ``decompose`` the top-level joinands are split into blocks over
    disjoint variables; the join is negative exactly when every block is,
    so each block is searched on its own (much smaller) grid.  Returned
    witnesses are re-checked with the exact evaluator.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if isinstance(eq, Family):
        eq = eq.equation()
    t = eq.lhs
    if decompose:
        parts = _joinands(t)
        ground = [u for u in parts if not free_vars(u)]
        for u in ground:
            if c.sign(eval_term(c, u, {})) >= 0:
                return CheckResult(True, None, bound)
        blocks = _components([u for u in parts if free_vars(u)])
    else:
        names = free_vars(t)
        blocks = [(names, t)]
    witness: Dict[str, Element] = {}
    for names, term in blocks:
        if not names:
            if c.sign(eval_term(c, term, {})) >= 0:
                return CheckResult(True, None, bound)
            continue
        found = _search_grid(c, names, term, bound)
        if found is None:
            return CheckResult(True, None, bound)
        witness.update(found)
    order = free_vars(t)
    result = CheckResult(False, tuple((nm, witness[nm]) for nm in order), bound)
    if c.sign(eval_term(c, t, result.assignment)) >= 0:
        raise AssertionError(f"witness {result.witness} does not falsify {eq}")
    return result


# -- closed-form oracle --------------------------------------------------------


def _div_fails(m: int, p: int, n: int, lex: bool) -> bool:
    """For point ``m > 0``: is there a falsifying value of ``x``?

    On ``Z_m`` that needs an integer ``x >= 1`` with ``(n+1)|px - m| < m``;
    on ``Z_m x| Z_0`` some ``<a, b>`` with ``a >= 0`` and
    ``(n+1)|pa - m| <= m`` (the second coordinate breaks a tie).
    """
    q = m // p
    lo = 0 if lex else 1
    for a in (max(q, lo), max(q + 1, lo)):
        d = (n + 1) * abs(p * a - m)
        if d < m or (lex and d == m):
            return True
    return False


def _positive_valid(g: Generator, fam: Family) -> bool:
    if g.sign <= 0:
        return True
    if g.kind == "RPos":
        return False
    m, lex = g.n, g.kind == "ZnLexZ0"
    if fam.kind == "s-rank":
        return not lex and m <= fam.n
    if fam.kind == "rank":
        return m <= fam.n
    div_ok = not _div_fails(m, fam.p, fam.n, lex)
    if fam.kind == "div":
        return div_ok
    srank_ok = not lex and m <= fam.n
    return div_ok or srank_ok


def check_oracle(c: LexChain, fam: Family) -> CheckResult:
    """Exact verdict from the generator of the variety of ``c``.

    A chain and its canonical generator satisfy the same equations, and on
    the generators every family has a closed-form answer.  Duals are
    answered on the mirrored generator.
    """
    g = classify(c)
    if fam.dual:
        g = g.mirror()
    return CheckResult(_positive_valid(g, fam.positive))


def witness_bound(c: LexChain, fam: Family) -> int:
    """Search radius large enough for the counterexamples the oracle predicts."""
    try:
        i = leading_index(c)
    except ValueError:
        return 4
    lead = c.point[i]
    size = abs(lead) if c.kinds[i] is Kind.Z else abs(lead.a) + abs(lead.b)
    return 2 * (size + fam.n + fam.p + 2)


# -- fixtures ------------------------------------------------------------------


def read_fixtures(path: Union[str, Path]) -> List[Tuple[LexChain, Family, bool]]:
    """Rows ``chain ; family ; valid|invalid``; ``#`` starts a comment."""
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        chain_s, fam_s, verdict = (part.strip() for part in line.split(";"))
        if verdict.lower() not in ("valid", "invalid"):
            raise ValueError(f"bad verdict {verdict!r}")
        rows.append((LexChain.parse(chain_s), parse_family(fam_s), verdict.lower() == "valid"))
    return rows
