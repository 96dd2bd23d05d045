"""Batch term evaluation over integer grids.

Terms are compiled to a small postfix program and evaluated for many
assignments at once.  Each element of a chain is laid out as a row of
int64 *slots*: one slot per Z coordinate and two slots ``(a, b)`` per S
coordinate.  Only the sign of the final value is returned.

Two interchangeable backends exist.  The numba one is compiled on first
use; the numpy one is vectorised over rows.  ``PLAL_KERNEL`` selects one
(``numba`` or ``numpy``); by default numba is used when importable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .chain import Kind, LexChain, Sqrt2
from .terms import Add, F, Join, Meet, Neg, Scale, Term, Var, Zero

OP_VAR, OP_ZERO, OP_F, OP_ADD, OP_NEG, OP_SCALE, OP_JOIN, OP_MEET = range(8)

# slot codes: a Z coordinate, the rational part of an S coordinate, its sqrt(2) part
SLOT_Z, SLOT_SA, SLOT_SB = 0, 1, 2

# |values| must stay below this so that a*a and 2*b*b fit in int64
MAGNITUDE_LIMIT = 1 << 30

try:  # pragma: no cover - exercised implicitly when numba is present
    import numba
    from numba import njit, prange

    # the bundled TBB is often too old and numba warns while probing it
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


@dataclass(frozen=True)
class Program:
    """Postfix code for one term; ``args`` holds variable indices and scale factors."""

    ops: np.ndarray
    args: np.ndarray
    depth: int
    var_names: Tuple[str, ...]


def compile_term(t: Term, var_names: Sequence[str]) -> Program:
    index = {name: i for i, name in enumerate(var_names)}
    ops, args = [], []
    depth = 0
    max_depth = 0

    def emit(op: int, arg: int, delta: int) -> None:
        nonlocal depth, max_depth
        ops.append(op)
        args.append(arg)
        depth += delta
        max_depth = max(max_depth, depth)

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            emit(OP_VAR, index[u.name], 1)
        elif isinstance(u, Zero):
            emit(OP_ZERO, 0, 1)
        elif isinstance(u, F):
            emit(OP_F, 0, 1)
        elif isinstance(u, Neg):
            walk(u.arg)
            emit(OP_NEG, 0, 0)
        elif isinstance(u, Scale):
            walk(u.arg)
            emit(OP_SCALE, u.k, 0)
        else:
            walk(u.left)
            walk(u.right)
            op = {Add: OP_ADD, Join: OP_JOIN, Meet: OP_MEET}[type(u)]
            emit(op, 0, -1)

    walk(t)
    return Program(
        np.asarray(ops, dtype=np.int64),
        np.asarray(args, dtype=np.int64),
        max(max_depth, 1),
        tuple(var_names),
    )


def magnitude_bound(t: Term, var_bound: int, point_bound: int) -> int:
    """Upper bound on any slot magnitude reached while evaluating ``t``."""
    if isinstance(t, Var):
        return var_bound
    if isinstance(t, Zero):
        return 0
    if isinstance(t, F):
        return point_bound
    if isinstance(t, Neg):
        return magnitude_bound(t.arg, var_bound, point_bound)
    if isinstance(t, Scale):
        return abs(t.k) * magnitude_bound(t.arg, var_bound, point_bound)
    # the sqrt(2) sign test also sees differences of two operands
    a = magnitude_bound(t.left, var_bound, point_bound)
    b = magnitude_bound(t.right, var_bound, point_bound)
    return a + b


def slot_layout(c: LexChain) -> Tuple[np.ndarray, np.ndarray]:
    """Slot codes and the point as a slot row."""
    codes, point = [], []
    for kind, v in zip(c.kinds, c.point):
        if kind is Kind.Z:
            codes.append(SLOT_Z)
            point.append(v)
        else:
            codes.extend((SLOT_SA, SLOT_SB))
            point.extend((v.a, v.b))
    return np.asarray(codes, dtype=np.int64), np.asarray(point, dtype=np.int64)


def slots_to_element(c: LexChain, row: Sequence[int]) -> tuple:
    out, i = [], 0
    for kind in c.kinds:
        if kind is Kind.Z:
            out.append(int(row[i]))
            i += 1
        else:
            out.append(Sqrt2(int(row[i]), int(row[i + 1])))
            i += 2
    return tuple(out)


# -- numpy backend -------------------------------------------------------------


def _np_sign(v: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Lexicographic sign of every row of ``v`` (shape ``(N, W)``)."""
    n = v.shape[0]
    coord_signs = []
    w = 0
    while w < len(codes):
        if codes[w] == SLOT_Z:
            coord_signs.append(np.sign(v[:, w]))
            w += 1
        else:
            a, b = v[:, w], v[:, w + 1]
            s = np.where(
                (a >= 0) & (b >= 0),
                ((a != 0) | (b != 0)).astype(np.int64),
                np.where(
                    (a <= 0) & (b <= 0),
                    -1,
                    np.where(a > 0, np.where(a * a > 2 * b * b, 1, -1), np.where(2 * b * b > a * a, 1, -1)),
                ),
            )
            coord_signs.append(s)
            w += 2
    if not coord_signs:
        return np.zeros(n, dtype=np.int64)
    s = np.stack(coord_signs, axis=1)
    first = np.argmax(s != 0, axis=1)
    return s[np.arange(n), first]


def _np_eval(ops, args, env, point, codes) -> np.ndarray:
    n, _, width = env.shape
    stack = []
    for op, arg in zip(ops.tolist(), args.tolist()):
        if op == OP_VAR:
            stack.append(env[:, arg, :])
        elif op == OP_ZERO:
            stack.append(np.zeros((n, width), dtype=np.int64))
        elif op == OP_F:
            stack.append(np.broadcast_to(point, (n, width)))
        elif op == OP_NEG:
            stack.append(-stack.pop())
        elif op == OP_SCALE:
            stack.append(arg * stack.pop())
        else:
            y = stack.pop()
            x = stack.pop()
            if op == OP_ADD:
                stack.append(x + y)
            else:
                gt = _np_sign(x - y, codes) > 0
                pick_x = gt if op == OP_JOIN else ~gt
                stack.append(np.where(pick_x[:, None], x, y))
    return _np_sign(stack.pop(), codes)


# -- numba backend -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_sqrt2_sign(a, b):
        if a >= 0 and b >= 0:
            return 1 if (a != 0 or b != 0) else 0
        if a <= 0 and b <= 0:
            return -1
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    @njit(cache=True)
    def _nb_cmp(stack, i, j, codes):
        w = 0
        width = codes.shape[0]
        while w < width:
            if codes[w] == 0:
                d = stack[i, w] - stack[j, w]
                if d != 0:
                    return 1 if d > 0 else -1
                w += 1
            else:
                s = _nb_sqrt2_sign(stack[i, w] - stack[j, w], stack[i, w + 1] - stack[j, w + 1])
                if s != 0:
                    return s
                w += 2
        return 0

    @njit(cache=True)
    def _nb_sign_row(stack, i, codes):
        w = 0
        width = codes.shape[0]
        while w < width:
            if codes[w] == 0:
                if stack[i, w] != 0:
                    return 1 if stack[i, w] > 0 else -1
                w += 1
            else:
                s = _nb_sqrt2_sign(stack[i, w], stack[i, w + 1])
                if s != 0:
                    return s
                w += 2
        return 0

    @njit(cache=True)
    def _nb_eval_block(ops, args, env, point, codes, depth, lo, hi, out):
        width = codes.shape[0]
        stack = np.empty((depth, width), dtype=np.int64)
        nops = ops.shape[0]
        for r in range(lo, hi):
            sp = 0
            for k in range(nops):
                op = ops[k]
                if op == 0:
                    for w in range(width):
                        stack[sp, w] = env[r, args[k], w]
                    sp += 1
                elif op == 1:
                    for w in range(width):
                        stack[sp, w] = 0
                    sp += 1
                elif op == 2:
                    for w in range(width):
                        stack[sp, w] = point[w]
                    sp += 1
                elif op == 3:
                    for w in range(width):
                        stack[sp - 2, w] += stack[sp - 1, w]
                    sp -= 1
                elif op == 4:
                    for w in range(width):
                        stack[sp - 1, w] = -stack[sp - 1, w]
                elif op == 5:
                    for w in range(width):
                        stack[sp - 1, w] *= args[k]
                else:
                    c = _nb_cmp(stack, sp - 2, sp - 1, codes)
                    take_right = c < 0 if op == 6 else c > 0
                    if take_right:
                        for w in range(width):
                            stack[sp - 2, w] = stack[sp - 1, w]
                    sp -= 1
            out[r] = _nb_sign_row(stack, 0, codes)

    @njit(cache=True, parallel=True)
    def _nb_eval(ops, args, env, point, codes, depth, block):
        n = env.shape[0]
        out = np.empty(n, dtype=np.int64)
        nblocks = (n + block - 1) // block
        for b in prange(nblocks):
            lo = b * block
            hi = min(n, lo + block)
            _nb_eval_block(ops, args, env, point, codes, depth, lo, hi, out)
        return out


def _default_backend() -> str:
    want = os.environ.get("PLAL_KERNEL", "").strip().lower()
    if want in ("numba", "numpy"):
        if want == "numba" and not HAVE_NUMBA:
            return "numpy"
        return want
    return "numba" if HAVE_NUMBA else "numpy"


_backend = _default_backend()


def backend() -> str:
    return _backend


def use_backend(name: str) -> str:
    """Switch backend at runtime; returns the previous one."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev


def _configure_threads() -> None:
    raw = os.environ.get("PLAL_THREADS")
    if HAVE_NUMBA and raw:
        try:
            numba.set_num_threads(max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass


_configure_threads()


def eval_signs(prog: Program, env: np.ndarray, point: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Sign (-1, 0, 1) of the term value for each row of ``env`` (shape ``(N, nvars, W)``)."""
    env = np.ascontiguousarray(env, dtype=np.int64)
    if _backend == "numba":
        return _nb_eval(prog.ops, prog.args, env, point, codes, prog.depth, 4096)
    return _np_eval(prog.ops, prog.args, env, point, codes)
