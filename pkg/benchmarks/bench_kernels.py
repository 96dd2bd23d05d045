"""Time the numba and numpy term-grid kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]

Each workload is one family term evaluated over a random grid of variable
assignments.  Both backends must return identical signs; the script exits
nonzero if they do not.
"""
import argparse
import sys
import time

import numpy as np

from plal import _kernels
from plal.chain import LexChain
from plal.equations import Family, check_bruteforce
from plal.terms import free_vars

WORKLOADS = [
    ("lex(Z)@(6)", Family("div", 6, 3)),
    ("lex(Z,Z)@(4,0)", Family("mix", 4, 2)),
    ("lex(Z,S)@(2,(1,-1))", Family("rank", 5)),
    ("lex(Z)@(-5)", Family("mix", 5, 4, dual=True)),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_grid(chain, fam, rows, repeat, rng):
    term = fam.term()
    names = free_vars(term)
    prog = _kernels.compile_term(term, names)
    codes, point = _kernels.slot_layout(chain)
    env = rng.integers(-24, 25, size=(rows, len(names), len(codes)), dtype=np.int64)
    res = {}
    for name in ("numpy", "numba"):
        if name == "numba" and not _kernels.HAVE_NUMBA:
            continue
        _kernels.use_backend(name)
        _kernels.eval_signs(prog, env[:64], point, codes)  # warm-up / JIT compile
        res[name] = best_of(lambda: _kernels.eval_signs(prog, env, point, codes), repeat)
    return res


def bench_search(chain, fam, bound, repeat):
    res = {}
    for name in ("numpy", "numba"):
        if name == "numba" and not _kernels.HAVE_NUMBA:
            continue
        _kernels.use_backend(name)
        check_bruteforce(chain, fam, 2)
        res[name] = best_of(lambda: check_bruteforce(chain, fam, bound).valid, repeat)
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--bound", type=int, default=64, help="search bound for the end-to-end rows")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)

    rng = np.random.default_rng(a.seed)
    prev = _kernels.backend()
    mismatch = False
    print(f"numba available: {_kernels.HAVE_NUMBA}; rows={a.rows} repeat={a.repeat}")
    print(f"{'workload':44s} {'numpy s':>9s} {'numba s':>9s} {'speedup':>8s}")
    try:
        for text, fam in WORKLOADS:
            c = LexChain.parse(text)
            for label, res in (
                (f"grid {fam} @ {text}", bench_grid(c, fam, a.rows, a.repeat, rng)),
                (f"search {fam} @ {text} B={a.bound}", bench_search(c, fam, a.bound, a.repeat)),
            ):
                t_np, out_np = res["numpy"]
                if "numba" in res:
                    t_nb, out_nb = res["numba"]
                    same = np.array_equal(np.asarray(out_np), np.asarray(out_nb))
                    mismatch |= not same
                    flag = "" if same else "  MISMATCH"
                    print(f"{label:44s} {t_np:9.4f} {t_nb:9.4f} {t_np / t_nb:7.1f}x{flag}")
                else:
                    print(f"{label:44s} {t_np:9.4f} {'-':>9s} {'-':>8s}")
    finally:
        _kernels.use_backend(prev)
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
