"""Acceptance suite: nine desk-scale checks, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines, or
directly with ``python3 tests/test_acceptance.py``.
"""
import itertools
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from _support import l_embedding_ok, mv_embedding_ok  # noqa: E402
from plal.chain import Generator, Kind, LexChain, shift_normalize, verify_shift_window  # noqa: E402
from plal.embeddings import find_mv_partial_embedding, find_partial_embedding  # noqa: E402
from plal.equations import Family, check_bruteforce, check_oracle, witness_bound  # noqa: E402
from plal.mundici import (  # noqa: E402
    check_mv_axioms,
    gamma,
    gamma_inverse_finite,
    gamma_partial_embedding_transfer,
    udecompose,
)
from plal.varieties import (  # noqa: E402
    TRIVIAL,
    axioms_VIJ,
    axioms_Zn,
    div_closed_subsets,
    div_closure,
    enumerate_lattice,
    export_dot,
    generated_by,
    induced_covers,
    join_irreducibles,
)

GOLDEN = Path(__file__).parent / "golden"


def report(n: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


def Z(m):
    return LexChain.of("Z", m)


def ZZ0(m):
    return LexChain.of("ZZ", m, 0)


S1 = LexChain.of("S", (1, 0))


def grid_chains():
    return [c for m in range(-8, 9) for c in (Z(m), ZZ0(m))]


def grid_families():
    out = []
    for dual in (False, True):
        for n in range(0, 9):
            out += [Family("s-rank", n, 0, dual), Family("rank", n, 0, dual)]
            for p in range(1, 9):
                out += [Family("div", n, p, dual), Family("mix", n, p, dual)]
    return out


# -- 1 ---------------------------------------------------------------------------------


def test_oracle_bruteforce_concordance():
    start = time.perf_counter()
    cases, bad = 0, []
    for c in grid_chains():
        for fam in grid_families():
            o = check_oracle(c, fam).valid
            b = check_bruteforce(c, fam, witness_bound(c, fam)).valid
            cases += 1
            if o != b:
                bad.append((str(c), str(fam), o, b))
    secs = time.perf_counter() - start
    report(1, not bad and secs < 300, f"{cases} cases, {len(bad)} disagreements, {secs:.1f}s {bad[:3]}")


# -- 2 ---------------------------------------------------------------------------------


def test_mix_is_disjunction():
    cases, bad = 0, []
    for c in grid_chains():
        for dual in (False, True):
            for n in range(0, 9):
                s = check_oracle(c, Family("s-rank", n, 0, dual)).valid
                for p in range(1, 9):
                    d = check_oracle(c, Family("div", n, p, dual)).valid
                    m = check_oracle(c, Family("mix", n, p, dual)).valid
                    cases += 1
                    if m != (s or d):
                        bad.append((str(c), n, p, dual))
    report(2, not bad, f"{cases} cases, {len(bad)} exceptions {bad[:3]}")


# -- 3 ---------------------------------------------------------------------------------


def _in_VIJ(c, I, J):
    """Membership of a canonical chain read straight off the index sets."""
    if c == S1:
        return False
    m = c.point[0]
    return m in (J if c.dim == 2 else I)


def test_basis_sound_and_complete():
    subsets = div_closed_subsets(6)
    canon = [c for m in range(1, 13) for c in (Z(m), ZZ0(m))] + [S1]
    pairs, bad = 0, []
    for I in subsets:
        for J in subsets:
            if not J <= I:
                continue
            pairs += 1
            axs = axioms_VIJ(I, J)
            gens = [Z(i) for i in I] + [ZZ0(j) for j in J]
            for g in gens:
                if not all(check_oracle(g, f).valid for f in axs):
                    bad.append(("unsound", sorted(I), sorted(J), str(g)))
            for c in canon:
                if not _in_VIJ(c, I, J) and all(check_oracle(c, f).valid for f in axs):
                    bad.append(("incomplete", sorted(I), sorted(J), str(c)))
    report(3, not bad, f"{pairs} index pairs, {len(bad)} exceptions {bad[:3]}")


# -- 4 ---------------------------------------------------------------------------------


def test_two_bases_agree():
    bad, checked = [], 0
    for n in range(1, 9):
        a1, a2 = axioms_Zn(n), axioms_VIJ(div_closure([n]), ())
        chains = [c for m in range(-2 * n, 2 * n + 1) for c in (Z(m), ZZ0(m))]
        chains += [S1, LexChain.of("S", (-1, 0))]
        for c in chains:
            checked += 1
            v1 = all(check_oracle(c, f).valid for f in a1)
            v2 = all(check_oracle(c, f).valid for f in a2)
            if v1 != v2:
                bad.append((n, str(c)))
    report(4, not bad, f"{checked} chain checks, {len(bad)} discrepancies {bad[:3]}")


# -- 5 ---------------------------------------------------------------------------------


def test_gamma_correctness():
    bad = []
    for n in range(1, 13):
        if not check_mv_axioms(gamma(Z(n))).ok:
            bad.append(("axioms", n))
        if gamma_inverse_finite(gamma(Z(n))).chain != Z(n):
            bad.append(("round trip", n))
    for m in range(1, 13):
        M = gamma(Z(m))
        for n in range(1, 13):
            N = gamma(Z(n))
            pe = find_mv_partial_embedding(M, M.elements(), N)
            if pe is not None and not mv_embedding_ok((m,), (n,), pe.mapping):
                bad.append(("bad map", m, n))
            if (pe is not None) != (n % m == 0):
                bad.append(("divisibility", m, n))
    report(5, not bad, f"n <= 12, {len(bad)} failures {bad[:3]}")


# -- 6 ---------------------------------------------------------------------------------

TRANSFER_TRIPLES = [
    (Z(1), Z(1), [(0,), (1,), (2,), (-1,)]),
    (Z(1), Z(3), [(0,), (1,), (-2,), (4,)]),
    (Z(2), Z(2), [(0,), (1,), (2,), (3,), (-5,)]),
    (Z(2), Z(4), [(0,), (1,), (2,), (3,)]),
    (Z(2), Z(6), [(1,), (5,), (-3,), (7,)]),
    (Z(3), Z(6), [(0,), (1,), (2,), (3,), (4,), (-1,)]),
    (Z(3), Z(3), [(2,), (7,), (-8,)]),
    (Z(1), Z(5), [(0,), (1,), (3,), (-4,), (6,)]),
    (Z(5), Z(5), [(1,), (2,), (4,), (9,), (-6,)]),
    (Z(6), Z(6), [(0,), (1,), (5,), (6,), (13,), (-7,)]),
    (Z(2), ZZ0(4), [(0,), (1,), (2,), (-3,)]),
    (Z(3), ZZ0(3), [(1,), (2,), (4,), (-5,)]),
    (Z(1), ZZ0(2), [(0,), (1,), (3,)]),
    (ZZ0(1), ZZ0(1), [(0, 0), (0, 1), (1, -2), (1, 0), (-1, 3)]),
    (ZZ0(2), ZZ0(2), [(0, 0), (1, 4), (2, 0), (3, -1)]),
    (ZZ0(2), ZZ0(4), [(0, 0), (1, 0), (1, 1), (2, 0), (-1, 2)]),
    (ZZ0(3), ZZ0(6), [(0, 0), (1, -1), (3, 0), (5, 2)]),
    (ZZ0(1), ZZ0(3), [(0, 0), (0, 2), (1, 0), (2, -1)]),
    (ZZ0(6), ZZ0(6), [(0, 0), (1, 1), (4, -3), (6, 0), (7, 2), (-2, 0), (12, 1), (3, 3)]),
    (ZZ0(5), ZZ0(5), [(0, 0), (2, 5), (5, 0), (-5, 1)]),
]


def test_transfer_both_directions():
    bad = []
    for A, B, F in TRANSFER_TRIPLES:
        assert len(F) <= 8
        up, down = gamma_partial_embedding_transfer(A, B, F, budget=24)
        if not (up.ok and l_embedding_ok(A, B, up.l_map.mapping)):
            bad.append(("lift", str(A), str(B), up.reason))
        if not (down.ok and mv_embedding_ok(A.point, B.point, down.mv_map.mapping)):
            bad.append(("restrict", str(A), str(B), down.reason))
    report(6, not bad, f"{len(TRANSFER_TRIPLES)} triples, {len(bad)} verification failures {bad[:3]}")


# -- 7 ---------------------------------------------------------------------------------

FIG_N = (2, 3, 4, 5, 6, 9, 12)
FIG_Z_EDGES = [(0, 2), (0, 3), (0, 5), (2, 4), (2, 6), (3, 6), (3, 9), (4, 12), (6, 12)]
FIG_K_EDGES = [(2, 4), (2, 6), (3, 6), (3, 9), (4, 12), (6, 12)]


def _fig_node(tag, n):
    if tag == "T":
        return "T"
    if n == 0:
        return "Z0"
    return f"{tag}{n}"


def figure_edges():
    """Edge list transcribed from the drawing, both signs, plus the bottom edge."""
    edges = {("T", "Z0")}
    for sgn in (1, -1):
        for a, b in FIG_Z_EDGES:
            edges.add((_fig_node("Z", sgn * a), _fig_node("Z", sgn * b)))
        for a, b in FIG_K_EDGES:
            edges.add((_fig_node("K", sgn * a), _fig_node("K", sgn * b)))
        for n in FIG_N:
            edges.add((_fig_node("Z", sgn * n), _fig_node("K", sgn * n)))
    return edges


def test_lattice_matches_figure():
    names = {TRIVIAL: "T", generated_by(Z(0)): "Z0"}
    for sgn in (1, -1):
        for n in range(1, 13):
            names[generated_by(Generator("Zn", sgn * n))] = f"Z{sgn * n}"
            names[generated_by(Generator("ZnLexZ0", sgn * n))] = f"K{sgn * n}"
    wanted = {"T", "Z0"} | {f"{t}{s * n}" for t in "ZK" for s in (1, -1) for n in FIG_N}
    pool = [TRIVIAL, generated_by(Z(0))] + list(join_irreducibles(12))
    nodes = [v for v in pool if names[v] in wanted]
    got = {(names[a], names[b]) for a, b in induced_covers(nodes)}
    expected = figure_edges()
    problems = []
    if got != expected:
        problems.append(("figure", sorted(got - expected), sorted(expected - got)))

    # the part of the figure inside the nmax = 6 enumeration, via its own order matrix
    lat = enumerate_lattice(6)
    small = [v for v in nodes if v in lat.index]
    idx = [lat.index[v] for v in small]
    sub = {
        (names[small[i]], names[small[j]])
        for i, a in enumerate(idx)
        for j, b in enumerate(idx)
        if a != b
        and lat.leq(a, b)
        and not any(c not in (a, b) and lat.leq(a, c) and lat.leq(c, b) for c in idx)
    }
    small_names = {names[v] for v in small}
    exp_small = {e for e in expected if e[0] in small_names and e[1] in small_names}
    if sub != exp_small:
        problems.append(("nmax 6", sorted(sub ^ exp_small)))

    for n in (2, 4, 6):
        if export_dot(enumerate_lattice(n)) != (GOLDEN / f"lattice_nmax{n}.dot").read_text(encoding="utf-8"):
            problems.append(("dot golden", n))
    report(7, not problems, f"{len(expected)} figure edges, {len(exp_small)} within nmax 6, {problems[:2]}")


# -- 8 ---------------------------------------------------------------------------------


def _iso_ok(src, dst, iso, w):
    """Independent window check of a shear: order, additivity, bijection, constants."""
    r = np.arange(-w, w + 1)
    pts = np.array([(x, y) for x in r for y in r], dtype=np.int64)  # lex-sorted
    img = np.array([iso((int(x), int(y))) for x, y in pts], dtype=np.int64)
    # strictly increasing images of a sorted list give strict order preservation
    dx, dy = np.diff(img[:, 0]), np.diff(img[:, 1])
    if not np.all((dx > 0) | ((dx == 0) & (dy > 0))):
        return False
    # unit-step additivity inside the square; the square is step-connected from 0,
    # so this extends to every in-window sum
    e1, e2 = np.array(iso((1, 0))), np.array(iso((0, 1)))
    lookup = {tuple(p): tuple(q) for p, q in zip(pts.tolist(), img.tolist())}
    if lookup[(0, 0)] != (0, 0):
        return False
    for (x, y), q in lookup.items():
        if x < w and lookup[(x + 1, y)] != tuple(np.array(q) + e1):
            return False
        if y < w and lookup[(x, y + 1)] != tuple(np.array(q) + e2):
            return False
    # bijection onto Z^2: the unit images form a unimodular matrix
    if round(abs(np.linalg.det(np.array([e1, e2], dtype=float)))) != 1:
        return False
    return iso(src.point) == dst.point and 0 <= dst.point[1] < abs(dst.point[0])


def test_shift_isos():
    bad, cases = [], 0
    for a in [s * k for k in range(1, 6) for s in (1, -1)]:
        for k in range(-10, 11):
            src = LexChain.of("ZZ", a, k)
            dst, iso = shift_normalize(src)
            cases += 1
            if not (verify_shift_window(src, dst, iso, 25) and _iso_ok(src, dst, iso, 25)):
                bad.append((a, k))
    report(8, not bad, f"{cases} points on window 25, {len(bad)} failures {bad[:3]}")


# -- 9 ---------------------------------------------------------------------------------

N_CASES = 10_000


def _rand_chain(rng):
    kinds = "".join(rng.choice("ZZS") for _ in range(rng.randint(1, 3)))
    return LexChain.of(kinds, *[_rand_coord(rng, k, 5) for k in kinds])


def _rand_coord(rng, kind, r):
    if kind == "S":
        return (rng.randint(-r, r), rng.randint(-r, r))
    return rng.randint(-r, r)


def _rand_elem(rng, c, r=20):
    return c.element(*[_rand_coord(rng, "S" if k is Kind.S else "Z", r) for k in c.kinds])


def test_property_suites():
    rng = random.Random(20240611)
    fails = {"l-group": 0, "total order": 0, "embedding order": 0, "udecompose": 0}

    for _ in range(N_CASES):
        c = _rand_chain(rng)
        x, y, z = (_rand_elem(rng, c) for _ in range(3))
        add, j, m = c.add, c.join, c.meet
        laws = [
            add(add(x, y), z) == add(x, add(y, z)),
            add(x, y) == add(y, x),
            add(x, c.zero()) == x,
            add(x, c.neg(x)) == c.zero(),
            j(x, m(x, y)) == x and m(x, j(x, y)) == x,
            add(j(x, y), z) == j(add(x, z), add(y, z)),
            m(x, j(y, z)) == j(m(x, y), m(x, z)),
            (x <= y) == (add(x, z) <= add(y, z)),
        ]
        fails["l-group"] += not all(laws)
        sgn = [x < y, x == y, x > y]
        total = sum(sgn) == 1 and (j(x, y) == (y if x <= y else x))
        trans = not (x <= y and y <= z) or x <= z
        fails["total order"] += not (total and trans)

    accepted = 0
    while accepted < N_CASES:
        m_ = rng.randint(1, 4)
        A = rng.choice([Z(m_), ZZ0(m_)])
        B = rng.choice([Z(m_ * rng.randint(1, 3)), ZZ0(m_ * rng.randint(1, 3)), Z(rng.randint(1, 6))])
        F = {_rand_elem(rng, A, 4) for _ in range(rng.randint(1, 4))}
        pe = find_partial_embedding(A, F, B, 12)
        if pe is None:
            continue
        accepted += 1
        mp = pe.mapping
        ok = all((a < b) == (mp[a] < mp[b]) for a, b in itertools.permutations(mp, 2))
        fails["embedding order"] += not (ok and l_embedding_ok(A, B, mp))

    for _ in range(N_CASES):
        m_ = rng.randint(1, 9)
        c = rng.choice([Z(m_), ZZ0(m_), LexChain.of("ZZ", m_, rng.randint(-5, 5)),
                        LexChain.of("S", (m_, rng.randint(-m_ // 2, m_ // 2)))])
        if c.sign(c.point) <= 0:
            c = LexChain.of("S", (m_, 0))
        a = _rand_elem(rng, c, 40)
        d = udecompose(c, a)
        u = c.point
        exact = c.add(c.scale(d.n, u), d.r) == a and c.zero() <= d.r < u
        # no other multiple leaves a remainder in [0, u)
        others = [c.sub(a, c.scale(k, u)) for k in (d.n - 1, d.n + 1)]
        unique = not any(c.zero() <= r < u for r in others)
        fails["udecompose"] += not (exact and unique)

    report(9, not any(fails.values()), f"{N_CASES} cases per suite, failures {fails}")


if __name__ == "__main__":
    suite = [
        test_oracle_bruteforce_concordance,
        test_mix_is_disjunction,
        test_basis_sound_and_complete,
        test_two_bases_agree,
        test_gamma_correctness,
        test_transfer_both_directions,
        test_lattice_matches_figure,
        test_shift_isos,
        test_property_suites,
    ]
    code = 0
    for fn in suite:
        try:
            fn()
        except AssertionError:
            code = 1
    sys.exit(code)
