import random

import pytest

from _support import l_embedding_ok
from plal.chain import LexChain
from plal.embeddings import (
    PartialEmbedding,
    UClassPart,
    find_mv_partial_embedding,
    find_partial_embedding,
    lex_transfer_check,
    normalize_universal_class,
    parse_universal_class,
    universal_generators,
    universal_member,
    verify_partial_embedding,
)
from plal.mundici import gamma


def Z(n):
    return LexChain.of("Z", n)


def interval(m):
    return [(k,) for k in range(m + 1)]


# -- search ------------------------------------------------------------------------


def test_identity_on_lex_chain():
    A = LexChain.of("ZZ", 2, 0)
    F = [A.point, A.zero(), (1, 0)]
    pe = find_partial_embedding(A, F, A, 4)
    assert pe is not None and verify_partial_embedding(pe)
    assert l_embedding_ok(A, A, pe.mapping)
    assert verify_partial_embedding(PartialEmbedding(A, A, tuple((a, a) for a in F)))


def test_doubling_found():
    pe = find_partial_embedding(Z(3), interval(3), Z(6), 12)
    assert pe.mapping == {(k,): (2 * k,) for k in range(4)}


def test_lex_fragment_into_simple_chain():
    A = LexChain.of("ZZ", 0, 1)
    F = [(0, 0), (0, 1), (1, 0)]
    pe = find_partial_embedding(A, F, Z(1), 100)
    assert pe is not None
    m = pe.mapping
    assert m[(0, 0)] == (0,) and m[(0, 1)] == (1,) and m[(1, 0)] > (1,)
    assert l_embedding_ok(A, Z(1), m)


def test_not_found_when_no_room():
    assert find_partial_embedding(Z(3), interval(3), Z(2), 10) is None


def test_empty_domain():
    pe = find_partial_embedding(Z(3), [], Z(5), 1)
    assert pe.pairs == ()


@pytest.mark.parametrize(
    "pairs, ok",
    [
        ((((0,), (0,)), ((1,), (1,)), ((3,), (3,))), True),
        ((((1,), (1,)), ((2,), (1,))), False),
        ((((1,), (2,)), ((2,), (1,))), False),
    ],
)
def test_verify_examples(pairs, ok):
    assert verify_partial_embedding(PartialEmbedding(Z(3), Z(3), pairs)) is ok


def test_perturbations_are_rejected_unless_valid():
    rng = random.Random(5)
    cases = [(Z(2), Z(6), interval(4)), (LexChain.of("ZZ", 3, 0), LexChain.of("ZZ", 3, 0), None)]
    for A, B, F in cases:
        if F is None:
            F = [e for e in A.window(2)]
        pe = find_partial_embedding(A, F, B, 16)
        assert pe is not None and l_embedding_ok(A, B, pe.mapping)
        for _ in range(300):
            m = dict(pe.mapping)
            key = rng.choice(list(m))
            m[key] = tuple(v + rng.randint(-3, 3) for v in m[key])
            moved = PartialEmbedding(A, B, tuple(m.items()))
            assert verify_partial_embedding(moved) == l_embedding_ok(A, B, m)


def test_mv_search_respects_divisibility():
    for m in range(1, 7):
        for n in range(1, 13):
            M, N = gamma(Z(m)), gamma(Z(n))
            pe = find_mv_partial_embedding(M, M.elements(), N)
            assert (pe is not None) == (n % m == 0)


# -- lexicographic transfer ------------------------------------------------------------


def test_lex_transfer_plain():
    rep = lex_transfer_check(None, Z(3), Z(6), None, interval(3), 12)
    assert rep.ok and rep.outer.mapping == {(k,): (2 * k,) for k in range(4)}


def test_lex_transfer_with_outer_factors():
    C, D = Z(0), Z(0)
    F = [(0, 0, 0), (0, 3, 0), (0, 1, -2), (1, -1, 5), (-1, 2, 0), (0, 2, 1)]
    rep = lex_transfer_check(C, Z(3), Z(6), D, F, 12)
    assert rep.ok
    for x, y in rep.outer.pairs:
        assert y == (x[0], 2 * x[1], x[2])


def test_lex_transfer_rejects_order_swap():
    phi = {(0,): (0,), (1,): (3,), (2,): (1,), (3,): (6,)}
    rep = lex_transfer_check(Z(0), Z(3), Z(6), None, [(0, k) for k in range(4)], 12, phi=phi)
    assert not rep.ok


# -- universal classes --------------------------------------------------------------


def test_parse_universal_class():
    u = parse_universal_class("U+(I={2,3}; D={6:[1,2]}; K={1})")
    (p,) = u.parts
    assert p.sign == "+" and p.I == {2, 3} and p.D == ((6, frozenset({1, 2})),) and p.K == {1}
    assert parse_universal_class(str(u)) == u
    assert parse_universal_class("U+(I={1}) & U-(K={2})").sign == "mixed"
    for bad in ["U+(I={1}; I={2})", "V+(I={1})", "U+(D={4:[]})"]:
        with pytest.raises(ValueError):
            parse_universal_class(bad)


@pytest.mark.parametrize(
    "j, d, out, flagged",
    [(4, 6, 2, False), (3, 3, 3, False), (4, 3, 3, True), (6, 8, 2, False), (5, 10, 5, False)],
)
def test_normalize_pairs(j, d, out, flagged):
    u = normalize_universal_class(parse_universal_class(f"U+(D={{{j}:[{d}]}})"))
    (p,) = u.parts
    assert p.D == ((j, frozenset({out})),)
    assert ((j, d) in p.flagged) is flagged


def test_normalize_merges_same_sign():
    u = parse_universal_class("U+(I={2}) & U+(I={3}; K={1}) & U-(I={1})")
    n = normalize_universal_class(u)
    assert [p.sign for p in n.parts] == ["+", "-"]
    assert n.parts[0] == UClassPart("+", frozenset({2, 3}), (), frozenset({1}))


def test_universal_generators():
    u = parse_universal_class("U-(I={2}; D={4:[2]}; K={1})")
    assert [str(c) for c in universal_generators(u)] == [
        "lex(Z)@(-2)",
        "lex(Z,Z)@(-4,-2)",
        "lex(S)@((-1,0))",
    ]


@pytest.mark.parametrize(
    "chain, cls",
    [
        ("lex(Z)@(2)", "U+(I={2})"),
        ("lex(Z)@(2)", "U+(I={6})"),
        ("lex(Z,Z)@(0,1)", "U+(I={1})"),
    ],
)
def test_universal_member_yes(chain, cls):
    res = universal_member(LexChain.parse(chain), parse_universal_class(cls), 3)
    assert res.answer == "Yes"
    for _, g, pe in res.witnesses:
        assert l_embedding_ok(pe.source, g, pe.mapping)


def test_universal_member_unknown():
    res = universal_member(Z(4), parse_universal_class("U+(I={6})"), 5)
    # windows below the point embed; the window holding the point does not
    assert res.answer == "Unknown" and res.failed_window == 4
