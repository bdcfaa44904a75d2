import random

import pytest

from coverpovm.presentation import Word, parse_presentation, parse_word
from coverpovm.todd_coxeter import (
    CosetLimitExceeded,
    UndefinedTransition,
    coset_action,
    enumerate_cosets,
)

S3 = "< a, b | a^2, b^3, (a*b)^2 >"
A4 = "< a, b | a^2, b^3, (a*b)^3 >"


def mulclose(gens):
    seen = set(gens)
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = tuple(g[i] for i in a)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


def test_index_two_in_Z():
    p = parse_presentation("< x | >")
    t = enumerate_cosets(p, [Word((1, 1))])
    assert t.n == 2
    assert coset_action(t).images[0] == (1, 0)
    t.validate(p, (Word((1, 1)),))


def test_s3_cosets_of_a():
    p = parse_presentation(S3)
    t = enumerate_cosets(p, [p.gen("a")])
    assert t.n == 3


def test_group_orders_against_permutation_closure():
    # brute-force multiplication-table construction as the independent oracle
    s3_order = len(mulclose([(1, 0, 2), (1, 2, 0)]))
    a4_order = len(mulclose([(1, 0, 3, 2), (1, 2, 0, 3)]))
    assert s3_order == 6 and a4_order == 12
    assert enumerate_cosets(parse_presentation(S3), []).n == s3_order
    assert enumerate_cosets(parse_presentation(A4), []).n == a4_order


def test_trefoil_meridian_normally_generates():
    # adding x as a relator must collapse the whole group to one coset
    p = parse_presentation("< x, y | y*x*y*x^-1*y^-1*x^-1, x >")
    assert enumerate_cosets(p, []).n == 1


def test_whole_group_as_subgroup():
    p = parse_presentation("< x, y | y*x*y = x*y*x >")
    t = enumerate_cosets(p, [p.gen("x"), p.gen("y")])
    assert t.n == 1


def test_trace():
    p = parse_presentation("< x | >")
    t = enumerate_cosets(p, [Word((1, 1))])
    assert t.trace(0, Word(())) == 0
    assert t.trace(0, Word((1,))) == 1
    assert t.trace(0, Word((1, 1))) == 0
    with pytest.raises(UndefinedTransition):
        from coverpovm.todd_coxeter import CosetTable
        partial = CosetTable(1, ((-1, -1),))
        partial.trace(0, Word((1,)))


def test_relators_fix_every_coset(trefoil):
    p = trefoil.presentation
    t = enumerate_cosets(p, [parse_word("x^2", p.generator_names()),
                             parse_word("y", p.generator_names())])
    for r in p.relators:
        for i in range(t.n):
            assert t.trace(i, r) == i
    t.validate(p)


def test_action_is_homomorphism(fig8_records5):
    rng = random.Random(7)
    rep = fig8_records5[-1].rep
    for _ in range(25):
        w1 = Word(tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 8))))
        w2 = Word(tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 8))))
        lhs = rep.word_image(w1 * w2)
        p1, p2 = rep.word_image(w1), rep.word_image(w2)
        assert lhs == tuple(p2[p1[i]] for i in range(rep.degree))


def test_coincidence_heavy_enumeration():
    # relator forcing mass coincidences; table must stay consistent
    p = parse_presentation("< a, b | a^2, b^2, (a*b)^2, a*b >")
    t = enumerate_cosets(p, [])
    t.validate(p)
    assert t.n == 2


def test_overflow():
    p = parse_presentation("< x, y | >")
    with pytest.raises(CosetLimitExceeded):
        enumerate_cosets(p, [], max_cosets=50)


def test_brieskorn_order_120():
    p = parse_presentation("< x, y | (x*y)^2 = x^3, x^3 = y^5 >")
    assert enumerate_cosets(p, []).n == 120


def test_csv_dump():
    p = parse_presentation("< x | >")
    t = enumerate_cosets(p, [Word((1, 1))])
    lines = t.to_csv().strip().splitlines()
    assert lines[0] == "coset,g0,g0^-1"
    assert lines[1] == "0,1,1"
    assert lines[2] == "1,0,0"
