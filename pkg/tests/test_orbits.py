import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_pair
from d4quat.errors import DomainError
from d4quat.exact import det2, mul2
from d4quat.orbits import (
    apply_cube,
    is_isometry,
    random_sl2,
    rank,
    rank_by_flattenings,
    reduce_pair_rank3,
    reduce_to_c_form,
    reduce_v33,
    smith2,
    v33_pair,
)
from d4quat.pairspace import PairB, WECoord, canonical_slice_primitive, from_we, vec
from d4quat.siegel import reduced_triples

I2 = ((1, 0), (0, 1))
vec6 = st.lists(st.integers(-12, 12), min_size=6, max_size=6).filter(any)


# -- V33 vectors


def test_v33_examples():
    c = reduce_v33((1, 0, 0, 0, 0, 0))
    assert (c.kind, c.n) == ("ISOTROPIC", 1)
    c = reduce_v33((0, 1, 0, 0, 1, 0))
    assert (c.kind, c.n, c.alpha) == ("ANISOTROPIC", 1, 2)
    c = reduce_v33((0, 3, 0, 0, 3, 0))
    assert (c.kind, c.n, c.alpha) == ("ANISOTROPIC", 3, 2)


def test_v33_rejects_zero():
    with pytest.raises(DomainError):
        reduce_v33((0,) * 6)


@settings(max_examples=300)
@given(vec6)
def test_v33_reduction_is_an_integral_isometry(y):
    c = reduce_v33(y)
    assert is_isometry(c.transform)
    assert tuple(sum(c.transform[i][j] * y[j] for j in range(6)) for i in range(6)) == c.vector()
    content = 0
    for v in y:
        content = gcd(content, v)
    assert c.n == content
    assert v33_pair(y, y) == c.n ** 2 * c.alpha


# -- 2x2 Smith form


@given(st.lists(st.integers(-30, 30), min_size=4, max_size=4))
def test_smith2(entries):
    x = ((entries[0], entries[1]), (entries[2], entries[3]))
    g, h, (d1, d2) = smith2(x)
    assert det2(g) == det2(h) == 1
    assert mul2(mul2(g, x), h) == ((d1, 0), (0, d2))
    assert d1 >= 0
    if d1:
        assert d2 % d1 == 0


# -- rank-3 pairs


def canonical(alpha, n, m, r):
    return PairB(vec(b3=1, bm3=alpha // 2), vec(b4=-n, bm4=-m, bm3=r))


def key(c):
    return (c.alpha, c.n, c.m, c.r)


def test_fixed_point():
    b = canonical(2, 1, 1, 0)
    c = reduce_pair_rank3(b)
    assert key(c) == (2, 1, 1, 0)
    assert apply_cube(b, c.transform) == b


def test_scramble_and_recover():
    rng = random.Random(7)
    base = canonical(2, 1, 1, 0)
    for _ in range(40):
        b = base.left_act(random_sl2(rng), random_sl2(rng)).right_mul(random_sl2(rng))
        c = reduce_pair_rank3(b)
        assert key(c) == (2, 1, 1, 0)
        assert apply_cube(b, c.transform) == c.pair()


def test_canonical_form_is_an_orbit_invariant():
    rng = random.Random(11)
    for a, bb, cc in reduced_triples(300):
        b = canonical_slice_primitive(a, bb, cc)
        ref = key(reduce_pair_rank3(b, check_psd=False))
        moved = b.left_act(random_sl2(rng), random_sl2(rng)).right_mul(random_sl2(rng))
        c = reduce_pair_rank3(moved, check_psd=False)
        assert key(c) == ref, (a, bb, cc)
        assert apply_cube(moved, c.transform) == c.pair()


def test_reduction_preserves_q():
    rng = random.Random(5)
    for a, bb, cc in reduced_triples(120)[::3]:
        b = canonical_slice_primitive(a, bb, cc).right_mul(random_sl2(rng))
        c = reduce_pair_rank3(b, check_psd=False)
        assert c.pair().q() == b.q() == 2 * c.alpha * c.n * c.m - c.r ** 2


def test_degenerate_q_zero_pairs_reach_positive_alpha():
    rng = random.Random(0)
    seen = negative = 0
    while seen < 150:
        b = random_pair(rng, -2, 2)
        if b.is_zero() or b.q() != 0 or b.content() != 1 or rank(b) != 3:
            continue
        seen += 1
        try:
            c = reduce_pair_rank3(b, check_psd=False)
        except DomainError:
            # T(B) negative semi-definite: outside the positive cone
            a, _, cc = b.t_form().triple()
            assert a <= 0 and cc <= 0
            negative += 1
            continue
        assert c.alpha > 0
        assert apply_cube(b, c.transform) == c.pair()
    assert negative < seen


def test_reduce_pair_rank3_domain_errors():
    with pytest.raises(DomainError):
        reduce_pair_rank3(canonical(2, 1, 1, 0).scale(2))
    with pytest.raises(DomainError):
        reduce_pair_rank3(PairB(vec(b3=1), vec(bm3=1)))  # Q < 0
    with pytest.raises(DomainError):
        reduce_pair_rank3(PairB(vec(b3=1), vec(b4=1)))  # rank below 3


# -- rank


def test_rank_examples():
    assert rank(PairB(I2, ((0, 1), (-1, 0)))) == 4
    assert rank(from_we(WECoord(0, (0, 0, 0), (1, 1, 1), 1))) == 3
    assert rank(from_we(WECoord(0, (0, 0, 0), (1, 0, 0), 0))) == 1
    assert rank(PairB(((0, 0), (0, 0)), ((0, 0), (0, 0)))) == 0


@settings(max_examples=300)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_rank_matches_flattening_route(e):
    b = PairB(((e[0], e[1]), (e[2], e[3])), ((e[4], e[5]), (e[6], e[7])))
    assert rank(b) == rank_by_flattenings(b)


@settings(max_examples=150)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_c_form_shape(e):
    b = PairB(((e[0], e[1]), (e[2], e[3])), ((e[4], e[5]), (e[6], e[7])))
    if b.q() != 0:
        with pytest.raises(DomainError):
            reduce_to_c_form(b)
        return
    w = reduce_to_c_form(b)
    assert w.a == 0 and tuple(w.beta) == (0, 0, 0)
    assert rank(from_we(w)) == rank(b)
