import itertools
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d4quat.errors import DomainError
from d4quat.exact import (
    adj2,
    all_right_divisors,
    det2,
    divisors,
    hecke_coset_reps,
    hnf,
    int_det,
    inv2,
    mul2,
    right_divisors,
    sigma,
    snf_invariant_factors,
)
from d4quat.pairspace import PairB, canonical_slice_primitive

small = st.integers(-9, 9)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


# -- independent oracles


def laplace_det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * laplace_det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))


def minors_oracle(m):
    """Invariant factors as ratios of gcds of k x k minors."""
    rows, cols = len(m), len(m[0])
    out, prev = [], 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                g = gcd(g, laplace_det([[m[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def is_hnf(h):
    last = -1
    for i, row in enumerate(h):
        nz = [j for j, v in enumerate(row) if v]
        if not nz:
            if any(any(r) for r in h[i:]):
                return False
            break
        p = nz[0]
        if p <= last or row[p] <= 0:
            return False
        if any(not 0 <= h[k][p] < row[p] for k in range(i)):
            return False
        last = p
    return True


def brute_hnf(m, bound=3):
    """All row-HNFs reachable as U M with |U entries| <= bound, det U = +-1."""
    found = set()
    rng = range(-bound, bound + 1)
    for a, b, c, d in itertools.product(rng, repeat=4):
        if abs(a * d - b * c) != 1:
            continue
        h = [[a * m[0][j] + b * m[1][j] for j in range(2)], [c * m[0][j] + d * m[1][j] for j in range(2)]]
        if is_hnf(h):
            found.add(tuple(map(tuple, h)))
    return found


# -- 2x2 helpers


@given(matrices(2, 2), matrices(2, 2))
def test_mul2_det_multiplicative(x, y):
    x, y = tuple(map(tuple, x)), tuple(map(tuple, y))
    assert det2(mul2(x, y)) == det2(x) * det2(y)


@given(matrices(2, 2))
def test_adjugate_and_inverse(m):
    m = tuple(map(tuple, m))
    assert mul2(m, adj2(m)) == ((det2(m), 0), (0, det2(m)))
    if det2(m):
        assert mul2(m, inv2(m)) == ((1, 0), (0, 1))


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(DomainError):
        inv2(((1, 2), (2, 4)))


@given(st.integers(1, 5).flatmap(lambda n: matrices(n, n)))
def test_int_det_matches_laplace(m):
    assert int_det(m) == laplace_det(m)


# -- Hermite and Smith normal forms


def test_hnf_example_matches_brute_force():
    h, u = hnf([[2, 4], [1, 3]])
    assert brute_hnf([[2, 4], [1, 3]]) == {((1, 1), (0, 2))}
    assert h == [[1, 1], [0, 2]]
    # [[1, 3], [0, 2]] is the same row lattice with the entry above the pivot unreduced
    assert hnf([[1, 3], [0, 2]])[0] == h


def test_hnf_trivial_cases():
    assert hnf([[1, 0], [0, 1]])[0] == [[1, 0], [0, 1]]
    assert hnf([[0, 0], [0, 0]])[0] == [[0, 0], [0, 0]]


@settings(max_examples=150)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(lambda c: matrices(r, c))))
def test_hnf_is_unimodular_transform_in_normal_form(m):
    h, u = hnf(m)
    assert abs(int_det(u)) == 1
    assert [[sum(u[i][k] * m[k][j] for k in range(len(m))) for j in range(len(m[0]))] for i in range(len(m))] == h
    assert is_hnf(h)


@settings(max_examples=60)
@given(matrices(2, 2))
def test_hnf_unique_against_brute_force(m):
    if laplace_det(m) == 0:
        return
    h, _ = hnf(m)
    found = brute_hnf(m, bound=4)
    # the brute force sees a bounded window of GL2(Z); whatever it sees must agree
    assert found <= {tuple(map(tuple, h))}


@pytest.mark.parametrize("m,expected", [
    ([[1, 0], [0, 1]], [1, 1]),
    ([[2, 0], [0, 4]], [2, 4]),
    ([[2, 0, 0, 0], [0, 1, 0, 0]], [1, 2]),
])
def test_snf_examples(m, expected):
    assert snf_invariant_factors(m) == expected
    assert minors_oracle(m) == expected


@settings(max_examples=200)
@given(st.integers(1, 3).flatmap(lambda r: st.integers(1, 4).flatmap(lambda c: matrices(r, c))))
def test_snf_matches_minors_oracle(m):
    f = snf_invariant_factors(m)
    assert f == minors_oracle(m)
    assert all(b % a == 0 for a, b in zip(f, f[1:]))


# -- divisors and Hecke cosets


@given(st.integers(1, 2000))
def test_divisors_sorted_and_complete(n):
    ds = divisors(n)
    assert ds == sorted(ds)
    assert ds == [d for d in range(1, n + 1) if n % d == 0]


def test_sigma_values():
    assert [sigma(n) for n in range(1, 11)] == [1, 3, 4, 7, 6, 12, 8, 15, 13, 18]
    assert sigma(2, 3) == 9


def brute_cosets(n, bound=6):
    """GL2(Z) classes of integer matrices of determinant n, keyed by their row HNF."""
    rng = range(-bound, bound + 1)
    keys = set()
    for a, b, c, d in itertools.product(rng, repeat=4):
        if a * d - b * c == n:
            keys.add(tuple(map(tuple, hnf([[a, b], [c, d]])[0])))
    return keys


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (6, 12)])
def test_hecke_coset_count_matches_brute_force(n, count):
    reps = hecke_coset_reps(n)
    assert len(reps) == count == sigma(n)
    keys = {tuple(map(tuple, hnf([list(r[0]), list(r[1])])[0])) for r in reps}
    assert len(keys) == len(reps)
    assert keys == brute_cosets(n)


def test_hecke_reps_reject_nonpositive():
    with pytest.raises(DomainError):
        hecke_coset_reps(0)


# -- right divisors


def test_right_divisor_identity_for_primitive_pair():
    b = PairB(((1, 0), (0, 0)), ((0, 1), (0, 0)))
    assert right_divisors(b, 1) == [(((1, 0), (0, 1)), b)]


@given(matrices(2, 2), matrices(2, 2))
@settings(max_examples=60)
def test_right_divisors_of_doubled_pair_match_direct_integrality(t1, t2):
    b = PairB(tuple(map(tuple, t1)), tuple(map(tuple, t2))).scale(2)
    got = {r for r, _ in right_divisors(b, 2)}
    direct = set()
    for r in hecke_coset_reps(2):
        cand = b.right_mul(adj2(r))
        if all(Fraction(v) % 2 == 0 for v in cand.entries()):
            direct.add(r)
    assert got == direct == set(hecke_coset_reps(2))


@pytest.mark.parametrize("t", [(1, 0, 1), (2, 1, 3), (3, -2, 5)])
def test_slice_primitive_pair_has_single_divisor(t):
    b = canonical_slice_primitive(*t)
    for n in range(2, 7):
        assert right_divisors(b, n) == []
    assert len(all_right_divisors(b)) == 1


def test_right_divisors_recover_the_factor():
    base = canonical_slice_primitive(2, 1, 3)
    r = ((2, 1), (0, 3))
    b = base.right_mul(r)
    hits = [(rr, bp) for rr, bp in right_divisors(b, 6) if rr == r]
    assert hits and hits[0][1] == base
