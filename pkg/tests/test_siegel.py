import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import QMAX, WEIGHT, jacobi_basis, siegel_lift
from d4quat.errors import DomainError, InsufficientData, InsufficientPrecision, OutOfBound
from d4quat.exact import det2
from d4quat.orbits import random_sl2
from d4quat.pairspace import bilinear, vec
from d4quat.siegel import (
    MPrimeCoeffTable,
    MPrimeIndex,
    SiegelCoeffTable,
    fj_slice,
    maass_lift,
    mprime_from_siegel,
    mprime_hecke_classifier,
    mprime_primitive_vanishing,
    mprime_table_from_siegel,
    reduce_triple,
    reduced_triples,
    siegel_to_mprime,
    synthetic_siegel,
    transform_triple,
    triple_content,
)

PHI_N = QMAX // 4 + 4


def phi(i=0):
    return jacobi_basis(WEIGHT, PHI_N)[i]


def deep_phi(i=0):
    """The same basis form expanded far enough to read c(ac, b) for every 4ac - b^2 <= QMAX."""
    return jacobi_basis(WEIGHT, QMAX // 3 + 4)[i]


def gl2(rng):
    u = random_sl2(rng)
    if rng.random() < 0.5:
        u = ((u[0][0], -u[0][1]), (u[1][0], -u[1][1]))
    return u


# -- binary forms


@given(st.integers(0, 30), st.integers(-30, 30), st.integers(0, 30))
def test_reduce_triple_is_reduced_and_idempotent(a, b, c):
    if 4 * a * c - b * b < 0:
        with pytest.raises(DomainError):
            reduce_triple((a, b, c))
        return
    r = reduce_triple((a, b, c))
    assert 4 * r[0] * r[2] - r[1] ** 2 == 4 * a * c - b * b
    assert 0 <= r[1] <= r[0] <= r[2] or r[0] == r[1] == 0
    assert reduce_triple(r) == r
    assert triple_content(r) == triple_content((a, b, c))


def test_reduced_triples_are_distinct_classes():
    ts = reduced_triples(120)
    assert len(set(ts)) == len(ts)
    assert all(reduce_triple(t) == t for t in ts)
    assert (1, 0, 1) in ts and (1, 1, 1) in ts


# -- the Maass lift


def test_maass_lift_primitive_entries_are_jacobi_coefficients():
    lift = siegel_lift(0)
    f = deep_phi()
    for a, b, c in reduced_triples(QMAX):
        if triple_content((a, b, c)) == 1:
            assert lift[(a, b, c)] == f.coeff(a * c, b)


def test_maass_lift_two_divisor_expansion():
    lift = siegel_lift(0)
    f = phi()
    for a, b, c in reduced_triples(QMAX // 4):
        if triple_content((a, b, c)) != 1 or 4 * (4 * a * c - b * b) > QMAX:
            continue
        expected = f.coeff(4 * a * c, 2 * b) + 2 ** (WEIGHT - 1) * f.coeff(a * c, b)
        assert lift[(2 * a, 2 * b, 2 * c)] == expected


def test_maass_lift_content_recursion():
    lift = siegel_lift(1)
    f = deep_phi(1)
    for t in reduced_triples(QMAX):
        if lift[t] != f.coeff(t[0] * t[2], t[1]):
            assert triple_content(t) > 1


def test_maass_lift_gl2_invariance():
    lift = siegel_lift(0)
    rng = random.Random(3)
    ts = reduced_triples(60)
    for _ in range(100):
        t = rng.choice(ts)
        u = gl2(rng)
        assert abs(det2(u)) == 1
        assert lift[transform_triple(t, u)] == lift[t]


def test_maass_lift_errors():
    with pytest.raises(InsufficientPrecision):
        maass_lift(jacobi_basis(WEIGHT, 8)[0], QMAX)
    with pytest.raises(DomainError):
        maass_lift(phi(), 0)
    with pytest.raises(OutOfBound):
        siegel_lift(0)[(10, 0, 10)]


# -- synthetic tables


def test_synthetic_examples():
    const = synthetic_siegel(lambda d, k: 1, 40)
    assert all(const[t] == 1 for t in reduced_triples(40))
    disc = synthetic_siegel(lambda d, k: d, 40)
    assert disc[(2, 1, 3)] == 23 and disc[(1, 0, 1)] == 4
    prim = synthetic_siegel(lambda d, k: 1 if k == 1 else 0, 40)
    assert prim[(1, 1, 1)] == 1 and prim[(2, 2, 2)] == 0 and prim[(2, 0, 2)] == 0
    assert const[(0, 0, 5)] == 0


def test_siegel_json_round_trip():
    t = synthetic_siegel(lambda d, k: Fraction(d, 7), 30, 18)
    back = SiegelCoeffTable.from_json(t.to_json())
    assert back.entries == t.entries and back.weight == 18 and back.bound == 30
    with pytest.raises(DomainError):
        SiegelCoeffTable.from_json({"weight": 2})


# -- the (1, 2) coordinates


def test_siegel_to_mprime_examples():
    assert siegel_to_mprime((1, 0, 1)) == vec(b4=-1, bm4=-1)
    assert siegel_to_mprime((0, 0, 0)) == vec()


@given(st.integers(0, 20), st.integers(-20, 20), st.integers(0, 20))
def test_siegel_mprime_round_trip(a, b, c):
    s = MPrimeIndex.from_vector(siegel_to_mprime((a, b, c)), 2)
    assert s == mprime_from_siegel((a, b, c)) == MPrimeIndex(c, a, b, 2)
    # alpha (S, S) at alpha = 2 is the discriminant 4ac - b^2 of T
    assert s.disc() == 4 * a * c - b * b


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.sampled_from([2, 4, 6, 10]))
def test_pairing_matches_raw_bilinear_form(n, m, r, alpha):
    s = MPrimeIndex(n, m, r, alpha)
    x = s.vector()
    assert bilinear(x, x) == s.pairing()
    assert alpha * s.pairing() == s.disc()
    assert MPrimeIndex.from_vector(x, alpha) == s


def test_mprime_index_rejects_odd_alpha():
    with pytest.raises(DomainError):
        MPrimeIndex(1, 1, 0, 3)


def test_mprime_json_round_trip():
    m = mprime_table_from_siegel(siegel_lift(0), 5)
    back = MPrimeCoeffTable.from_json(m.to_json())
    assert back.entries == m.entries and back.alpha == 2


# -- Fourier-Jacobi slices


def test_fj_slice_zero_cases():
    m = mprime_table_from_siegel(siegel_lift(0), 10)
    assert fj_slice(m, 0) == {}
    assert fj_slice(MPrimeCoeffTable(WEIGHT, 2, {}, QMAX, 10), 3) == {}
    with pytest.raises(OutOfBound):
        fj_slice(m, 11)
    with pytest.raises(DomainError):
        fj_slice(m, -1)


def test_fj_slice_one_recovers_the_jacobi_form():
    m = mprime_table_from_siegel(siegel_lift(0), 12)
    f = phi()
    sl = fj_slice(m, 1)
    for n in range(13):
        rmax = math.isqrt(4 * n)
        for r in range(-rmax, rmax + 1):
            if 4 * n - r * r <= QMAX:
                assert sl.get((n, r), 0) == f.coeff(n, r)


def test_fj_slices_respect_support():
    m = mprime_table_from_siegel(siegel_lift(1), 12)
    assert m.support_violations() == []
    for mm in range(13):
        for (n, r) in fj_slice(m, mm):
            assert n >= 0 and 4 * n * mm >= r * r


def test_fj_slice_m_matches_divisor_sum():
    m = mprime_table_from_siegel(siegel_lift(0), 6)
    f = phi()
    for (n, r), v in fj_slice(m, 2).items():
        g = math.gcd(math.gcd(n, 2), r)
        expected = sum(d ** (WEIGHT - 1) * f.coeff(2 * n // (d * d), r // d) for d in (1, 2) if g % d == 0)
        assert v == expected


# -- classifiers on the (1, 2) side


def test_mprime_classifier_verdicts():
    lift = mprime_table_from_siegel(siegel_lift(0), 12)
    assert mprime_hecke_classifier(lift, WEIGHT).is_cusp_consistent
    grow = {}
    for n in range(13):
        for mm in range(13):
            for r in range(-15, 16):
                s = MPrimeIndex(n, mm, r, 2)
                if 0 < s.disc() <= QMAX:
                    grow[(n, mm, r)] = s.pairing() ** WEIGHT
    rep = mprime_hecke_classifier(MPrimeCoeffTable(WEIGHT, 2, grow, QMAX, 12), WEIGHT)
    assert rep.verdict == "growth-detected"
    zero = mprime_hecke_classifier(MPrimeCoeffTable(WEIGHT, 2, {}, QMAX, 12), WEIGHT)
    assert zero.is_cusp_consistent and zero.max_ratio == 0


def test_mprime_classifier_errors():
    with pytest.raises(DomainError):
        mprime_hecke_classifier(MPrimeCoeffTable(4, 2, {}, QMAX, 12), 4)
    with pytest.raises(InsufficientData):
        mprime_hecke_classifier(MPrimeCoeffTable(WEIGHT, 2, {}, 10, 2), WEIGHT)


def test_mprime_primitive_vanishing():
    zero = MPrimeCoeffTable(WEIGHT, 2, {}, QMAX, 10)
    rep = mprime_primitive_vanishing(zero)
    assert rep.verdict == "consistent-with-zero through bound" and not rep.warning
    imprim = MPrimeCoeffTable(WEIGHT, 2, {(2, 2, 0): 5, (3, 3, 3): 1}, QMAX, 10)
    rep = mprime_primitive_vanishing(imprim)
    assert rep.verdict == "consistent-with-zero through bound" and rep.warning
    lift = mprime_table_from_siegel(siegel_lift(0), 10)
    rep = mprime_primitive_vanishing(lift)
    assert rep.verdict == "nonzero-primitive-coefficient" and rep.witnesses
    assert all(math.gcd(math.gcd(w["n"], w["m"]), w["r"]) == 1 for w in rep.witnesses)
    with pytest.raises(DomainError):
        mprime_primitive_vanishing(lift, 20)
