"""Shared builders for the test suite; expensive objects are cached per session."""

from __future__ import annotations

import random
from functools import lru_cache

from d4quat.jacobi import jacobi_cusp_basis
from d4quat.orbits import random_sl2
from d4quat.pairspace import PairB, canonical_slice_primitive
from d4quat.quaternionic import theta_lift
from d4quat.siegel import maass_lift, reduced_triples, synthetic_siegel

QMAX = 200
WEIGHT = 20


@lru_cache(maxsize=None)
def jacobi_basis(weight: int, n: int):
    return tuple(jacobi_cusp_basis(weight, n))


@lru_cache(maxsize=None)
def siegel_lift(index: int, bound: int = QMAX):
    phi = jacobi_basis(WEIGHT, bound // 4 + 4)[index]
    return maass_lift(phi, bound)


@lru_cache(maxsize=None)
def basis_lift(index: int, bound: int = QMAX):
    return theta_lift(siegel_lift(index, bound), WEIGHT, bound)


# GL2(Z)-invariant synthetic sources: functions of (4ac - b^2, content)
SYNTHETIC = {
    "disc": lambda d, k: d,
    "primitive": lambda d, k: 1 if k == 1 else 0,
    "mixed": lambda d, k: (d % 7) - 3 + k * k,
}


@lru_cache(maxsize=None)
def synthetic_lift(name: str, bound: int = QMAX):
    src = synthetic_siegel(SYNTHETIC[name], bound, WEIGHT, name)
    return theta_lift(src, WEIGHT, bound)


def all_lifts(bound: int = QMAX):
    out = {f"basis[{i}]": basis_lift(i, bound) for i in range(len(jacobi_basis(WEIGHT, bound // 4 + 4)))}
    out.update({f"synthetic[{k}]": synthetic_lift(k, bound) for k in SYNTHETIC})
    return out


def random_pair(rng: random.Random, lo: int = -20, hi: int = 20) -> PairB:
    e = [rng.randint(lo, hi) for _ in range(8)]
    return PairB(((e[0], e[1]), (e[2], e[3])), ((e[4], e[5]), (e[6], e[7])))


def random_positive_pair(rng: random.Random, disc_max: int = 60, length: int = 3) -> PairB:
    a, b, c = rng.choice(reduced_triples(disc_max))
    base = canonical_slice_primitive(a, b, c)
    return base.left_act(random_sl2(rng, length), random_sl2(rng, length)).right_mul(random_sl2(rng, length))
