"""Exact integer linear algebra: 2x2 helpers, Hermite and Smith normal forms,
and the Hecke coset enumeration used by the theta lift."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import DomainError

Mat2 = tuple  # ((a, b), (c, d))


def mat2(a, b, c, d) -> Mat2:
    return ((a, b), (c, d))


def det2(m: Mat2):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def adj2(m: Mat2) -> Mat2:
    """Adjugate, so that m * adj2(m) = det2(m) * I."""
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def mul2(x: Mat2, y: Mat2) -> Mat2:
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def inv2(m: Mat2) -> Mat2:
    """Exact inverse over the rationals."""
    d = det2(m)
    if d == 0:
        raise DomainError("singular 2x2 matrix")
    return tuple(tuple(Fraction(x) / d for x in row) for row in adj2(m))


IDENTITY2: Mat2 = ((1, 0), (0, 1))


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_det(m) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def hnf(m: Sequence[Sequence[int]]):
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular and U*M = H. Pivots are positive and the
    entries above each pivot are reduced into [0, pivot).
    """
    h = [list(map(int, row)) for row in m]
    rows = len(h)
    cols = len(h[0]) if rows else 0
    u = _identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # Euclid down the column until only row r is nonzero.
        while True:
            nz = [i for i in range(r, rows) if h[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(h[i][c]))
            h[r], h[p] = h[p], h[r]
            u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, rows):
                if h[i][c] != 0:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c] != 0:
                        done = False
            if done:
                break
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return h, u


def snf_invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith invariant factors d1 | d2 | ... of an integer matrix."""
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    factors = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            changed = False
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        changed = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        changed = True
            if changed:
                entries = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
                entries += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
                _, pi, pj = min(entries)
                a[t], a[pi] = a[pi], a[t]
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                continue
            # pivot must divide the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        factors.append(abs(a[t][t]))
        t += 1
    return factors


def divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def sigma(n: int, k: int = 1) -> int:
    return sum(d ** k for d in divisors(n))


def hecke_coset_reps(n: int) -> list[Mat2]:
    """Representatives (a, b; 0, d), ad = n, 0 <= b < d, of GL2(Z) \\ {det = n}."""
    if n <= 0:
        raise DomainError(f"hecke_coset_reps needs n >= 1, got {n}")
    reps = []
    for a in divisors(n):
        d = n // a
        for b in range(d):
            reps.append(((a, b), (0, d)))
    return reps


def index_divisor_bound(pair) -> int:
    """Product of the Smith invariant factors of the span of pair; every
    admissible determinant in right_divisors divides it."""
    f = snf_invariant_factors(pair.coordinate_matrix())
    if len(f) < 2:
        return 0
    return f[0] * f[1]


def right_divisors(pair, n: int, reps: Sequence[Mat2] | None = None):
    """All (r, B') with r among the determinant-n coset reps and B' = B r^{-1} integral.

    ``pair`` is viewed as the row [T1, T2] over M2(Z); B r^{-1} is computed as
    B * adj(r) / n.
    """
    if not pair.is_integral():
        raise DomainError("right_divisors needs an integral pair")
    if n <= 0:
        raise DomainError("n must be positive")
    out = []
    for r in reps if reps is not None else hecke_coset_reps(n):
        if det2(r) != n:
            raise DomainError("representative with wrong determinant")
        cand = pair.right_mul(adj2(r))
        if cand.divisible_by(n):
            out.append((r, cand.scale(Fraction(1, n)).normalized()))
    return out


def all_right_divisors(pair, rep_provider=None):
    """right_divisors over every admissible determinant, as (n, r, B') triples."""
    bound = index_divisor_bound(pair)
    if bound == 0:
        return []
    out = []
    for n in divisors(bound):
        reps = rep_provider(n) if rep_provider else None
        for r, b in right_divisors(pair, n, reps):
            out.append((n, r, b))
    return out


def content(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g
