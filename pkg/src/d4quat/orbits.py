"""Orbit reductions for vectors in the split (3,3) lattice and for pairs.

Vectors of V33 are 6-tuples of coefficients on (b2, b3, b4, b-4, b-3, b-2);
the Gram matrix in that basis is the anti-diagonal identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import DomainError, ReductionIncomplete
from .exact import det2, mul2
from .pairspace import PairB, WECoord, coords, norm_e, psd_status, sharp_e, to_we, vec

V33_NAMES = ("b2", "b3", "b4", "b-4", "b-3", "b-2")


def v33_pair(x, y):
    return sum(x[i] * y[5 - i] for i in range(6))


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _eye(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _v22_action(g, h):
    """4x4 matrix of X -> g X h on coefficients (b3, b4, b-4, b-3)."""
    cols = []
    for i in range(4):
        e = [0, 0, 0, 0]
        e[i] = 1
        x = vec(*e)
        y = mul2(mul2(g, x), h)
        cols.append(coords(y))
    return tuple(tuple(cols[j][i] for j in range(4)) for i in range(4))


def _embed_v22(m4):
    out = [list(r) for r in _eye(6)]
    for i in range(4):
        for j in range(4):
            out[i + 1][j + 1] = m4[i][j]
    return tuple(map(tuple, out))


def _eichler(e_index, v):
    """Integral isometry x -> x + (x,e)v - (x,v)e - q(v)(x,e)e for e = b2 (index 0)
    or e = b-2 (index 5) and v in the middle V22 block."""
    full_v = (0,) + tuple(v) + (0,)
    qv = v[0] * v[3] + v[1] * v[2]
    cols = []
    for j in range(6):
        x = [0] * 6
        x[j] = 1
        e = [0] * 6
        e[e_index] = 1
        xe = v33_pair(x, e)
        xv = v33_pair(x, full_v)
        y = [x[i] + xe * full_v[i] - xv * e[i] - qv * xe * e[i] for i in range(6)]
        cols.append(y)
    return tuple(tuple(cols[j][i] for j in range(6)) for i in range(6))


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def smith2(x):
    """g, h in SL2(Z) and (d1, d2) with g x h = diag(d1, d2), d1 >= 0, d1 | d2."""
    g = ((1, 0), (0, 1))
    h = ((1, 0), (0, 1))
    m = tuple(tuple(int(v) for v in row) for row in x)
    row_swap = ((0, 1), (-1, 0))
    col_swap = ((0, -1), (1, 0))
    if m == ((0, 0), (0, 0)):
        return g, h, (0, 0)
    for _ in range(512):
        # the pivot |m00| only ever decreases, so this terminates
        if m[0][0] == 0:
            if m[1][0] != 0:
                g, m = mul2(row_swap, g), mul2(row_swap, m)
            elif m[0][1] != 0:
                h, m = mul2(h, col_swap), mul2(m, col_swap)
            else:
                g, m = mul2(row_swap, g), mul2(row_swap, m)
                h, m = mul2(h, col_swap), mul2(m, col_swap)
            continue
        p = m[0][0]
        if m[1][0] != 0:
            op = ((1, 0), (-(m[1][0] // p), 1))
            g, m = mul2(op, g), mul2(op, m)
            if m[1][0] != 0:
                g, m = mul2(row_swap, g), mul2(row_swap, m)
            continue
        if m[0][1] != 0:
            op = ((1, -(m[0][1] // p)), (0, 1))
            h, m = mul2(h, op), mul2(m, op)
            if m[0][1] != 0:
                h, m = mul2(h, col_swap), mul2(m, col_swap)
            continue
        if m[1][1] % p != 0:
            op = ((1, 1), (0, 1))
            g, m = mul2(op, g), mul2(op, m)
            continue
        if p < 0:
            op = ((-1, 0), (0, -1))
            g, m = mul2(op, g), mul2(op, m)
        return g, h, (m[0][0], m[1][1])
    raise ReductionIncomplete("2x2 Smith reduction did not converge")


@dataclass
class OrbitCanonical:
    kind: str
    n: int
    alpha: int
    transform: tuple = field(repr=False, default=None)

    def vector(self) -> tuple:
        if self.kind == "ISOTROPIC":
            return (self.n, 0, 0, 0, 0, 0)
        return (0, self.n, 0, 0, self.n * self.alpha // 2, 0)


def reduce_v33(y, budget: int = 200) -> OrbitCanonical:
    """Carry a nonzero integral V33 vector to n*b2 (isotropic) or n*y_alpha.

    The transform is an integral isometry T with T*y equal to the canonical vector.
    """
    y = tuple(int(v) for v in y)
    if len(y) != 6:
        raise DomainError("V33 vectors have six coordinates")
    if all(v == 0 for v in y):
        raise DomainError("cannot reduce the zero vector")
    n = 0
    for v in y:
        n = gcd(n, v)
    x = tuple(v // n for v in y)
    norm = v33_pair(x, x)
    t = _eye(6)

    def apply(m):
        nonlocal x, t
        x = _mat_vec(m, x)
        t = _mat_mul(m, t)

    for _ in range(budget):
        mid = x[1:5]
        xm = vec(*mid)
        g, h, (d1, _d2) = smith2(xm)
        apply(_embed_v22(_v22_action(g, h)))
        a, c = x[0], x[5]
        if x[1] == 1 or (a == 0 and c == 0 and x[1] == 0 and x[4] == 0):
            break
        # raise the content of the middle block to 1 using the hyperbolic plane
        if c != 0 and gcd(d1, c) != d1:
            apply(_eichler(0, (0, 0, 1, 0)))
        elif a != 0 and gcd(d1, a) != d1:
            apply(_eichler(5, (0, 0, 1, 0)))
        else:
            break
    else:
        raise ReductionIncomplete("V33 reduction exceeded its move budget")
    if x[1:5] == (0, 0, 0, 0):
        # the vector lives in the (b2, b-2) plane: swap it into the middle block
        swap = _swap_planes()
        apply(swap)
        g, h, _ = smith2(vec(*x[1:5]))
        apply(_embed_v22(_v22_action(g, h)))
    if x[1] != 1 or x[2] != 0 or x[3] != 0:
        raise ReductionIncomplete(f"middle block not normalized: {x}")
    a = x[0]
    if a:
        apply(_eichler(0, (0, 0, 0, a)))
    c = x[5]
    if c:
        apply(_eichler(5, (0, 0, 0, c)))
    if x[0] != 0 or x[5] != 0 or x[1] != 1:
        raise ReductionIncomplete(f"hyperbolic part not cleared: {x}")
    if norm == 0:
        apply(_swap_planes())
        canon = OrbitCanonical("ISOTROPIC", n, 0, t)
    else:
        canon = OrbitCanonical("ANISOTROPIC", n, norm, t)
    if _mat_vec(t, y) != canon.vector():
        raise ReductionIncomplete("transform does not reproduce the canonical vector")
    return canon


def _swap_planes():
    """Isometry exchanging (b2, b-2) with (b3, b-3)."""
    m = [[0] * 6 for _ in range(6)]
    perm = {0: 1, 1: 0, 4: 5, 5: 4, 2: 2, 3: 3}
    for j, i in perm.items():
        m[i][j] = 1
    return tuple(map(tuple, m))


def is_isometry(m) -> bool:
    for i in range(6):
        for j in range(6):
            ei = [m[k][i] for k in range(6)]
            ej = [m[k][j] for k in range(6)]
            if v33_pair(ei, ej) != int(i + j == 5):
                return False
    return True


@dataclass
class Rank3Canonical:
    alpha: int
    n: int
    m: int
    r: int
    transform: tuple = field(repr=False, default=None)

    def pair(self) -> PairB:
        return PairB(vec(b3=1, bm3=Fraction(self.alpha, 2)), vec(b4=-self.n, bm4=-self.m, bm3=self.r))


def apply_cube(pair: PairB, transform) -> PairB:
    """Apply (g, h, u): [T1, T2] -> [g T1 h, g T2 h] * u."""
    g, h, u = transform
    return pair.left_act(g, h).right_mul(u)


def _complete_sl2(p, q):
    gg, s, t = _xgcd(p, q)
    if gg == -1:
        s, t = -s, -t
    # p*s + q*t = 1 -> u = (p, -t; q, s)
    return ((p, -t), (q, s))


def _canonical_from(b: PairB, transform) -> Rank3Canonical:
    t1, t2 = b.t1, b.t2
    return Rank3Canonical(alpha=2 * t1[1][1], n=t2[1][0], m=-t2[0][1], r=t2[1][1], transform=transform)


def _compose(first, second):
    g1, h1, u1 = first
    g2, h2, u2 = second
    return (mul2(g2, g1), mul2(h1, h2), mul2(u1, u2))


def _stabilizer_moves(a: int, c: Rank3Canonical):
    """Pairs (g, h) with g y_alpha h = y_alpha. The translations act on the form
    (n, r, a m); for alpha = 2 the swap exchanges n and m."""
    cands = set()
    if c.n:
        k0 = round(c.r / (2 * a * c.n))
        cands.update(("n", k) for k in (k0 - 1, k0, k0 + 1, 1, -1) if k)
    if c.m:
        k0 = round(c.r / (2 * a * c.m))
        cands.update(("m", k) for k in (k0 - 1, k0, k0 + 1, 1, -1) if k)
    for which, k in sorted(cands):
        if which == "n":
            yield ((1, k), (0, 1)), ((1, -k * a), (0, 1))
        else:
            yield ((1, 0), (k * a, 1)), ((1, 0), (-k, 1))
    if a == 1:
        yield ((0, 1), (-1, 0)), ((0, -1), (1, 0))


def _reduce_from_slot(pair: PairB, p: int, q: int):
    u = _complete_sl2(p, q)
    b = pair.right_mul(u)
    g, h, (d1, d2) = smith2(b.t1)
    if d1 != 1:
        return None
    b = b.left_act(g, h)
    shift = ((1, -b.t2[0][0]), (0, 1))
    b = b.right_mul(shift)
    transform = (g, h, mul2(u, shift))
    cur = _canonical_from(b, transform)

    def key(c):
        return (abs(c.r), abs(c.n) + abs(c.m), -c.r, -c.n, -c.m)

    exact = _gamma0_canonical(d2, b, cur, key)
    if exact is not None:
        return exact
    for _ in range(200):
        best = None
        for g2, h2 in _stabilizer_moves(d2, cur):
            nb = b.left_act(g2, h2)
            move = (g2, h2, ((1, -nb.t2[0][0]), (0, 1)))
            nb = nb.right_mul(move[2])
            cand = _canonical_from(nb, _compose(cur.transform, move))
            if key(cand) < key(cur) and (best is None or key(cand) < key(best[1])):
                best = (nb, cand)
        if best is None:
            break
        b, cur = best
    # the greedy descent can stop one move short of the minimum among forms of
    # the same size (a swap followed by a sign change), so search that level set
    size = key(cur)[:2]
    seen = {(cur.n, cur.m, cur.r)}
    frontier = [(b, cur)]
    best = cur
    while frontier and len(seen) < 64:
        nxt = []
        for fb, fc in frontier:
            for g2, h2 in _stabilizer_moves(d2, fc):
                nb = fb.left_act(g2, h2)
                move = (g2, h2, ((1, -nb.t2[0][0]), (0, 1)))
                nb = nb.right_mul(move[2])
                cand = _canonical_from(nb, _compose(fc.transform, move))
                if key(cand)[:2] > size or (cand.n, cand.m, cand.r) in seen:
                    continue
                seen.add((cand.n, cand.m, cand.r))
                nxt.append((nb, cand))
                if key(cand) < key(best):
                    best = cand
        frontier = nxt
    return best


# -- exact canonical forms for the residual Gamma_0(a) action
#
# With T1 = diag(1, a) fixed, the moves (g, y^-1 g^-1 y) with g in Gamma_0(a)
# act on T2 = [[0, -m], [n, r]] through the binary form [a n, r, m] by
# composition with g^-1. A class is therefore the SL2(Z)-reduced form together
# with a point of P^1(Z/a) modulo the automorphs of the reduced form.


def _compose_form(f, mat):
    """f o mat for f = (A, B, C) meaning A x^2 + B xy + C y^2."""
    a, b, c = f
    (p, q), (s, t) = mat
    return (a * p * p + b * p * s + c * s * s,
            2 * a * p * q + b * (p * t + q * s) + 2 * c * s * t,
            a * q * q + b * q * t + c * t * t)


def _sl2_reduce_form(f):
    """(f_red, rho) with f_red = f o rho, rho in SL2(Z), for positive definite f."""
    rho = ((1, 0), (0, 1))
    for _ in range(10000):
        a, b, c = f
        if a > c or (a == c and b < 0):
            move = ((0, -1), (1, 0))
        elif abs(b) > a or b == -a:
            k = (a - b) // (2 * a)
            move = ((1, k), (0, 1))
        else:
            return f, rho
        f = _compose_form(f, move)
        rho = mul2(rho, move)
    raise ReductionIncomplete("binary form reduction did not terminate")


def _automorphs(f):
    out = []
    for p in (-1, 0, 1):
        for q in (-1, 0, 1):
            for s in (-1, 0, 1):
                for t in (-1, 0, 1):
                    if p * t - q * s == 1 and _compose_form(f, ((p, q), (s, t))) == f:
                        out.append(((p, q), (s, t)))
    return out


def _p1_normal(x, y, a):
    if a == 1:
        return (0, 0)
    return min(((u * x) % a, (u * y) % a) for u in range(1, a) if gcd(u, a) == 1)


def _gamma0_canonical(a: int, b: PairB, cur: Rank3Canonical, key):
    phi = (a * cur.n, cur.r, cur.m)
    disc = phi[1] ** 2 - 4 * phi[0] * phi[2]
    if disc >= 0 or phi[0] <= 0:
        return None
    red, rho = _sl2_reduce_form(phi)
    tau = _inverse(rho)
    auts = _automorphs(red)
    orbit = {_p1_normal(*_col(mul2(e, tau)), a) for e in auts}
    # a class member with |r'| <= R has n' m' = (r'^2 - disc) / (4a) <= cap(R);
    # grow the cap until something turns up, then search once more at the cap
    # implied by the best |r'| found, which makes the minimum exact
    cap = -disc // (4 * a) + 1
    best = None
    while best is None:
        best = _class_search(red, a, orbit, cap)
        cap *= 4
    need = (best[0][0] ** 2 - disc) // (4 * a) + 1
    if need > cap // 4:
        best = _class_search(red, a, orbit, need)
    if best is None:
        return None
    tp = best[1]
    for e in auts:
        gamma = mul2(mul2(rho, _inverse(e)), tp)
        if gamma[1][0] % a == 0:
            break
    else:
        return None
    g = _inverse(gamma)
    h = ((gamma[0][0], gamma[0][1] * a), (gamma[1][0] // a, gamma[1][1]))
    nb = b.left_act(g, h)
    move = (g, h, ((1, -nb.t2[0][0]), (0, 1)))
    nb = nb.right_mul(move[2])
    out = _canonical_from(nb, _compose(cur.transform, move))
    if nb.t1 != b.t1:
        return None
    return out


def _class_search(red, a: int, orbit: set, cap: int):
    """Least key among f_red o tau with first column in the orbit and n', m' <= cap."""
    col_cap = 2 * a * cap // red[0] + 1
    lim = isqrt(col_cap) + 1
    best = None
    for p in range(-lim, lim + 1):
        for s in range(-lim, lim + 1):
            if p * p + s * s > col_cap or gcd(p, s) != 1:
                continue
            if _p1_normal(p, s, a) not in orbit:
                continue
            big_a = _compose_form(red, ((p, 0), (s, 1)))[0]
            if big_a % a or big_a > a * cap:
                continue
            g0, x, y = _xgcd(p, s)
            # p x + s y = g0 = +-1, so (q, t) = g0 (-y, x) has p t - q s = 1
            q0, t0 = -y * g0, x * g0
            for k in _k_range(red, p, s, q0, t0, cap):
                tp = ((p, q0 + k * p), (s, t0 + k * s))
                fa, fb, fc = _compose_form(red, tp)
                n, m = fa // a, fc
                ck = (abs(fb), n + m, -fb, -n, -m)
                if best is None or ck < best[0]:
                    best = (ck, tp)
    return best


def _k_range(f, p, s, q0, t0, cap):
    """k with f(q0 + k p, t0 + k s) <= cap."""
    a2 = _compose_form(f, ((p, 0), (s, 1)))[0]
    # f(q0 + k p, t0 + k s) = a2 k^2 + l k + c0
    l = 2 * f[0] * p * q0 + f[1] * (p * t0 + q0 * s) + 2 * f[2] * s * t0
    c0 = f[0] * q0 * q0 + f[1] * q0 * t0 + f[2] * t0 * t0
    k0 = -l // (2 * a2)
    lo = hi = k0
    while a2 * (lo - 1) ** 2 + l * (lo - 1) + c0 <= cap:
        lo -= 1
    while a2 * (hi + 1) ** 2 + l * (hi + 1) + c0 <= cap:
        hi += 1
    return range(lo - 1, hi + 2)


def _inverse(m):
    (p, q), (s, t) = m
    return ((t, -q), (-s, p))


def _col(m):
    return m[0][0], m[1][0]


def gauss_reduce_pair(pair: PairB, budget: int = 10000):
    """Right SL2(Z) move u with T(pair * u) Gauss-reduced; needs disc T(B) <= 0.

    Positive semi-definite degenerate forms end as (a, 0, 0)."""
    u = ((1, 0), (0, 1))
    b = pair
    for _ in range(budget):
        a, bb, c = b.t_form().triple()
        if a == 0 and bb == 0 and c == 0:
            return b, u
        if a < 0 or c < 0 or bb * bb > 4 * a * c:
            raise DomainError(f"T(B) = {(a, bb, c)} is not positive semi-definite")
        if (a == 0 and c != 0) or (a > c and c > 0):
            move = ((0, -1), (1, 0))
        elif a > 0 and abs(bb) > a:
            k = round(Fraction(bb, 2 * a))
            move = ((1, k), (0, 1))
        else:
            return b, u
        b = b.right_mul(move)
        u = mul2(u, move)
    raise ReductionIncomplete("binary form reduction did not terminate")


def reduce_pair_rank3(pair: PairB, search: int = 12, check_psd: bool = True) -> Rank3Canonical:
    """Bring a primitive pair with Q >= 0 to [y_alpha, -n b4 - m b-4 + r b-3].

    The first slot is a content-one combination p T1 + q T2 of least positive
    norm; ties are broken by the smallest |r|, then the smallest |n| + |m|.
    """
    if not pair.is_integral() or pair.is_zero() or pair.content() != 1:
        raise DomainError("reduce_pair_rank3 needs a primitive integral pair")
    if pair.q() < 0:
        raise DomainError("Q(B) must be non-negative")
    if rank(pair) < 3:
        raise DomainError("pair has rank below 3")
    if check_psd and psd_status(pair).status == "NOT_PSD":
        raise DomainError("pair is not positive semi-definite")
    pre, u0 = gauss_reduce_pair(pair)
    out = _reduce_reduced(pre, search)
    out.transform = _compose((((1, 0), (0, 1)), ((1, 0), (0, 1)), u0), out.transform)
    if apply_cube(pair, out.transform) != out.pair():
        raise ReductionIncomplete("recorded transform does not reproduce the canonical pair")
    return out


def _reduce_reduced(pair: PairB, search: int) -> Rank3Canonical:
    # det(p T1 + q T2) = A p^2 + B pq + C q^2
    x, y = pair.t1, pair.t2
    fa, fc = det2(x), det2(y)
    fb = x[0][0] * y[1][1] + x[1][1] * y[0][0] - x[0][1] * y[1][0] - x[1][0] * y[0][1]
    slots = []
    for p in range(-search, search + 1):
        for q in range(-search, search + 1):
            qv = fa * p * p + fb * p * q + fc * q * q
            if qv <= 0 or gcd(p, q) != 1:
                continue
            v = [p * x[i][j] + q * y[i][j] for i in range(2) for j in range(2)]
            if gcd(gcd(v[0], v[1]), gcd(v[2], v[3])) == 1:
                slots.append((qv, p, q))
    if not slots:
        raise ReductionIncomplete("no primitive positive combination found within the search box")
    least = min(s[0] for s in slots)
    best = None
    for qv, p, q in slots:
        if qv != least:
            continue
        cand = _reduce_from_slot(pair, p, q)
        if cand is None:
            continue
        key = (abs(cand.r), abs(cand.n) + abs(cand.m), -cand.r, -cand.n, -cand.m, abs(p) + abs(q), -p, -q)
        if best is None or key < best[0]:
            best = (key, cand)
    if best is None:
        raise ReductionIncomplete("first slot is not primitive after the k-shift")
    return best[1]


# -- rank stratification


def _sl2q_to_e1(c):
    """Element of SL2(Q) sending the nonzero column c to a multiple of e1."""
    c1, c2 = Fraction(c[0]), Fraction(c[1])
    if c1 != 0:
        return ((1 / c1, Fraction(0)), (-c2, c1))
    return ((Fraction(0), 1 / c2), (-c2, Fraction(0)))


def _rank_of_c(c) -> int:
    if norm_e(c) != 0:
        return 3
    if any(v != 0 for v in sharp_e(c)):
        return 2
    if any(v != 0 for v in c):
        return 1
    return 0


def reduce_to_c_form(pair: PairB) -> WECoord:
    """Reduce a pair with Q = 0 over Q to the shape (0, 0, C, d)."""
    b = PairB(*(tuple(tuple(Fraction(v) for v in row) for row in m) for m in (pair.t1, pair.t2)))
    if b.q() != 0:
        raise DomainError("only pairs with Q = 0 reduce to (0, 0, C, d)")
    if b.is_zero():
        return WECoord(0, (0, 0, 0), (0, 0, 0), 0)
    t1c, t2c = coords(b.t1), coords(b.t2)
    dependent = all(t1c[i] * t2c[j] - t1c[j] * t2c[i] == 0 for i in range(4) for j in range(i + 1, 4))
    if dependent:
        if all(v == 0 for v in t1c):
            b = b.right_mul(((0, -1), (1, 0)))
        t1c, t2c = coords(b.t1), coords(b.t2)
        if any(v != 0 for v in t2c):
            k = next(i for i in range(4) if t1c[i] != 0)
            lam = Fraction(t2c[k]) / t1c[k]
            b = b.right_mul(((1, -lam), (0, 1)))
        x = b.t1
        col = (x[0][0], x[1][0]) if (x[0][0], x[1][0]) != (0, 0) else (x[0][1], x[1][1])
        if col == (x[0][1], x[1][1]) and (x[0][0], x[1][0]) == (0, 0):
            b = b.left_act(((1, 0), (0, 1)), ((0, -1), (1, 0)))
            x = b.t1
            col = (x[0][0], x[1][0])
        g = _sl2q_to_e1(col)
        b = b.left_act(g, ((1, 0), (0, 1)))
        x = b.t1
        if x[0][1] != 0:
            b = b.left_act(((1, 0), (0, 1)), ((1, -x[0][1] / x[0][0]), (0, 1)))
        # now x = diag-ish: [[p, 0], [0, s]]; rotate into the anti-diagonal
        b = b.left_act(((0, -1), (1, 0)), ((1, 0), (0, 1)))
    else:
        tf = b.t_form()
        a_, b_, c_ = tf.a, tf.b, tf.c
        if c_ == 0:
            x0, y0 = Fraction(0), Fraction(-1)
        elif a_ == 0:
            x0, y0 = Fraction(1), Fraction(0)
        else:
            x0, y0 = Fraction(-b_, 2 * a_), Fraction(1)
            if a_ * x0 * x0 + b_ * x0 * y0 + c_ * y0 * y0 != 0:
                raise ReductionIncomplete("T(B) has no rational double root")
        # column (x0, -y0) gives the singular member x0 T1 - y0 T2
        if y0 != 0:
            u = ((-1 / y0, x0), (Fraction(0), -y0))
        else:
            u = ((Fraction(0), x0), (-1 / x0, Fraction(0)))
        b = b.right_mul(u)
        s = b.t2
        col = (s[0][0], s[1][0]) if (s[0][0], s[1][0]) != (0, 0) else (s[0][1], s[1][1])
        g = _sl2q_to_e1(col)
        b = b.left_act(g, ((1, 0), (0, 1)))
        s = b.t2
        row = (s[0][0], s[0][1])
        gt = _sl2q_to_e1(row)
        h = ((gt[0][0], gt[1][0]), (gt[0][1], gt[1][1]))
        b = b.left_act(((1, 0), (0, 1)), h)
    w = to_we(b)
    if w.a != 0 or any(v != 0 for v in w.beta):
        raise ReductionIncomplete(f"cube reduction did not reach (0,0,C,d): {w}")
    return w


def rank(pair: PairB) -> int:
    if pair.is_zero():
        return 0
    if pair.q() != 0:
        return 4
    w = reduce_to_c_form(pair)
    return _rank_of_c(w.gamma)


def rank_by_flattenings(pair: PairB) -> int:
    """Independent rank oracle from the ranks of the three 2x4 flattenings of the cube."""
    if pair.is_zero():
        return 0
    if pair.q() != 0:
        return 4
    w = to_we(pair)
    cube = {
        (0, 0, 0): w.a,
        (1, 0, 0): w.beta[0], (0, 1, 0): w.beta[1], (0, 0, 1): w.beta[2],
        (0, 1, 1): w.gamma[0], (1, 0, 1): w.gamma[1], (1, 1, 0): w.gamma[2],
        (1, 1, 1): w.d,
    }
    ranks = []
    for axis in range(3):
        rows = []
        for i in range(2):
            row = []
            for j in range(2):
                for k in range(2):
                    idx = [j, k]
                    idx.insert(axis, i)
                    row.append(Fraction(cube[tuple(idx)]))
            rows.append(row)
        nz = [any(v != 0 for v in r) for r in rows]
        r2 = any(rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i] != 0 for i in range(4) for j in range(4))
        ranks.append(2 if r2 else (1 if any(nz) else 0))
    ones = ranks.count(1)
    if ones == 3:
        return 1
    if ones == 1:
        return 2
    return 3


def random_sl2(rng, length: int = 6):
    """Random word of the given length in the standard SL2(Z) generators."""
    gens = [((1, 1), (0, 1)), ((1, -1), (0, 1)), ((1, 0), (1, 1)), ((1, 0), (-1, 1)), ((0, -1), (1, 0))]
    m = ((1, 0), (0, 1))
    for _ in range(length):
        m = mul2(m, rng.choice(gens))
    return m


def isqrt_exact(n: int):
    r = isqrt(n)
    return r if r * r == n else None
