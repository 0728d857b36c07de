"""Truncated q-expansions with exact rational coefficients, level-one modular
forms, eta products and Jacobi theta series in two variables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Sequence

from .errors import DomainError, InsufficientPrecision
from .exact import sigma


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def _convolve(a: Sequence, b: Sequence, n: int) -> list:
    """First n+1 coefficients of the product of two coefficient lists."""
    out = [0] * (n + 1)
    nz_b = [(j, v) for j, v in enumerate(b[: n + 1]) if v]
    for i, x in enumerate(a[: n + 1]):
        if not x:
            continue
        lim = n - i
        for j, y in nz_b:
            if j > lim:
                break
            out[i + j] += x * y
    return out


class QSeries:
    """sum_{k=0}^{trunc} c_k q^(k + shift); coefficients past trunc are unknown.

    ``shift`` is a rational exponent offset, used for eta powers and theta
    constants; it is zero for ordinary modular forms.
    """

    __slots__ = ("coeffs", "trunc", "shift")

    def __init__(self, coeffs: Iterable, trunc: int | None = None, shift=0):
        c = [_norm(Fraction(v)) if not isinstance(v, int) else v for v in coeffs]
        if trunc is None:
            trunc = len(c) - 1
        if trunc < 0:
            raise DomainError("truncation must be non-negative")
        c = (c + [0] * (trunc + 1 - len(c)))[: trunc + 1]
        self.coeffs = tuple(c)
        self.trunc = trunc
        self.shift = Fraction(shift)

    # -- construction
    @classmethod
    def zero(cls, n: int) -> "QSeries":
        return cls([0] * (n + 1), n)

    @classmethod
    def one(cls, n: int) -> "QSeries":
        return cls([1] + [0] * n, n)

    @classmethod
    def from_dict(cls, d: dict, n: int) -> "QSeries":
        c = [0] * (n + 1)
        for k, v in d.items():
            if 0 <= k <= n:
                c[k] = v
        return cls(c, n)

    # -- access
    def __getitem__(self, k: int):
        if k < 0:
            return 0
        if k > self.trunc:
            raise InsufficientPrecision(f"coefficient q^{k} requested beyond truncation {self.trunc}")
        return self.coeffs[k]

    def __len__(self):
        return self.trunc + 1

    def truncate(self, n: int) -> "QSeries":
        if n > self.trunc:
            raise InsufficientPrecision(f"cannot extend truncation {self.trunc} to {n}")
        return QSeries(self.coeffs[: n + 1], n, self.shift)

    def valuation(self):
        for k, v in enumerate(self.coeffs):
            if v:
                return k
        return None

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs)

    # -- arithmetic
    def _check_shift(self, other):
        if self.shift != other.shift:
            raise DomainError("cannot add series with different exponent offsets")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + QSeries([other], self.trunc)
        self._check_shift(other)
        n = min(self.trunc, other.trunc)
        return QSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])], n, self.shift)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-a for a in self.coeffs], self.trunc, self.shift)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([a * other for a in self.coeffs], self.trunc, self.shift)
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.trunc, other.trunc)
        return QSeries(_convolve(self.coeffs, other.coeffs, n), n, self.shift + other.shift)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([Fraction(a) / other for a in self.coeffs], self.trunc, self.shift)
        return self * other.power(-1)

    def __pow__(self, e: int):
        return self.power(e)

    def power(self, e) -> "QSeries":
        """f^e for f with non-zero constant term, by the Euler recurrence
        g_n = (1/(n f0)) sum_{k=1}^n ((e+1)k - n) f_k g_{n-k}; e may be rational."""
        f = self.coeffs
        if not f or f[0] == 0:
            raise DomainError("power needs a non-zero constant term")
        e = Fraction(e)
        n = self.trunc
        f0 = Fraction(f[0])
        if f0 != 1 and e.denominator != 1:
            raise DomainError("rational powers need constant term 1")
        nz = [(k, f[k]) for k in range(1, n + 1) if f[k]]
        if e.denominator == 1 and f0 in (1, -1) and all(Fraction(v).denominator == 1 for _, v in nz):
            return QSeries(self._unit_power_int(int(e), int(f0), [(k, int(v)) for k, v in nz], n), n, self.shift * e)
        g = [Fraction(0)] * (n + 1)
        g[0] = f0 ** int(e) if e.denominator == 1 else Fraction(1)
        for m in range(1, n + 1):
            s = 0
            for k, fk in nz:
                if k > m:
                    break
                s += ((e + 1) * k - m) * fk * g[m - k]
            g[m] = s / (m * f0)
        return QSeries(g, n, self.shift * e)

    @staticmethod
    def _unit_power_int(e: int, f0: int, nz, n: int) -> list[int]:
        # same recurrence in exact integers; every g_m is integral here
        g = [0] * (n + 1)
        g[0] = f0 ** abs(e)
        for m in range(1, n + 1):
            s = 0
            for k, fk in nz:
                if k > m:
                    break
                s += ((e + 1) * k - m) * fk * g[m - k]
            q, r = divmod(s, m * f0)
            if r:
                raise DomainError("non-integral coefficient in an integral power")
            g[m] = q
        return g

    def derivative(self) -> "QSeries":
        """q d/dq."""
        return QSeries([(k + self.shift) * v for k, v in enumerate(self.coeffs)], self.trunc, self.shift)

    def normalized(self) -> "QSeries":
        """Absorb an integral shift into the coefficient list."""
        if self.shift.denominator != 1:
            raise DomainError("shift is not integral")
        s = int(self.shift)
        if s >= 0:
            return QSeries([0] * s + list(self.coeffs), self.trunc + s)
        if any(self.coeffs[:-s]):
            raise DomainError("negative powers of q present")
        return QSeries(self.coeffs[-s:], self.trunc + s)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.trunc, other.trunc)
        return self.shift == other.shift and self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def __hash__(self):
        return hash((self.coeffs, self.shift))

    def __repr__(self):
        terms = [f"{v}*q^{k}" for k, v in enumerate(self.coeffs[:6]) if v]
        return f"QSeries({' + '.join(terms) or '0'} + O(q^{self.trunc + 1}))"

    # -- serialization
    def to_json(self) -> dict:
        return {"trunc": self.trunc, "coeffs": {str(k): str(v) for k, v in enumerate(self.coeffs) if v}}

    @classmethod
    def from_json(cls, data) -> "QSeries":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["trunc"])
        return cls.from_dict({int(k): Fraction(v) for k, v in data["coeffs"].items()}, n)


# -- level-one modular forms


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2, via the standard recurrence."""
    b = [Fraction(1)]
    for m in range(1, k + 1):
        s = sum(comb(m + 1, j) * b[j] for j in range(m))
        b.append(-s / (m + 1))
    return b[k]


@lru_cache(maxsize=64)
def eisenstein(k: int, n: int) -> QSeries:
    if k < 4 or k % 2:
        raise DomainError("Eisenstein series need even k >= 4")
    if n < 0:
        raise DomainError("truncation must be non-negative")
    c = -2 * k / bernoulli(k)
    c = _norm(c)
    return QSeries([1] + [c * sigma(m, k - 1) for m in range(1, n + 1)], n)


@lru_cache(maxsize=8)
def e2(n: int) -> QSeries:
    """The quasi-modular E2 = 1 - 24 sum sigma_1(m) q^m."""
    return QSeries([1] + [-24 * sigma(m, 1) for m in range(1, n + 1)], n)


@lru_cache(maxsize=16)
def euler_product(n: int) -> QSeries:
    """prod_{m>=1} (1 - q^m) via the pentagonal number theorem."""
    c = [0] * (n + 1)
    k = 0
    while True:
        done = True
        for kk in ((k, -k) if k else (0,)):
            p = kk * (3 * kk - 1) // 2
            if p <= n:
                c[p] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    return QSeries(c, n)


@lru_cache(maxsize=32)
def eta_power(e: int, n: int) -> QSeries:
    """eta^e = q^(e/24) prod (1 - q^m)^e, with the offset stored as ``shift``."""
    if n <= 0:
        raise DomainError("truncation must be positive")
    p = euler_product(n).power(e)
    return QSeries(p.coeffs, n, Fraction(e, 24))


@lru_cache(maxsize=8)
def delta(n: int) -> QSeries:
    if n <= 0:
        raise DomainError("truncation must be positive")
    return eta_power(24, n).normalized().truncate(n)


def dim_modular_forms(k: int) -> int:
    """Dimension of M_k for SL2(Z) by the classical formula."""
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_cusp_forms(k: int) -> int:
    if k < 12 or k % 2:
        return 0
    return dim_modular_forms(k) - 1


def sturm_bound(k: int) -> int:
    return k // 12 + 1


def _echelon(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form over Q, zero rows removed."""
    m = [list(map(Fraction, r)) for r in rows]
    out = []
    col = 0
    width = len(m[0]) if m else 0
    while m and col < width:
        piv = next((i for i, r in enumerate(m) if r[col] != 0), None)
        if piv is None:
            col += 1
            continue
        r = m.pop(piv)
        r = [v / r[col] for v in r]
        m = [[a - x[col] * b for a, b in zip(x, r)] for x in m]
        out = [[a - x[col] * b for a, b in zip(x, r)] for x in out]
        out.append(r)
        col += 1
    return out


@lru_cache(maxsize=64)
def modular_forms_basis(k: int, n: int) -> tuple:
    """Echelonized basis of M_k built from monomials E4^a E6^b."""
    if k % 2 or k < 0:
        return ()
    if k == 0:
        return (QSeries.one(n),)
    n_eff = max(n, dim_modular_forms(k) + 1)
    monos = []
    for a in range(k // 4 + 1):
        rest = k - 4 * a
        if rest % 6 == 0:
            monos.append(eisenstein(4, n_eff) ** a * eisenstein(6, n_eff) ** (rest // 6) if a or rest else QSeries.one(n_eff))
    if not monos:
        return ()
    rows = _echelon([list(f.coeffs) for f in monos])
    return tuple(QSeries(r, n_eff).truncate(n) if n_eff > n else QSeries(r, n_eff) for r in rows)


def cusp_basis(k: int, n: int) -> list[QSeries]:
    """Echelonized basis of S_k: the rows of the Miller-type basis with zero
    constant term."""
    if k % 2:
        raise DomainError("weight must be even")
    return [f for f in modular_forms_basis(k, n) if f.coeffs[0] == 0]


@dataclass
class SpaceCertificate:
    member: bool
    weight: int
    combination: list
    checked_through: int


def is_in_space(f: QSeries, k: int, n: int | None = None, cusp: bool = False) -> SpaceCertificate:
    """Exact membership of f in M_k (or S_k) through q^n, with the coefficients
    of f in the echelon basis as certificate."""
    if f.shift != 0:
        return SpaceCertificate(False, k, [], 0)
    n = f.trunc if n is None else n
    if n < sturm_bound(k) or n > f.trunc:
        raise InsufficientPrecision(f"need a truncation >= {sturm_bound(k)} for weight {k}")
    basis = list(cusp_basis(k, n) if cusp else modular_forms_basis(k, n))
    if f.truncate(n).is_zero():
        return SpaceCertificate(True, k, [0] * len(basis), n)
    if not basis:
        return SpaceCertificate(False, k, [], n)
    residual = [Fraction(v) for v in f.coeffs[: n + 1]]
    combo = []
    for b in basis:
        piv = b.valuation()
        c = residual[piv] / b.coeffs[piv]
        combo.append(_norm(c))
        residual = [r - c * v for r, v in zip(residual, b.coeffs[: n + 1])]
    member = all(r == 0 for r in residual)
    return SpaceCertificate(member, k, combo if member else [], n)


# -- two-variable series


class ThetaSeries:
    """Finite sum of c(a, b) q^(a/qden) zeta^(b/zden), complete for a/qden <= trunc."""

    __slots__ = ("coeffs", "trunc", "qden", "zden")

    def __init__(self, coeffs: dict, trunc, qden: int = 1, zden: int = 1):
        self.trunc = Fraction(trunc)
        self.qden = qden
        self.zden = zden
        lim = self.trunc * qden
        self.coeffs = {k: _norm(Fraction(v)) for k, v in coeffs.items() if v and k[0] <= lim}

    def __getitem__(self, key):
        a, b = key
        if Fraction(a, self.qden) > self.trunc:
            raise InsufficientPrecision(f"q^{Fraction(a, self.qden)} beyond truncation {self.trunc}")
        return self.coeffs.get((a, b), 0)

    def coeff(self, n, r):
        """Coefficient of q^n zeta^r for rational exponents."""
        a = Fraction(n) * self.qden
        b = Fraction(r) * self.zden
        if a.denominator != 1 or b.denominator != 1:
            return 0
        return self[(int(a), int(b))]

    def _rescale(self, qden, zden):
        fq, fz = qden // self.qden, zden // self.zden
        return {(a * fq, b * fz): v for (a, b), v in self.coeffs.items()}

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ThetaSeries({k: v * other for k, v in self.coeffs.items()}, self.trunc, self.qden, self.zden)
        if isinstance(other, QSeries):
            return self * ThetaSeries.from_qseries(other)
        qden = _lcm(self.qden, other.qden)
        zden = _lcm(self.zden, other.zden)
        a = self._rescale(qden, zden)
        b = other._rescale(qden, zden)
        lo_a = min((k[0] for k in a), default=0)
        lo_b = min((k[0] for k in b), default=0)
        trunc = min(self.trunc + Fraction(lo_b, qden), other.trunc + Fraction(lo_a, qden))
        lim = trunc * qden
        out: dict = {}
        for (qa, za), va in a.items():
            for (qb, zb), vb in b.items():
                if qa + qb <= lim:
                    key = (qa + qb, za + zb)
                    out[key] = out.get(key, 0) + va * vb
        return ThetaSeries(out, trunc, qden, zden)

    __rmul__ = __mul__

    def __add__(self, other):
        qden = _lcm(self.qden, other.qden)
        zden = _lcm(self.zden, other.zden)
        out = dict(self._rescale(qden, zden))
        for k, v in other._rescale(qden, zden).items():
            out[k] = out.get(k, 0) + v
        return ThetaSeries(out, min(self.trunc, other.trunc), qden, zden)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def from_qseries(cls, f: QSeries) -> "ThetaSeries":
        qden = f.shift.denominator
        off = f.shift * qden
        coeffs = {(int(off) + k * qden, 0): v for k, v in enumerate(f.coeffs)}
        return cls(coeffs, f.trunc + f.shift, qden, 1)

    def simplified(self) -> "ThetaSeries":
        """Reduce the exponent denominators when all exponents allow it."""

        gq, gz = self.qden, self.zden
        for a, b in self.coeffs:
            gq = gcd(gq, a)
            gz = gcd(gz, b)
        return ThetaSeries(
            {(a // gq, b // gz): v for (a, b), v in self.coeffs.items()},
            self.trunc,
            self.qden // gq,
            self.zden // gz,
        )

    def is_antisymmetric(self) -> bool:
        return all(self.coeffs.get((a, -b), 0) == -v for (a, b), v in self.coeffs.items())

    def is_symmetric(self) -> bool:
        return all(self.coeffs.get((a, -b), 0) == v for (a, b), v in self.coeffs.items())

    def __eq__(self, other):
        if not isinstance(other, ThetaSeries):
            return NotImplemented
        t = min(self.trunc, other.trunc)
        qden = _lcm(self.qden, other.qden)
        zden = _lcm(self.zden, other.zden)
        a = {k: v for k, v in self._rescale(qden, zden).items() if k[0] <= t * qden}
        b = {k: v for k, v in other._rescale(qden, zden).items() if k[0] <= t * qden}
        return a == b


def _lcm(a, b):
    return a * b // gcd(a, b)


def jacobi_theta_odd(n) -> ThetaSeries:
    """theta_1(tau, z) = sum_m (-1)^m q^((2m+1)^2/8) zeta^((2m+1)/2), through q^n."""
    if n <= 0:
        raise DomainError("truncation must be positive")
    coeffs = {}
    m = 0
    while (2 * m + 1) ** 2 <= 8 * n:
        for mm in (m, -m - 1):
            coeffs[((2 * mm + 1) ** 2, 2 * mm + 1)] = (-1) ** (mm % 2)
        m += 1
    return ThetaSeries(coeffs, n, 8, 2)


def jacobi_theta_even(which: int, n) -> ThetaSeries:
    """theta_2, theta_3, theta_4 as (q, zeta)-series through q^n."""
    if which not in (2, 3, 4):
        raise DomainError("which must be 2, 3 or 4")
    coeffs = {}
    bound = 0
    while bound * bound <= 8 * n + 8:
        bound += 1
    for m in range(-bound, bound + 1):
        if which == 2:
            e = (2 * m + 1) ** 2
            if e <= 8 * n:
                coeffs[(e, 2 * m + 1)] = 1
        else:
            e = 4 * m * m
            if e <= 8 * n:
                coeffs[(e, 2 * m)] = (-1) ** (m % 2) if which == 4 else 1
    return ThetaSeries(coeffs, n, 8, 2)
