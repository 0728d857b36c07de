"""Genus-two Siegel coefficient tables, the Maass lift from index-one Jacobi
forms, and coefficient tables on the orthogonal group of signature (1, 2) with
their Fourier-Jacobi slices and growth / vanishing diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import DomainError, InsufficientData, InsufficientPrecision, OutOfBound
from .exact import divisors
from .jacobi import GrowthReport, JacobiForm, growth_report
from .pairspace import _num, vec

Triple = tuple  # (a, b, c) for the form a x^2 + b xy + c y^2


# -- binary forms under GL2(Z)


def transform_triple(t: Triple, u) -> Triple:
    """The triple of tU T U, where T = (a, b/2; b/2, c)."""
    a, b, c = t
    (p, q), (r, s) = u
    return (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )


def reduce_triple(t: Triple) -> Triple:
    """GL2(Z)-reduced representative of a positive semi-definite form:
    0 <= b <= a <= c, with rank-one forms sent to (0, 0, c)."""
    a, b, c = t
    if a < 0 or c < 0 or 4 * a * c - b * b < 0:
        raise DomainError(f"form {t} is not positive semi-definite")
    while True:
        if a == 0:
            if b != 0:
                raise DomainError(f"form {t} is not positive semi-definite")
            return (0, 0, c)
        # b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            b, c = b + 2 * a * k, a * k * k + b * k + c
        if c < a:
            a, b, c = c, -b, a
            continue
        return (a, abs(b), c)


def reduced_triples(disc_max: int, semidefinite: bool = False) -> list[Triple]:
    """All reduced (a, b, c) with 0 < 4ac - b^2 <= disc_max, plus (0, 0, c) for
    1 <= c <= disc_max when ``semidefinite``."""
    out = []
    a = 1
    while 3 * a * a <= disc_max:
        for b in range(0, a + 1):
            c = a
            while 4 * a * c - b * b <= disc_max:
                if 4 * a * c - b * b > 0:
                    out.append((a, b, c))
                c += 1
        a += 1
    if semidefinite:
        out += [(0, 0, c) for c in range(1, disc_max + 1)]
    return sorted(out, key=lambda t: (4 * t[0] * t[2] - t[1] ** 2, t))


def triple_content(t: Triple) -> int:
    return math.gcd(math.gcd(t[0], t[1]), t[2])


# -- Siegel tables


@dataclass
class SiegelCoeffTable:
    """Coefficients B[T] on reduced triples with 4ac - b^2 <= bound.

    Positive-definite coverage is complete through ``bound``; forms that are
    only semi-definite are stored when ``semidefinite`` is set and read as 0
    otherwise.
    """

    weight: int
    entries: dict
    bound: int
    semidefinite: bool = False
    name: str = ""

    def value(self, t: Triple):
        a, b, c = t
        d = 4 * a * c - b * b
        if d < 0 or a < 0 or c < 0:
            return 0
        if d > self.bound:
            raise OutOfBound(f"4ac - b^2 = {d} exceeds table bound {self.bound}")
        return self.entries.get(reduce_triple(t), 0)

    __getitem__ = value

    def is_cuspidal_support(self) -> bool:
        return all(4 * a * c - b * b > 0 for (a, b, c), v in self.entries.items() if v)

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "bound": self.bound,
            "entries": {f"{a},{b},{c}": str(v) for (a, b, c), v in sorted(self.entries.items())},
        }

    @classmethod
    def from_json(cls, data) -> "SiegelCoeffTable":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            entries = {}
            for k, v in data["entries"].items():
                a, b, c = (int(x) for x in k.split(","))
                entries[reduce_triple((a, b, c))] = _num(Fraction(v))
            return cls(int(data["weight"]), entries, int(data["bound"]), any(4 * a * c == b * b for a, b, c in entries))
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"malformed Siegel table: {exc}") from exc


def maass_lift(phi: JacobiForm, bound: int) -> SiegelCoeffTable:
    """B[(a,b,c)] = sum over d | gcd(a,b,c) of d^(l-1) C((4ac - b^2)/d^2)."""
    if not phi.cuspidal and not phi.is_cusp_by_coefficients():
        raise DomainError("the Maass lift here takes cusp forms only")
    if bound <= 0:
        raise DomainError("bound must be positive")
    if phi.max_disc < bound:
        raise InsufficientPrecision(f"Jacobi form covers D <= {phi.max_disc}, lift needs {bound}")
    k = phi.weight
    entries = {}
    for t in reduced_triples(bound):
        a, b, c = t
        disc = 4 * a * c - b * b
        s = 0
        for d in divisors(triple_content(t)):
            s += d ** (k - 1) * phi.disc_coeff(disc // (d * d))
        if s:
            entries[t] = s
    return SiegelCoeffTable(k, entries, bound, False, f"maass_lift({phi.name or 'phi'})")


def synthetic_siegel(f: Callable[[int, int], object], bound: int, weight: int = 0, name: str = "synthetic") -> SiegelCoeffTable:
    """Table with B[T] = f(4ac - b^2, content(T)) on positive-definite T."""
    if bound <= 0:
        raise DomainError("bound must be positive")
    entries = {}
    for t in reduced_triples(bound):
        v = f(4 * t[0] * t[2] - t[1] ** 2, triple_content(t))
        if v:
            entries[t] = _num(Fraction(v))
    return SiegelCoeffTable(weight, entries, bound, False, name)


def siegel_to_mprime(t: Triple) -> tuple:
    """The vector -c b4 - (b/2)(b3 - b-3) - a b-4 as a 2x2 matrix."""
    a, b, c = t
    h = Fraction(b, 2)
    return vec(b3=-h, b4=-c, bm4=-a, bm3=h)


# -- indices and tables on the (1, 2) space


@dataclass(frozen=True)
class MPrimeIndex:
    """S = -n b4 - m b-4 - (r/alpha) y with y = b3 - (alpha/2) b-3."""

    n: int
    m: int
    r: int
    alpha: int = 2

    def __post_init__(self):
        if self.alpha <= 0 or self.alpha % 2:
            raise DomainError("alpha must be a positive even integer")

    def vector(self) -> tuple:
        return vec(
            b3=Fraction(-self.r, self.alpha),
            b4=-self.n,
            bm4=-self.m,
            bm3=Fraction(self.r, 2),
        )

    def pairing(self) -> Fraction:
        """(S, S) = 2nm - r^2 / alpha."""
        return _num(Fraction(2 * self.n * self.m) - Fraction(self.r * self.r, self.alpha))

    def disc(self) -> int:
        """alpha (S, S) = 2 alpha n m - r^2."""
        return 2 * self.alpha * self.n * self.m - self.r * self.r

    def in_dual_cone(self) -> bool:
        return self.n >= 0 and self.m >= 0 and self.disc() >= 0

    def content(self) -> int:
        return math.gcd(math.gcd(self.n, self.m), self.r)

    @classmethod
    def from_vector(cls, x, alpha: int) -> "MPrimeIndex":
        b3, b4, bm4, bm3 = (Fraction(v) for v in (x[0][0], -x[1][0], x[0][1], x[1][1]))
        r = -b3 * alpha
        if r.denominator != 1 or bm3 != Fraction(r, 2) or b4.denominator != 1 or bm4.denominator != 1:
            raise DomainError("vector is not in the dual lattice spanned by b4, y/alpha, b-4")
        return cls(int(-b4), int(-bm4), int(r), alpha)


def mprime_from_siegel(t: Triple) -> MPrimeIndex:
    """The alpha = 2 index of siegel_to_mprime(t): (n, m, r) = (c, a, b)."""
    a, b, c = t
    return MPrimeIndex(c, a, b, 2)


@dataclass
class MPrimeCoeffTable:
    """A[S] on indices with 0 <= n, m <= box and 2 alpha n m - r^2 <= bound."""

    weight: int
    alpha: int
    entries: dict = field(default_factory=dict)
    bound: int = 0
    box: int = 0
    name: str = ""

    def value(self, s: MPrimeIndex):
        if s.alpha != self.alpha:
            raise DomainError("alpha mismatch")
        if s.n > self.box or s.m > self.box or s.disc() > self.bound:
            raise OutOfBound(f"{s} outside the covered range")
        return self.entries.get((s.n, s.m, s.r), 0)

    def indices(self) -> Iterable[MPrimeIndex]:
        for (n, m, r) in self.entries:
            yield MPrimeIndex(n, m, r, self.alpha)

    def support_violations(self) -> list:
        return [k for k, v in self.entries.items() if v and not MPrimeIndex(*k, self.alpha).in_dual_cone()]

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "alpha": self.alpha,
            "bound": self.bound,
            "box": self.box,
            "entries": {f"{n},{m},{r}": str(v) for (n, m, r), v in sorted(self.entries.items())},
        }

    @classmethod
    def from_json(cls, data) -> "MPrimeCoeffTable":
        if isinstance(data, str):
            data = json.loads(data)
        entries = {tuple(int(x) for x in k.split(",")): _num(Fraction(v)) for k, v in data["entries"].items()}
        return cls(int(data["weight"]), int(data["alpha"]), entries, int(data["bound"]), int(data["box"]))


def mprime_table_from_siegel(table: SiegelCoeffTable, box: int) -> MPrimeCoeffTable:
    """Re-index a Siegel table at alpha = 2, covering n, m <= box."""
    entries = {}
    for n in range(box + 1):
        for m in range(box + 1):
            rmax = math.isqrt(4 * n * m)
            for r in range(-rmax, rmax + 1):
                if 4 * n * m - r * r > table.bound:
                    continue
                v = table.value((m, r, n))
                if v:
                    entries[(n, m, r)] = v
    return MPrimeCoeffTable(table.weight, 2, entries, table.bound, box, table.name)


def fj_slice(table: MPrimeCoeffTable, m: int) -> dict:
    """The m-th Fourier-Jacobi coefficient as {(n, r): A[-n b4 - m b-4 - (r/alpha) y]}."""
    if m < 0:
        raise DomainError("m must be non-negative")
    if m > table.box:
        raise OutOfBound(f"m = {m} beyond box {table.box}")
    out = {}
    for (n, mm, r), v in table.entries.items():
        if mm == m and v:
            out[(n, r)] = v
    return out


def mprime_hecke_classifier(table: MPrimeCoeffTable, weight: int, **kw) -> GrowthReport:
    """Hecke-bound test |A[S]| << (S, S)^((l+1)/2) over indices with (S, S) > 0."""
    if weight < 5:
        raise DomainError("the classifier needs weight >= 5")
    # every covered index counts, stored or not, so a zero table has full data
    pts = []
    for n in range(1, table.box + 1):
        for m in range(1, table.box + 1):
            rmax = math.isqrt(2 * table.alpha * n * m)
            for r in range(-rmax, rmax + 1):
                s = MPrimeIndex(n, m, r, table.alpha)
                if 0 < s.disc() <= table.bound:
                    pts.append((s.pairing(), table.entries.get((n, m, r), 0)))
    if len(pts) < 100:
        raise InsufficientData(f"only {len(pts)} indices with (S,S) > 0, need 100")
    kw.setdefault("min_size", 0)
    return growth_report(pts, (weight + 1) / 2, **kw)


@dataclass
class VanishingReport:
    verdict: str
    witnesses: list
    bound: int
    warning: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "bound": self.bound,
            "warning": self.warning,
            "witnesses": [w if isinstance(w, dict) else list(w) for w in self.witnesses],
        }


def mprime_primitive_vanishing(table: MPrimeCoeffTable, bound: int = 50) -> VanishingReport:
    """Nonzero A[S] at primitive S (gcd(n, m, r) = 1) with alpha (S, S) <= bound."""
    if bound < 50:
        raise DomainError("the primitive vanishing check needs bound >= 50")
    if bound > table.bound:
        raise InsufficientData(f"table covers discriminant <= {table.bound}, asked for {bound}")
    wit, imprim = [], 0
    for s in sorted(table.indices(), key=lambda s: (s.disc(), s.n, s.m, s.r)):
        v = table.entries[(s.n, s.m, s.r)]
        if not v or s.disc() > bound:
            continue
        if s.content() == 1:
            wit.append({"n": s.n, "m": s.m, "r": s.r, "value": str(v)})
        else:
            imprim += 1
    if wit:
        return VanishingReport("nonzero-primitive-coefficient", wit, bound)
    warn = ""
    if imprim:
        warn = f"{imprim} nonzero imprimitive coefficients; a genuine modular form with this pattern vanishes"
    return VanishingReport("consistent-with-zero through bound", [], bound, warn)
