"""Quaternionic coefficient tables Lambda[B] on pairs B = [T1, T2]: the lift from
Siegel cusp forms, the fine Maass relations, the slice-primitive (Spezialschar)
test, Fourier-Jacobi reassembly, constant-term sums, and the vanishing and
cuspidality diagnostics."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import (
    D4Error,
    DomainError,
    InsufficientData,
    MaassViolation,
    OutOfBound,
    SearchExhausted,
)
from .exact import all_right_divisors, hecke_coset_reps, mul2
from .jacobi import GrowthReport, growth_report
from .orbits import random_sl2, reduce_pair_rank3
from .pairspace import (
    PairB,
    _num,
    canonical_slice_primitive,
    is_positive,
    is_slice_primitive,
    iter_box,
    vec,
)
from .siegel import MPrimeCoeffTable, SiegelCoeffTable, VanishingReport

PROVENANCE = ("THETA_LIFT", "SYNTHETIC", "EXTERNAL")


def proper_reduce_triple(t: tuple) -> tuple:
    """SL2(Z)-reduced representative of a positive-definite form:
    |b| <= a <= c, and b >= 0 when |b| = a or a = c."""
    a, b, c = t
    if a <= 0 or 4 * a * c - b * b <= 0:
        raise DomainError(f"form {t} is not positive definite")
    while True:
        k = (a - b) // (2 * a)
        if k:
            b, c = b + 2 * a * k, a * k * k + b * k + c
        if c < a:
            a, b, c = c, -b, a
            continue
        if b < 0 and (-b == a or a == c):
            b = -b
        return (a, b, c)


@dataclass
class QuatCoeffTable:
    """Lambda[B] on a finite set of stored pairs with Q(B) <= bound.

    Keys are stored as given (no orbit canonicalization), so several
    representatives of one orbit may coexist. Lookups of pairs that are not
    stored go to ``evaluator`` when the table carries one, then to the stored
    entry with the same orbit canonical form; a pair found by neither reads as
    0 through ``value`` and as missing through ``lookup``.
    """

    weight: int
    entries: dict = field(default_factory=dict)
    bound: int = 0
    provenance: str = "EXTERNAL"
    cuspidal: bool = False
    evaluator: Callable | None = None
    name: str = ""
    _canon: dict | None = None
    _tindex: dict | None = None
    _pindex: dict | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise DomainError(f"unknown provenance {self.provenance}")

    # -- lookups
    def lookup(self, b: PairB):
        """(True, value) when Lambda[b] is determined by the table, else (False, None)."""
        b = b.normalized()
        if b.q() > self.bound:
            raise OutOfBound(f"Q(B) = {b.q()} exceeds table bound {self.bound}")
        if b in self.entries:
            return True, self.entries[b]
        if self.evaluator is not None:
            return True, self.evaluator(b)
        key = _orbit_key(b)
        if key is not None:
            hit = self._canonical_index().get(key)
            if hit is not None:
                return True, hit
        return False, None

    def value(self, b: PairB):
        found, v = self.lookup(b)
        return v if found else 0

    __getitem__ = value

    def _canonical_index(self) -> dict:
        if self._canon is None:
            idx = {}
            for b, v in self.entries.items():
                key = _orbit_key(b)
                if key is not None:
                    idx.setdefault(key, v)
            self._canon = idx
        return self._canon

    def slice_primitive_groups(self) -> dict:
        """Stored slice-primitive pairs grouped by the exact triple T(B)."""
        if self._tindex is None:
            groups: dict = {}
            for b, v in self.entries.items():
                if not b.is_zero() and is_slice_primitive(b):
                    groups.setdefault(b.t_form().triple(), []).append((b, v))
            self._tindex = groups
        return self._tindex

    def proper_class_groups(self) -> dict:
        """Stored slice-primitive pairs grouped by the SL2(Z) class of T(B)."""
        if self._pindex is None:
            groups: dict = {}
            for t, members in self.slice_primitive_groups().items():
                a, b, c = t
                if a > 0 and 4 * a * c - b * b > 0:
                    groups.setdefault(proper_reduce_triple(t), []).extend(members)
            self._pindex = groups
        return self._pindex

    def with_entry(self, b: PairB, v) -> "QuatCoeffTable":
        """Copy with one entry replaced; the copy drops the evaluator."""
        entries = dict(self.entries)
        entries[b.normalized()] = _num(Fraction(v))
        return QuatCoeffTable(self.weight, entries, self.bound, self.provenance, self.cuspidal, None, self.name)

    # -- serialization
    def to_json(self) -> dict:
        rows = sorted(self.entries.items(), key=lambda kv: (kv[0].q(), str(kv[0])))
        return {
            "weight": self.weight,
            "provenance": self.provenance,
            "bound": self.bound,
            "cuspidal": self.cuspidal,
            "keys": "raw",
            "entries": [{"B": b.to_json(), "value": str(v)} for b, v in rows],
        }

    @classmethod
    def from_json(cls, data) -> "QuatCoeffTable":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            entries = {PairB.from_json(e["B"]).normalized(): _num(Fraction(e["value"])) for e in data["entries"]}
            return cls(
                int(data["weight"]),
                entries,
                int(data["bound"]),
                data.get("provenance", "EXTERNAL"),
                bool(data.get("cuspidal", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed coefficient table: {exc}") from exc


def _orbit_key(b: PairB):
    """Orbit canonical form (content, alpha, n, m, r) where the reduction applies."""
    if b.is_zero() or not b.is_integral():
        return None
    k = b.content()
    try:
        c = reduce_pair_rank3(b.scale(Fraction(1, k)).normalized(), check_psd=False)
    except D4Error:
        return None
    return (k, c.alpha, c.n, c.m, c.r)


# -- the lift


def lift_value(siegel: SiegelCoeffTable, b: PairB, weight: int, rep_provider=None):
    """sum over right divisors r of B of |det r|^(l-1) B[T(B r^-1)], for B > 0."""
    if not is_positive(b):
        return 0
    total = 0
    for n, _r, bp in all_right_divisors(b, rep_provider):
        total += n ** (weight - 1) * siegel.value(bp.siegel_index())
    return total


def lift_index_set(bound: int, seed: int = 0, scrambles: int = 2, box: int = 1) -> list[PairB]:
    """Pairs stored by theta_lift: canonical slice-primitive pairs of every
    SL2(Z)-reduced positive-definite triple, their right multiples by Hermite
    matrices, random SO(2,2)(Z) images, and all positive pairs in a small box."""
    from .siegel import reduced_triples

    rng = random.Random(seed)
    out: dict = {}
    proper = []
    for a, b, c in reduced_triples(bound):
        proper.append((a, b, c))
        if 0 < b < a < c:
            proper.append((a, -b, c))
    for t in proper:
        disc = 4 * t[0] * t[2] - t[1] ** 2
        base = canonical_slice_primitive(*t)
        out[base] = None
        for _ in range(scrambles):
            out[base.left_act(random_sl2(rng), random_sl2(rng))] = None
        n = 2
        while n * n * disc <= bound:
            for r in hecke_coset_reps(n):
                out[base.right_mul(r)] = None
            n += 1
    for b in iter_box(box):
        if 0 < b.q() <= bound and is_positive(b):
            out[b] = None
    return list(out)


def theta_lift(
    siegel: SiegelCoeffTable,
    weight: int | None = None,
    bound: int = 200,
    index_set: list | None = None,
    rep_provider=None,
    seed: int = 0,
) -> QuatCoeffTable:
    """Lambda[B] = sum_r |det r|^(l-1) B[tr^-1 T(B) r^-1] over the right
    divisors r of B, stored on lift_index_set(bound) unless ``index_set`` is given."""
    w = siegel.weight if weight is None else weight
    if w % 2 or w < 16:
        raise DomainError(f"the lift needs even weight >= 16, got {w}")
    if not siegel.is_cuspidal_support():
        raise DomainError("the lift takes cuspidal Siegel tables")
    if bound <= 0:
        raise DomainError("bound must be positive")
    if siegel.bound < bound:
        raise OutOfBound(f"Siegel table covers 4ac - b^2 <= {siegel.bound}, lift needs {bound}")
    pairs = index_set if index_set is not None else lift_index_set(bound, seed)
    entries = {}
    for b in pairs:
        b = b.normalized()
        if b.q() > bound:
            raise OutOfBound(f"Q(B) = {b.q()} exceeds {bound}")
        entries[b] = lift_value(siegel, b, w, rep_provider)

    def evaluator(b: PairB):
        return lift_value(siegel, b, w, rep_provider)

    return QuatCoeffTable(w, entries, bound, "THETA_LIFT", True, evaluator, f"theta_lift({siegel.name})")


def twisted_reps(seed: int):
    """Coset representatives u r with random unimodular u, for re-running the lift."""
    rng = random.Random(seed)

    def provider(n: int):
        return [mul2(random_sl2(rng), r) for r in hecke_coset_reps(n)]

    return provider


# -- Maass relations


def lambda_prim(table: QuatCoeffTable, b: PairB):
    """Lambda[B'] for a slice-primitive B' with T(B') = T(B)."""
    t = b.t_form().triple()
    group = table.slice_primitive_groups().get(t)
    if group:
        vals = {v for _, v in group}
        if len(vals) > 1:
            raise MaassViolation(f"slice-primitive pairs with T = {t} carry different values")
        return group[0][1]
    # right SL2(Z) moves carry a slice-primitive pair to one whose T is any
    # properly equivalent form, so the class determines the value
    a, bb, c = t
    if a > 0 and 4 * a * c - bb * bb > 0:
        group = table.proper_class_groups().get(proper_reduce_triple(t))
        if group:
            if len({v for _, v in group}) > 1:
                raise MaassViolation(f"slice-primitive pairs in the class of {t} carry different values")
            return group[0][1]
    if table.evaluator is not None:
        cand = canonical_slice_primitive(*t)
        if cand.q() <= table.bound:
            return table.evaluator(cand)
    raise SearchExhausted(f"no slice-primitive pair with T = {t} is determined by the table")


@dataclass
class CheckReport:
    name: str
    passed: bool
    checked: int
    violations: list
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            **self.detail,
        }


def maass_relation_check(table: QuatCoeffTable, bound: int | None = None) -> CheckReport:
    """Lambda[B] = sum_r |det r|^(l-1) Lambda_prim[B r^-1] on stored B with Q(B) <= bound."""
    bound = table.bound if bound is None else bound
    violations, missing, checked = [], [], 0
    for b, v in table.entries.items():
        if b.q() > bound or b.is_zero():
            continue
        rhs, gap = 0, False
        for n, _r, bp in all_right_divisors(b):
            try:
                rhs += n ** (table.weight - 1) * lambda_prim(table, bp)
            except SearchExhausted:
                missing.append(bp.t_form().triple())
                gap = True
        if gap:
            continue
        checked += 1
        if rhs != v:
            violations.append({"B": b.to_json(), "stored": str(v), "relation": str(rhs)})
    if missing:
        raise InsufficientData(f"{len(missing)} slice-primitive values missing", sorted(set(missing)))
    return CheckReport("maass", not violations, checked, violations)


def spezialschar_test(table: QuatCoeffTable, bound: int | None = None) -> CheckReport:
    """Slice-primitive pairs with equal T(B) must carry equal values."""
    bound = table.bound if bound is None else bound
    violations, groups, shared = [], 0, 0
    for t, members in sorted(table.slice_primitive_groups().items()):
        members = [(b, v) for b, v in members if b.q() <= bound]
        if not members:
            continue
        groups += 1
        if len(members) > 1:
            shared += 1
        b0, v0 = members[0]
        for b, v in members[1:]:
            if v != v0:
                violations.append({"T": list(t), "B1": b0.to_json(), "value1": str(v0), "B2": b.to_json(), "value2": str(v)})
                break
    return CheckReport("spezialschar", not violations, groups, violations, {"groups_with_several_pairs": shared})


def symmetry_check(table: QuatCoeffTable, trials: int = 200, seed: int = 0) -> CheckReport:
    """Lambda[g B h u] = Lambda[B] at random stored B and random SL2(Z) elements."""
    rng = random.Random(seed)
    keys = sorted(table.entries, key=str)
    violations = []
    for _ in range(trials if keys else 0):
        b = rng.choice(keys)
        moved = b.left_act(random_sl2(rng), random_sl2(rng)).right_mul(random_sl2(rng))
        v = table.value(moved)
        if v != table.entries[b]:
            violations.append({"B": b.to_json(), "moved": moved.to_json(), "stored": str(table.entries[b]), "moved_value": str(v)})
    return CheckReport("symmetry", not violations, trials if keys else 0, violations)


# -- Fourier-Jacobi reassembly and constant terms


def fj_summands(n: int, alpha: int, s_index: tuple) -> list[PairB]:
    """The integral pairs [n y, -n'b4 - m'b-4 + ((s-r')/alpha) b3 + ((s+r')/2) b-3]
    for 0 <= s < n alpha, with y = b3 + (alpha/2) b-3."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if alpha <= 0 or alpha % 2:
        raise DomainError("alpha must be a positive even integer")
    n1, m1, r1 = s_index
    y = vec(b3=n, bm3=n * alpha // 2)
    out = []
    for s in range(n * alpha):
        if (s - r1) % alpha or (s + r1) % 2:
            continue
        out.append(PairB(y, vec(b3=(s - r1) // alpha, b4=-n1, bm4=-m1, bm3=(s + r1) // 2)))
    return out


def fj_assemble(table: QuatCoeffTable, n: int, alpha: int, s_index: tuple):
    """A[S] for S = -n'b4 - m'b-4 - (r'/alpha) y as the finite sum of Lambda over fj_summands."""
    total = 0
    pairs = fj_summands(n, alpha, s_index)
    over = [b.to_json() for b in pairs if b.q() > table.bound]
    if over:
        raise InsufficientData("summands beyond the table bound", over)
    for b in pairs:
        total += table.value(b)
    return total


def fj_table(table: QuatCoeffTable, n: int, alpha: int, box: int) -> MPrimeCoeffTable:
    """fj_assemble over 0 <= n', m' <= box with 2 alpha n' m' - r'^2 <= the table bound."""
    entries = {}
    for n1 in range(box + 1):
        for m1 in range(box + 1):
            rmax = 0
            while (rmax + 1) ** 2 <= 2 * alpha * n1 * m1:
                rmax += 1
            for r1 in range(-rmax - 1, rmax + 2):
                if any(b.q() > table.bound for b in fj_summands(n, alpha, (n1, m1, r1))):
                    continue
                v = fj_assemble(table, n, alpha, (n1, m1, r1))
                if v:
                    entries[(n1, m1, r1)] = v
    return MPrimeCoeffTable(table.weight, alpha, entries, table.bound, box, f"fj({table.name}, n={n})")


def constant_term_pairs(c: tuple, pairing: int) -> list[PairB]:
    """[a b3 + c b-3 + k b-4, -b b-4] for 0 <= k < |pairing|, the integral summands of the s-sum."""
    a, b, cc = c
    if pairing == 0:
        raise DomainError("the x-pairing (C, x) must be nonzero")
    return [PairB(vec(b3=a, bm3=cc, bm4=k), vec(bm4=-b)) for k in range(abs(pairing))]


def constant_term_coeff(table: QuatCoeffTable, c: tuple, pairing: int = 1):
    """The constant-term coefficient at C = (a, b, c), up to one global nonzero unit."""
    total = 0
    for b in constant_term_pairs(c, pairing):
        total += table.value(b)
    return total


# -- vanishing and cuspidality


def primitive_vanishing_detector(table: QuatCoeffTable, bound: int | None = None) -> VanishingReport:
    """Nonzero entries at primitive pairs (slice-primitive ones for cuspidal tables)."""
    bound = table.bound if bound is None else bound
    wit, imprim = [], 0
    rows = sorted(table.entries.items(), key=lambda kv: (kv[0].q(), str(kv[0])))
    for b, v in rows:
        if not v or b.q() > bound:
            continue
        prim = is_slice_primitive(b) if table.cuspidal else b.content() == 1
        if prim:
            wit.append({"B": b.to_json(), "Q": b.q(), "value": str(v)})
        else:
            imprim += 1
    if wit:
        return VanishingReport("nonzero-primitive-coefficient", wit, bound)
    warn = ""
    if imprim:
        warn = f"{imprim} nonzero imprimitive coefficients; genuine modular input with this pattern vanishes identically"
    return VanishingReport("consistent-with-zero through bound", [], bound, warn)


def cuspidality_classifier(table: QuatCoeffTable, weight: int | None = None, **kw) -> GrowthReport:
    """Hecke-bound test |Lambda[B]| << Q(B)^((l+1)/2) over stored primitive B > 0."""
    w = table.weight if weight is None else weight
    if w < 5:
        raise DomainError("the classifier needs weight >= 5")
    pts = [(b.q(), v) for b, v in table.entries.items() if not b.is_zero() and b.content() == 1 and is_positive(b)]
    kw.setdefault("size_max", table.bound)
    return growth_report(pts, (w + 1) / 2, **kw)
