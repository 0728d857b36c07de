"""The split quadratic space of 2x2 matrices with q = det, and pairs [T1, T2].

A vector of the four-dimensional space is stored as a 2x2 matrix. The isotropic
basis vectors correspond to matrices as follows::

    b3  -> [[1, 0], [0, 0]]     b-3 -> [[0, 0], [0, 1]]
    b4  -> [[0, 0], [-1, 0]]    b-4 -> [[0, 1], [0, 0]]

so that (b_i, b_-j) = delta_ij and all other basis pairings vanish.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

from .errors import DomainError
from .exact import mul2, snf_invariant_factors

BASIS_NAMES = ("b3", "b4", "b-4", "b-3")

BASIS_MATRICES = {
    "b3": ((1, 0), (0, 0)),
    "b-3": ((0, 0), (0, 1)),
    "b4": ((0, 0), (-1, 0)),
    "b-4": ((0, 1), (0, 0)),
}


def _num(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def as_matrix(m) -> tuple:
    return ((_num(m[0][0]), _num(m[0][1])), (_num(m[1][0]), _num(m[1][1])))


def vec(b3=0, b4=0, bm4=0, bm3=0) -> tuple:
    """Matrix of b3*b3 + b4*b4 + bm4*b-4 + bm3*b-3."""
    return as_matrix(((b3, bm4), (-b4, bm3)))


def coords(x) -> tuple:
    """Coefficients of x on (b3, b4, b-4, b-3)."""
    return (x[0][0], -x[1][0], x[0][1], x[1][1])


def qform(x):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def bilinear(x, y):
    """(x, y) = q(x + y) - q(x) - q(y)."""
    return x[0][0] * y[1][1] + x[1][1] * y[0][0] - x[0][1] * y[1][0] - x[1][0] * y[0][1]


def madd(x, y):
    return as_matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(x, y)))


def mscale(c, x):
    return as_matrix(tuple(tuple(c * a for a in r) for r in x))


ZERO2 = ((0, 0), (0, 0))


@dataclass(frozen=True)
class BinaryQF:
    """The form a x^2 + b xy + c y^2."""

    a: object
    b: object
    c: object

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def triple(self) -> tuple:
        return (_num(self.a), _num(self.b), _num(self.c))

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.disc < 0


@dataclass(frozen=True)
class PairB:
    t1: tuple
    t2: tuple

    def __post_init__(self):
        object.__setattr__(self, "t1", as_matrix(self.t1))
        object.__setattr__(self, "t2", as_matrix(self.t2))

    # -- construction and serialization
    @classmethod
    def from_lists(cls, t1, t2) -> "PairB":
        return cls(tuple(map(tuple, t1)), tuple(map(tuple, t2)))

    @classmethod
    def from_json(cls, data) -> "PairB":
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, (list, tuple)) and len(data) == 2:
            t1, t2 = data
        else:
            t1, t2 = data["t1"], data["t2"]
        try:
            m1 = tuple(tuple(Fraction(v) for v in row) for row in t1)
            m2 = tuple(tuple(Fraction(v) for v in row) for row in t2)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"malformed pair: {data!r}") from exc
        if len(m1) != 2 or len(m2) != 2 or any(len(r) != 2 for r in m1 + m2):
            raise DomainError(f"pair matrices must be 2x2: {data!r}")
        return cls(m1, m2)

    def to_json(self) -> dict:
        def enc(m):
            return [[v if isinstance(v, int) else str(v) for v in row] for row in m]

        return {"t1": enc(self.t1), "t2": enc(self.t2)}

    def __str__(self):
        return json.dumps(self.to_json(), separators=(",", ":"))

    # -- entries
    def entries(self) -> tuple:
        return self.t1[0] + self.t1[1] + self.t2[0] + self.t2[1]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries())

    def is_integral(self) -> bool:
        return all(isinstance(v, int) or Fraction(v).denominator == 1 for v in self.entries())

    def coordinate_matrix(self) -> list:
        return [list(map(_num, coords(self.t1))), list(map(_num, coords(self.t2)))]

    def scale(self, c) -> "PairB":
        return PairB(mscale(c, self.t1), mscale(c, self.t2))

    def normalized(self) -> "PairB":
        return PairB(as_matrix(self.t1), as_matrix(self.t2))

    def divisible_by(self, n: int) -> bool:
        return all(Fraction(v) % n == 0 for v in self.entries())

    def right_mul(self, r) -> "PairB":
        """[T1, T2] * r for the pair viewed as a row vector over M2."""
        (a, b), (c, d) = r
        return PairB(
            madd(mscale(a, self.t1), mscale(c, self.t2)),
            madd(mscale(b, self.t1), mscale(d, self.t2)),
        )

    def left_act(self, g, h) -> "PairB":
        """Simultaneous action X -> g X h on both matrices (an element of SO of the
        2x2 matrix space when det g * det h = 1)."""
        return PairB(mul2(mul2(g, self.t1), h), mul2(mul2(g, self.t2), h))

    # -- invariants
    def gram(self) -> tuple:
        return (
            bilinear(self.t1, self.t1),
            bilinear(self.t1, self.t2),
            bilinear(self.t2, self.t2),
        )

    def q(self):
        g11, g12, g22 = self.gram()
        return _num(Fraction(g11 * g22 - g12 * g12))

    def t_form(self) -> BinaryQF:
        return BinaryQF(qform(self.t1), -bilinear(self.t1, self.t2), qform(self.t2))

    def siegel_index(self) -> tuple:
        """Half the Gram matrix, encoded as (a, b, c) for (a, b/2; b/2, c)."""
        return (_num(qform(self.t1)), _num(bilinear(self.t1, self.t2)), _num(qform(self.t2)))

    def orientation(self):
        """Twice the oriented area of the projection of (T1, T2) onto the
        positive plane spanned by (b3 + b-3) and (b4 + b-4)."""
        def tr(x):
            return x[0][0] + x[1][1]

        def sk(x):
            return x[0][1] - x[1][0]

        return _num(Fraction(tr(self.t1) * sk(self.t2) - sk(self.t1) * tr(self.t2)))

    def content(self) -> int:
        if not self.is_integral():
            raise DomainError("content of a non-integral pair")
        g = 0
        for v in self.entries():
            g = gcd(g, int(v))
        return g


def t_of_B(pair: PairB) -> BinaryQF:
    return pair.t_form()


def q_of_B(pair: PairB):
    return pair.q()


def span_type(pair: PairB) -> str:
    """Signature type of span{T1, T2} read off the Gram matrix."""
    g11, g12, g22 = pair.gram()
    det = g11 * g22 - g12 * g12
    if pair.is_zero():
        return "ZERO"
    if det > 0:
        return "POSITIVE_PLANE" if g11 > 0 else "NEGATIVE_PLANE"
    if det < 0:
        return "INDEFINITE_PLANE"
    tr = g11 + g22
    if _rank2(pair) == 2:
        return "DEGENERATE_PLANE"
    if tr > 0:
        return "POSITIVE_LINE"
    if tr < 0:
        return "NEGATIVE_LINE"
    return "NULL_LINE"


def _rank2(pair: PairB) -> int:
    m = [list(map(Fraction, coords(pair.t1))), list(map(Fraction, coords(pair.t2)))]
    if all(v == 0 for v in m[0] + m[1]):
        return 0
    for i in range(4):
        for j in range(i + 1, 4):
            if m[0][i] * m[1][j] - m[0][j] * m[1][i] != 0:
                return 2
    return 1


def is_positive(pair: PairB) -> bool:
    """Exact test for the strict positivity used as cusp-form support: positive
    definite span, Q > 0, and the orientation for which beta never vanishes."""
    g11, g12, g22 = pair.gram()
    return g11 > 0 and g11 * g22 - g12 * g12 > 0 and pair.orientation() < 0


def is_primitive(pair: PairB) -> bool:
    if pair.is_zero():
        raise DomainError("primitivity is undefined for the zero pair")
    return pair.content() == 1


def is_slice_primitive(pair: PairB) -> bool:
    if not pair.is_integral():
        raise DomainError("slice primitivity needs an integral pair")
    return all(d == 1 for d in snf_invariant_factors(pair.coordinate_matrix()))


# -- the 2x2x2 coordinates


@dataclass(frozen=True)
class WECoord:
    a: object
    beta: tuple
    gamma: tuple
    d: object


def to_we(pair: PairB) -> WECoord:
    x3, x4, xm4, xm3 = coords(pair.t1)
    y3, y4, ym4, ym3 = coords(pair.t2)
    return WECoord(
        a=_num(ym3),
        beta=(_num(-y4), _num(-xm3), _num(-ym4)),
        gamma=(_num(xm4), _num(-y3), _num(x4)),
        d=_num(x3),
    )


def from_we(w: WECoord) -> PairB:
    b1, b2, b3 = w.beta
    g1, g2, g3 = w.gamma
    t1 = vec(b3=w.d, b4=g3, bm4=g1, bm3=-b2)
    t2 = vec(b3=-g2, b4=-b1, bm4=-b3, bm3=w.a)
    return PairB(t1, t2)


def norm_e(z):
    return z[0] * z[1] * z[2]


def sharp_e(z):
    return (z[1] * z[2], z[2] * z[0], z[0] * z[1])


def trace_e(x, y):
    return sum(a * b for a, b in zip(x, y))


def symplectic(w: WECoord, w2: WECoord):
    """<w, w'> = a d' - (b, c') + (c, b') - a' d."""
    return w.a * w2.d - trace_e(w.beta, w2.gamma) + trace_e(w.gamma, w2.beta) - w2.a * w.d


def canonical_slice_primitive(a, b, c) -> PairB:
    """The slice-primitive pair [b3 + b b4 + a b-3, -c b4 - b-4], whose binary form
    T(B) is exactly a x^2 + b xy + c y^2."""
    return PairB(vec(b3=1, b4=b, bm3=a), vec(b4=-c, bm4=-1))


@dataclass
class PsdResult:
    status: str
    witness: object = None
    beta_abs: float | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "detail": self.detail}
        if self.beta_abs is not None:
            out["beta_abs"] = self.beta_abs
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def psd_status(pair: PairB, tol: float = 1e-6, seed: int = 0, restarts: int = 40) -> PsdResult:
    """Classify a pair as NOT_PSD, PSD_BOUNDARY or POS_DEF.

    NOT_PSD always carries a witness Levi element r with |beta(r)| < tol.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    from . import whittaker

    kind = span_type(pair)
    if kind == "POSITIVE_PLANE" and pair.orientation() < 0:
        b0 = abs(whittaker.beta(pair, whittaker.LeviElement.identity()))
        return PsdResult("POS_DEF", None, b0, "positive plane with admissible orientation")
    if kind in ("POSITIVE_LINE", "NULL_LINE"):
        # beta(r) is a nonzero multiple of (h T, v1 + i v2) for T spanning the
        # line, and only a negative vector can be orthogonal to both v1 and v2
        return PsdResult("PSD_BOUNDARY", None, None, kind.lower())
    witness = whittaker.find_beta_zero(pair, tol=tol, seed=seed, restarts=restarts)
    if witness is not None:
        r, val = witness
        return PsdResult("NOT_PSD", r, val, kind.lower())
    if kind in ("INDEFINITE_PLANE", "NEGATIVE_PLANE", "NEGATIVE_LINE"):
        # the algebraic criterion already rules these out; no witness reached tol
        return PsdResult("NOT_PSD", None, None, kind.lower() + " (no numeric witness within budget)")
    return PsdResult("PSD_BOUNDARY", None, None, kind.lower())


def iter_box(bound: int) -> Iterable[PairB]:
    """All integral pairs with entries in [-bound, bound]."""
    rng = range(-bound, bound + 1)
    for e in itertools.product(rng, repeat=8):
        yield PairB(((e[0], e[1]), (e[2], e[3])), ((e[4], e[5]), (e[6], e[7])))
