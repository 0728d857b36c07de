"""Index-1 Jacobi forms through their theta decomposition.

An index-1 form is stored as the two one-variable series
h0[k] = c(k, 0) and h1[k] = c(k, 1); every coefficient follows from
c(n, r) = C(4n - r^2) with C(4k) = h0[k] and C(4k - 1) = h1[k].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import DomainError, InsufficientData, InsufficientPrecision
from .qseries import (
    QSeries,
    ThetaSeries,
    delta,
    dim_cusp_forms,
    e2,
    eisenstein,
    eta_power,
    is_in_space,
    jacobi_theta_even,
    jacobi_theta_odd,
    modular_forms_basis,
    sturm_bound,
)

log = logging.getLogger(__name__)


def zeta_slice(ts: ThetaSeries, r: int) -> QSeries:
    """The zeta^r part of a two-variable series as a QSeries with offset."""
    b = r * ts.zden
    terms = {a: v for (a, bb), v in ts.coeffs.items() if bb == b}
    if not terms:
        return QSeries.zero(int(ts.trunc))
    lo = min(terms)
    shift = Fraction(lo, ts.qden)
    step = ts.qden
    n = int((ts.trunc - shift))
    c = [0] * (n + 1)
    for a, v in terms.items():
        k = Fraction(a - lo, step)
        if k.denominator != 1:
            raise DomainError("zeta slice has exponents off the shifted lattice")
        if k <= n:
            c[int(k)] = v
    return QSeries(c, n, shift)


def _aligned(f: QSeries, n: int) -> QSeries:
    """Drop an integral offset so that index k means q^k, truncated at n."""
    g = f.normalized()
    return g.truncate(n)


@dataclass
class JacobiForm:
    weight: int
    h0: QSeries
    h1: QSeries
    index: int = 1
    cuspidal: bool | None = None
    name: str = ""

    def __post_init__(self):
        if self.index != 1:
            raise DomainError("only index 1 is implemented")
        if self.h0.shift or self.h1.shift:
            raise DomainError("theta components must be aligned to integral q-powers")

    @property
    def trunc(self) -> int:
        return min(self.h0.trunc, self.h1.trunc)

    @property
    def max_disc(self) -> int:
        return 4 * self.trunc

    def disc_coeff(self, d: int):
        """C(D) with D = 4n - r^2."""
        if d % 4 == 0:
            k = d // 4
            if k < 0:
                return 0
            if k > self.h0.trunc:
                raise InsufficientPrecision(f"D={d} beyond truncation")
            return self.h0.coeffs[k]
        if d % 4 == 3:
            k = (d + 1) // 4
            if k < 0:
                return 0
            if k > self.h1.trunc:
                raise InsufficientPrecision(f"D={d} beyond truncation")
            return self.h1.coeffs[k]
        return 0

    def coeff(self, n: int, r: int):
        if n > self.trunc:
            raise InsufficientPrecision(f"n={n} beyond truncation {self.trunc}")
        return self.disc_coeff(4 * n - r * r)

    # -- arithmetic
    def __add__(self, other: "JacobiForm") -> "JacobiForm":
        if self.weight != other.weight:
            raise DomainError("weights differ")
        return JacobiForm(self.weight, self.h0 + other.h0, self.h1 + other.h1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "JacobiForm":
        return JacobiForm(self.weight, self.h0 * c, self.h1 * c, cuspidal=self.cuspidal, name=self.name)

    def times(self, f: QSeries, weight: int) -> "JacobiForm":
        """Product with a one-variable modular form of the given weight."""
        n = min(self.trunc, f.trunc)
        return JacobiForm(self.weight + weight, self.h0.truncate(n) * f.truncate(n), self.h1.truncate(n) * f.truncate(n))

    def heat(self) -> "JacobiForm":
        """Multiply every coefficient by its discriminant 4n - r^2."""
        h0 = QSeries([4 * k * v for k, v in enumerate(self.h0.coeffs)], self.h0.trunc)
        h1 = QSeries([(4 * k - 1) * v for k, v in enumerate(self.h1.coeffs)], self.h1.trunc)
        return JacobiForm(self.weight + 2, h0, h1)

    def truncate(self, n: int) -> "JacobiForm":
        return JacobiForm(self.weight, self.h0.truncate(n), self.h1.truncate(n), cuspidal=self.cuspidal, name=self.name)

    # -- views
    def two_variable(self, n: int | None = None) -> ThetaSeries:
        n = self.trunc if n is None else n
        coeffs = {}
        for q in range(n + 1):
            rmax = math.isqrt(4 * q + 1)
            for r in range(-rmax, rmax + 1):
                v = self.coeff(q, r)
                if v:
                    coeffs[(q, r)] = v
        return ThetaSeries(coeffs, n)

    def is_cusp_by_coefficients(self) -> bool:
        return all(self.disc_coeff(d) == 0 for d in (-1, 0))

    def to_json(self) -> dict:
        out = {}
        for q in range(self.trunc + 1):
            rmax = math.isqrt(4 * q + 1)
            for r in range(-rmax, rmax + 1):
                v = self.coeff(q, r)
                if v:
                    out[f"{q},{r}"] = str(v)
        return {"weight": self.weight, "index": self.index, "coeffs": out}


# -- weak generators


def _from_two_variable(ts: ThetaSeries, n: int, weight: int) -> JacobiForm:
    h0 = _aligned(zeta_slice(ts, 0), n)
    h1 = _aligned(zeta_slice(ts, 1), n)
    return JacobiForm(weight, h0, h1)


def _theta_square_slices(ts: ThetaSeries, n: int):
    sq = ts * ts
    return zeta_slice(sq, 0), zeta_slice(sq, 1)


@lru_cache(maxsize=8)
def weak_jacobi_generators(n: int) -> tuple[JacobiForm, JacobiForm]:
    """(phi_{-2,1}, phi_{0,1}) through q^n.

    phi_{-2,1} = theta_1^2 / eta^6 and phi_{0,1} = 4 sum_i theta_i(z)^2 / theta_i(0)^2
    over the three even thetas. Only the zeta^0 and zeta^1 parts are formed,
    which determine an index-1 form completely.
    """
    if n < 2:
        raise InsufficientPrecision("weak generators need a truncation of at least 2")
    m = n + 2
    inv_eta6 = eta_power(-6, m + 1)
    s0, s1 = _theta_square_slices(jacobi_theta_odd(m + 1), m)
    phi_m2 = JacobiForm(-2, _aligned(_mul_trunc(s0, inv_eta6), n), _aligned(_mul_trunc(s1, inv_eta6), n))
    # the even thetas carry powers q^(k/8): work in x = q^(1/8)
    parts0 = []
    parts1 = []
    for which in (2, 3, 4):
        sq = jacobi_theta_even(which, m + 1)
        sq = sq * sq
        inv = _x_series(jacobi_theta_even(which, m + 1), 8 * (m + 1)).power(-2)
        parts0.append(_mul_trunc(_x_slice(sq, 0, 8 * m), inv) * 4)
        parts1.append(_mul_trunc(_x_slice(sq, 1, 8 * m), inv) * 4)
    h0 = _from_x_grid(parts0, n)
    h1 = _from_x_grid(parts1, n)
    phi_0 = JacobiForm(0, h0, h1)
    return phi_m2, phi_0


def _x_series(ts: ThetaSeries, top: int) -> QSeries:
    """Collapse the zeta-free series ts to a QSeries in x = q^(1/qden),
    keeping the lowest power as an integral offset."""
    acc: dict = {}
    for (a, _b), v in ts.coeffs.items():
        acc[a] = acc.get(a, 0) + v
    acc = {a: v for a, v in acc.items() if v}
    lo = min(acc)
    c = [0] * (top - lo + 1)
    for a, v in acc.items():
        if a - lo <= top - lo:
            c[a - lo] = v
    return QSeries(c, top - lo, lo)


def _x_slice(ts: ThetaSeries, r: int, top: int) -> QSeries:
    b = r * ts.zden
    return _x_series(ThetaSeries({k: v for k, v in ts.coeffs.items() if k[1] == b}, ts.trunc, ts.qden, ts.zden), top)


def _from_x_grid(parts: list[QSeries], n: int, unit: int = 8) -> QSeries:
    """Sum series in x = q^(1/unit) and return the result in q; fractional
    powers must cancel, which is checked exactly."""
    acc: dict = {}
    for f in parts:
        if f.trunc + f.shift < unit * n:
            raise InsufficientPrecision("summand truncated below the requested order")
        for k, v in enumerate(f.coeffs):
            e = int(f.shift) + k
            if v and e <= unit * n:
                acc[e] = acc.get(e, 0) + v
    c = [0] * (n + 1)
    for e, v in acc.items():
        if v == 0:
            continue
        if e % unit or e < 0:
            raise DomainError(f"non-integral power q^({e}/{unit}) survives in an index-1 form")
        c[e // unit] = v
    return QSeries(c, n)


def _mul_trunc(a: QSeries, b: QSeries) -> QSeries:
    n = min(a.trunc, b.trunc)
    return a.truncate(n) * b.truncate(n)


def phi0_by_heat(n: int) -> JacobiForm:
    """phi_{0,1} rebuilt from phi_{-2,1} by the heat operator:
    phi_{0,1} = -6 H(phi_{-2,1}) - 5 E2 phi_{-2,1}, an independent route."""
    phi_m2, _ = weak_jacobi_generators(n)
    heat = phi_m2.heat()
    e2phi = phi_m2.times(e2(n), 2)
    return JacobiForm(0, heat.h0 * -6 + e2phi.h0 * -5, heat.h1 * -6 + e2phi.h1 * -5)


def jacobi_eisenstein(k: int, n: int) -> JacobiForm:
    """E_{4,1} or E_{6,1} from the weak generators."""
    phi_m2, phi_0 = weak_jacobi_generators(n)
    if k == 4:
        f = phi_0.times(eisenstein(4, n), 4) - phi_m2.times(eisenstein(6, n), 6)
    elif k == 6:
        e4 = eisenstein(4, n)
        f = phi_0.times(eisenstein(6, n), 6) - phi_m2.times(e4 * e4, 8)
    else:
        raise DomainError("only E_{4,1} and E_{6,1} are provided")
    return JacobiForm(k, f.h0 * Fraction(1, 12), f.h1 * Fraction(1, 12), cuspidal=False, name=f"E{k},1")


def non_cusp_weight10(n: int) -> JacobiForm:
    """The holomorphic non-cusp form E4 * E_{6,1} of weight 10."""
    f = jacobi_eisenstein(6, n).times(eisenstein(4, n), 4)
    f.cuspidal = False
    f.name = "E4*E6,1"
    return f


def jacobi_cusp_basis(weight: int, n: int) -> list[JacobiForm]:
    """Basis M_{l-10} Delta phi_{-2,1} + M_{l-12} Delta phi_{0,1} of J^cusp_{l,1}."""
    if weight % 2 or weight < 10:
        log.warning("no index-1 cusp forms are constructed for weight %s", weight)
        return []
    phi_m2, phi_0 = weak_jacobi_generators(n)
    d = delta(n)
    base10 = phi_m2.times(d, 12)
    base12 = phi_0.times(d, 12)
    out = []
    for f in modular_forms_basis(weight - 10, n):
        out.append(base10.times(f, weight - 10))
    for f in modular_forms_basis(weight - 12, n):
        out.append(base12.times(f, weight - 12))
    for i, f in enumerate(out):
        f.cuspidal = True
        f.name = f"J{weight},1[{i}]"
        if not f.is_cusp_by_coefficients():
            raise DomainError("constructed basis element is not cuspidal")
    return out


def coeff(phi: JacobiForm, n: int, r: int):
    return phi.coeff(n, r)


# -- Taylor coefficients in z


@dataclass
class TaylorCoefficient:
    """lambda_nu(tau) = unit * series, where unit = (2 pi i)^nu is kept symbolic."""

    nu: int
    series: QSeries
    unit: str = field(default="")

    def __post_init__(self):
        if not self.unit:
            self.unit = f"(2*pi*i)^{self.nu}"


def taylor_lambda(phi: JacobiForm, nu: int, n: int | None = None) -> TaylorCoefficient:
    """nu-th z-Taylor coefficient: sum_n (sum_r c(n,r) r^nu / nu!) q^n times (2 pi i)^nu."""
    if nu < 0:
        raise DomainError("nu must be non-negative")
    n = phi.trunc if n is None else n
    fact = math.factorial(nu)
    c = []
    for q in range(n + 1):
        rmax = math.isqrt(4 * q + 1)
        s = sum(phi.coeff(q, r) * r**nu for r in range(-rmax, rmax + 1))
        c.append(Fraction(s, fact))
    return TaylorCoefficient(nu, QSeries(c, n))


def first_nonvanishing_taylor(phi: JacobiForm, n: int | None = None, max_nu: int = 20) -> TaylorCoefficient:
    for nu in range(0, max_nu + 1, 2):
        t = taylor_lambda(phi, nu, n)
        if not t.series.is_zero():
            return t
    raise InsufficientPrecision("all even Taylor coefficients vanish through the truncation")


def taylor_modularity_certificate(phi: JacobiForm, n: int | None = None):
    """is_in_space certificate for lambda_{nu0} in weight l + nu0, through the Sturm bound or further."""
    t = first_nonvanishing_taylor(phi, n)
    k = phi.weight + t.nu
    bound = max(sturm_bound(k), min(t.series.trunc, 3 * sturm_bound(k)))
    return t, is_in_space(t.series, k, bound)


# -- the transformation law


@dataclass
class TransformationResidual:
    residual: float
    tail_bound: float
    lhs: complex
    rhs: complex


def evaluate(phi: JacobiForm, tau, z, n: int | None = None, dps: int = 40) -> mpmath.mpc:
    """Truncated series sum_{m<=n} sum_r c(m, r) q^m zeta^r."""
    n = phi.trunc if n is None else n
    with mpmath.workdps(dps):
        tau = mpmath.mpc(tau)
        z = mpmath.mpc(z)
        q = mpmath.exp(2j * mpmath.pi * tau)
        zeta = mpmath.exp(2j * mpmath.pi * z)
        total = mpmath.mpc(0)
        qpow = mpmath.mpc(1)
        for m in range(n + 1):
            rmax = math.isqrt(4 * m + 1)
            s = mpmath.mpc(0)
            for r in range(-rmax, rmax + 1):
                v = phi.coeff(m, r)
                if v:
                    s += mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator * zeta**r
            total += s * qpow
            qpow *= q
        return total


def _tail_bound(phi: JacobiForm, tau, z, n: int) -> float:
    """Majorant for the omitted terms m > n using a power-law envelope fitted to
    the known coefficients: |c(m, r)| <= A (4m + 1)^e with A, e from the table."""
    pts = []
    for m in range(1, n + 1):
        rmax = math.isqrt(4 * m + 1)
        top = max(abs(float(phi.coeff(m, r))) for r in range(-rmax, rmax + 1))
        if top:
            pts.append((4 * m + 1, top))
    if not pts:
        return 0.0
    e = phi.weight + 1.0
    a = max(v / d**e for d, v in pts)
    aq = math.exp(-2 * math.pi * float(mpmath.im(tau)))
    ay = 2 * math.pi * abs(float(mpmath.im(z)))
    total = 0.0
    for m in range(n + 1, n + 400):
        rmax = math.isqrt(4 * m + 1)
        term = a * (4 * m + 1) ** e * (2 * rmax + 1) * math.exp(ay * rmax) * aq**m
        total += term
        if term < 1e-40 * max(total, 1e-300):
            break
    return total


def transformation_check(phi: JacobiForm, gamma, tau, z, n: int = 40, tol: float = 1e-8, dps: int = 40) -> TransformationResidual:
    """|phi(g tau, z/(c tau + d)) - (c tau + d)^k e^{2 pi i m c z^2/(c tau + d)} phi(tau, z)|."""
    (a, b), (c, d) = gamma
    if a * d - b * c != 1:
        raise DomainError("gamma must lie in SL2(Z)")
    if n > phi.trunc:
        raise InsufficientPrecision(f"form is known only through q^{phi.trunc}")
    with mpmath.workdps(dps):
        tau = mpmath.mpc(tau)
        z = mpmath.mpc(z)
        j = c * tau + d
        gtau = (a * tau + b) / j
        gz = z / j
        lhs = evaluate(phi, gtau, gz, n, dps)
        factor = j**phi.weight * mpmath.exp(2j * mpmath.pi * phi.index * c * z * z / j)
        rhs = factor * evaluate(phi, tau, z, n, dps)
        res = float(abs(lhs - rhs))
        tail = _tail_bound(phi, gtau, gz, n) + float(abs(factor)) * _tail_bound(phi, tau, z, n)
    if tail > tol:
        raise InsufficientPrecision(f"tail estimate {tail:.3e} exceeds tolerance {tol:.1e}")
    return TransformationResidual(res, tail, complex(lhs), complex(rhs))


# -- growth classifiers


@dataclass
class GrowthReport:
    verdict: str
    exponent: float
    max_ratio: float
    burn_in_max_ratio: float
    growth_slope: float | None
    points: int
    burn_in: int
    margin: float
    note: str = ""

    @property
    def is_cusp_consistent(self) -> bool:
        return self.verdict == "consistent-with-cusp"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "is_cusp_consistent": self.is_cusp_consistent,
            "exponent": self.exponent,
            "max_ratio": self.max_ratio,
            "burn_in_max_ratio": self.burn_in_max_ratio,
            "growth_slope": self.growth_slope,
            "points": self.points,
            "burn_in": self.burn_in,
            "margin": self.margin,
            "note": self.note,
        }


def growth_report(points, exponent: float, burn_in: int = 20, margin: float = 0.3, min_size: int = 100, size_max=None) -> GrowthReport:
    """Shared verdict logic for the Hecke-bound classifiers.

    ``points`` are (size, value) with size > 0. The ratio is |value|/size^exponent.
    The first ``burn_in`` distinct sizes form the burn-in window. Verdicts:
    growth-detected when the log-log slope exceeds exponent + margin;
    consistent-with-cusp when the slope stays below that and no ratio after the
    burn-in exceeds the burn-in maximum; inconclusive otherwise.
    """
    pts = sorted((float(s), abs(float(v))) for s, v in points if s > 0)
    top = size_max if size_max is not None else (pts[-1][0] if pts else 0)
    if top < min_size:
        raise InsufficientData(f"sizes reach only {top}, need at least {min_size}")
    sizes = sorted({s for s, _ in pts})
    cut = sizes[burn_in - 1] if len(sizes) >= burn_in else (sizes[-1] if sizes else 0)
    ratios_in = [v / s**exponent for s, v in pts if s <= cut]
    ratios_out = [v / s**exponent for s, v in pts if s > cut]
    bmax = max(ratios_in, default=0.0)
    omax = max(ratios_out, default=0.0)
    nz = [(math.log(s), math.log(v)) for s, v in pts if s > cut and v > 0]
    if not nz or all(v == 0 for _, v in pts):
        return GrowthReport("consistent-with-cusp", exponent, 0.0, 0.0, None, len(pts), burn_in, margin, "all coefficients vanish")
    slope = _slope(nz)
    if slope is not None and slope > exponent + margin:
        verdict = "growth-detected"
    elif omax <= bmax and (slope is None or slope <= exponent + margin):
        verdict = "consistent-with-cusp"
    else:
        verdict = "inconclusive"
    return GrowthReport(verdict, exponent, max(bmax, omax), bmax, slope, len(pts), burn_in, margin)


def _slope(xy):
    if len(xy) < 2:
        return None
    n = len(xy)
    mx = sum(x for x, _ in xy) / n
    my = sum(y for _, y in xy) / n
    sxx = sum((x - mx) ** 2 for x, _ in xy)
    if sxx == 0:
        return None
    return sum((x - mx) * (y - my) for x, y in xy) / sxx


def cusp_classifier(phi, weight: int, index: int = 1, d_max: int = 4000, **kw) -> GrowthReport:
    """Hecke-bound test |c(n,r)| << |D|^{(l+1)/2} over 0 < |D| <= d_max.

    ``phi`` is a JacobiForm or a mapping D -> C(D)."""
    if weight < 5:
        raise DomainError("the classifier needs weight >= 5")
    if index != 1:
        raise DomainError("only index 1 is implemented")
    if d_max < 100:
        raise InsufficientData(f"D_max={d_max} is below 100")
    if isinstance(phi, JacobiForm):
        if phi.max_disc < d_max:
            raise InsufficientPrecision(f"form covers |D| <= {phi.max_disc} only")
        pts = [(d, phi.disc_coeff(d)) for d in range(1, d_max + 1) if d % 4 in (0, 3)]
    else:
        pts = [(d, v) for d, v in phi.items() if 0 < d <= d_max]
    return growth_report(pts, (weight + 1) / 2, size_max=d_max, **kw)


def cusp_dimension(weight: int) -> int:
    """dim J^cusp_{l,1} from the constructed basis."""
    return len(jacobi_cusp_basis(weight, max(4, weight // 12 + 3)))


def independent_cusp_dimension(weight: int) -> int:
    """dim S_{2l-2} by the classical dimension formula."""
    return dim_cusp_forms(2 * weight - 2)
