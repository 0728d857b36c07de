"""Generalized Whittaker functions on the split orthogonal group of rank 4.

Matrices act on column vectors in the isotropic basis
b1, b2, b3, b4, b-4, b-3, b-2, b-1 with antidiagonal Gram matrix. In these
coordinates the maximal compact subgroup (stabilizer of the positive 4-plane
spanned by (b_i + b_-i)/sqrt2) is exactly the orthogonal matrices in the group,
so the Iwasawa decomposition along the Borel reduces to an RQ factorization.

The Bessel function uses the normalization K_v(x) = 1/2 int t^(v-1) e^(-x(t+1/t)) dt,
which equals the classical modified Bessel function at 2x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate, linalg, optimize

from .errors import DecompositionFailed, DomainError, InsufficientPrecision
from .pairspace import PairB, coords, vec

BASIS = ("b1", "b2", "b3", "b4", "b-4", "b-3", "b-2", "b-1")
IDX = {name: i for i, name in enumerate(BASIS)}
GRAM = np.fliplr(np.eye(8))
GRAM4 = np.fliplr(np.eye(4))
GRAM2 = np.fliplr(np.eye(2))
U_BLOCK = slice(0, 2)
V_BLOCK = slice(2, 6)
D_BLOCK = slice(6, 8)

_SQ2 = math.sqrt(2.0)


def basis_vector(name: str) -> np.ndarray:
    e = np.zeros(8)
    e[IDX[name]] = 1.0
    return e


def vector(**coeffs) -> np.ndarray:
    """vector(b1=1, bm2=2) builds b1 + 2 b-2; negative indices are written bmK."""
    out = np.zeros(8, dtype=complex if any(isinstance(c, complex) for c in coeffs.values()) else float)
    for key, c in coeffs.items():
        out[IDX[key.replace("bm", "b-")]] += c
    return out


def pairing(x, y):
    return x @ GRAM @ y


def _u(i: int, sign: int) -> np.ndarray:
    return (basis_vector(f"b{i}") + sign * basis_vector(f"b-{i}")) / _SQ2


# orthonormal vectors: u_{+-1}, u_{+-2} from (b1, b2) and v_{+-1}, v_{+-2} from (b3, b4)
U1, U2, V1, V2 = _u(1, 1), _u(2, 1), _u(3, 1), _u(4, 1)
UM1, UM2, VM1, VM2 = _u(1, -1), _u(2, -1), _u(3, -1), _u(4, -1)


def wedge(v, w) -> np.ndarray:
    """Matrix of x -> (x, w) v - (x, v) w."""
    v = np.asarray(v)
    w = np.asarray(w)
    return np.outer(v, GRAM @ w) - np.outer(w, GRAM @ v)


def _exp(a: np.ndarray) -> np.ndarray:
    power = np.eye(8, dtype=a.dtype)
    total = np.eye(8, dtype=a.dtype)
    for k in range(1, 9):
        power = power @ a / k
        if not power.any():
            return total
        total = total + power
    return linalg.expm(a)


def wedge_exp(v, w, t: float) -> np.ndarray:
    """exp(t v^w); the power series is summed exactly when v^w is nilpotent."""
    return _exp(t * wedge(v, w))


def gram_residual(g) -> float:
    g = np.asarray(g)
    return float(np.max(np.abs(g.T @ GRAM @ g - GRAM)))


def is_so8(g, tol: float = 1e-12) -> bool:
    g = np.asarray(g)
    return gram_residual(g) < tol and abs(np.linalg.det(g) - 1) < 1e-9


def random_group_element(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """exp of a random Lie algebra element; lands in the identity component."""
    a = np.zeros((8, 8))
    for i in range(8):
        for j in range(i + 1, 8):
            a += rng.normal(0, scale) * wedge(np.eye(8)[i], np.eye(8)[j])
    return linalg.expm(a)


def random_compact(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    pos = (U1, U2, V1, V2)
    neg = (UM1, UM2, VM1, VM2)
    a = np.zeros((8, 8))
    for group in (pos, neg):
        for i in range(4):
            for j in range(i + 1, 4):
                a += rng.normal(0, scale) * wedge(group[i], group[j])
    return linalg.expm(a)


def random_unipotent(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    w1 = np.zeros(8)
    w2 = np.zeros(8)
    w1[V_BLOCK] = rng.normal(0, scale, 4)
    w2[V_BLOCK] = rng.normal(0, scale, 4)
    b1, b2 = basis_vector("b1"), basis_vector("b2")
    return _exp(wedge(b1, w1) + wedge(b2, w2) + rng.normal(0, scale) * wedge(b1, b2))


# -- Levi of the Heisenberg parabolic


@dataclass
class LeviElement:
    """An element of the Levi GL(U) x SO(V22) stabilizing U, V22 and the dual of U."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (8, 8):
            raise DomainError("Levi element must be 8x8")
        off = m.copy()
        for blk in (U_BLOCK, V_BLOCK, D_BLOCK):
            off[blk, blk] = 0
        if np.max(np.abs(off)) > 1e-9 * max(1.0, np.max(np.abs(m))):
            raise DomainError("matrix does not preserve the decomposition U + V22 + U^dual")
        self.matrix = m

    @classmethod
    def identity(cls) -> "LeviElement":
        return cls(np.eye(8))

    @classmethod
    def from_parts(cls, m_u, h) -> "LeviElement":
        """m_u acts on (b1, b2); h acts on (b3, b4, b-4, b-3); the dual block is forced."""
        m_u = np.asarray(m_u, dtype=float)
        g = np.zeros((8, 8))
        g[U_BLOCK, U_BLOCK] = m_u
        g[V_BLOCK, V_BLOCK] = np.asarray(h, dtype=float)
        g[D_BLOCK, D_BLOCK] = GRAM2 @ np.linalg.inv(m_u).T @ GRAM2
        return cls(g)

    @classmethod
    def from_params(cls, p) -> "LeviElement":
        """SL(U) x SO(V22) from 3 + 6 Lie algebra coordinates."""
        p = np.asarray(p, dtype=float)
        x = np.array([[p[0], p[1]], [p[2], -p[0]]])
        a = np.zeros((8, 8))
        names = ("b3", "b4", "b-4", "b-3")
        k = 3
        for i in range(4):
            for j in range(i + 1, 4):
                a += p[k] * wedge(basis_vector(names[i]), basis_vector(names[j]))
                k += 1
        return cls.from_parts(linalg.expm(x), linalg.expm(a)[V_BLOCK, V_BLOCK])

    @property
    def m_u(self) -> np.ndarray:
        return self.matrix[U_BLOCK, U_BLOCK]

    @property
    def h(self) -> np.ndarray:
        return self.matrix[V_BLOCK, V_BLOCK]

    def det_u(self) -> float:
        return float(np.linalg.det(self.m_u))

    def to_json(self) -> dict:
        return {"matrix": [[float(v) for v in row] for row in self.matrix]}


def _pair_vectors(pair) -> tuple[np.ndarray, np.ndarray]:
    """(T1, T2) as 4-vectors on (b3, b4, b-4, b-3)."""
    if isinstance(pair, PairB):
        t1, t2 = pair.t1, pair.t2
    else:
        t1, t2 = pair
    return (np.array([float(Fraction(c)) if not isinstance(c, float) else c for c in coords(t1)]),
            np.array([float(Fraction(c)) if not isinstance(c, float) else c for c in coords(t2)]))


_W = np.array([1, 1j, 1j, 1]) / _SQ2  # v1 + i v2 on (b3, b4, b-4, b-3)


def beta(pair, r) -> complex:
    """sqrt2 i < r^-1 (b-1 (x) T1 + b-2 (x) T2), b1 (x) w + b2 (x) i w >, w = v1 + i v2."""
    if not isinstance(r, LeviElement):
        r = LeviElement(r)
    t1, t2 = _pair_vectors(pair)
    rinv = np.linalg.inv(r.matrix)
    d = rinv[D_BLOCK, D_BLOCK]  # rows/cols ordered (b-2, b-1)
    h = rinv[V_BLOCK, V_BLOCK]
    s1 = h @ (d[1, 1] * t1 + d[1, 0] * t2)
    s2 = h @ (d[0, 1] * t1 + d[0, 0] * t2)
    return complex(_SQ2 * 1j * (s1 @ GRAM4 @ _W + 1j * (s2 @ GRAM4 @ _W)))


def find_beta_zero(pair, tol: float = 1e-6, seed: int = 0, restarts: int = 40, box: float = 3.0):
    """Search SL(U) x SO(V22)^0 for a zero of beta.

    beta scales linearly with the U^dual block, so the search is normalized to
    det m_u = 1 and confined to Lie algebra coordinates in [-box, box]; this keeps
    boundary pairs, whose beta only decays at infinity, from producing spurious
    witnesses. Returns (r, |beta(r)|) or None.
    """
    rng = np.random.default_rng(seed)
    t1, t2 = _pair_vectors(pair)
    scale = max(1.0, float(np.max(np.abs(np.concatenate([t1, t2])))))

    def resid(p):
        b = beta(pair, LeviElement.from_params(p)) / scale
        return [b.real, b.imag]

    best = None
    for _ in range(restarts):
        x0 = rng.uniform(-1, 1, 9)
        try:
            sol = optimize.least_squares(resid, x0, bounds=(-box, box), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                            max_nfev=200)
        except (ValueError, np.linalg.LinAlgError):
            continue
        r = LeviElement.from_params(sol.x)
        val = abs(beta(pair, r))
        if best is None or val < best[1]:
            best = (r, val)
        if val < tol:
            return r, val
    return None


# -- Iwasawa decomposition along the Heisenberg parabolic


@dataclass
class IwasawaP:
    n: np.ndarray
    m: LeviElement
    k: np.ndarray
    residual: float


def iwasawa_P(g, tol: float = 1e-10) -> IwasawaP:
    """g = n m k with n unipotent in the parabolic, m in its Levi and k compact.

    The M cap K ambiguity is fixed by taking m upper triangular with positive
    diagonal; in particular the U-block of m is upper triangular.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (8, 8) or gram_residual(g) > 1e-8 * max(1.0, np.max(np.abs(g)) ** 2):
        raise DomainError("g is not in the orthogonal group of the split form")
    try:
        r, q = linalg.rq(g)
    except (ValueError, linalg.LinAlgError) as exc:
        raise DecompositionFailed(str(exc)) from exc
    s = np.sign(np.diag(r))
    if np.any(s == 0):
        raise DecompositionFailed("singular triangular factor")
    r = r * s[None, :]
    q = s[:, None] * q
    m = np.zeros((8, 8))
    for blk in (U_BLOCK, V_BLOCK, D_BLOCK):
        m[blk, blk] = r[blk, blk]
    n = r @ np.linalg.inv(m)
    res = float(np.max(np.abs(n @ m @ q - g)))
    if res > tol * max(1.0, np.max(np.abs(g))):
        raise DecompositionFailed(f"residual {res:.3e}")
    if gram_residual(q) > 1e-8 or np.max(np.abs(q.T @ q - np.eye(8))) > 1e-8:
        raise DecompositionFailed("compact factor is not orthogonal")
    return IwasawaP(n, LeviElement(m), q, res)


def unipotent_phase(pair, n) -> complex:
    """e^{i((T1, w1) + (T2, w2))} where log n = b1^w1 + b2^w2 + z b1^b2."""
    n = np.asarray(n, dtype=float)
    x = n - np.eye(8)
    log = np.zeros((8, 8))
    power = np.eye(8)
    for k in range(1, 8):
        power = power @ x
        log += (-1) ** (k + 1) * power / k
    w1 = -log[V_BLOCK, IDX["b-1"]]
    w2 = -log[V_BLOCK, IDX["b-2"]]
    t1, t2 = _pair_vectors(pair)
    return complex(np.exp(1j * (t1 @ GRAM4 @ w1 + t2 @ GRAM4 @ w2)))


# -- the distinguished sl2 inside the compact Lie algebra


def _wedge_c(v, w) -> np.ndarray:
    return np.outer(v, GRAM @ w) - np.outer(w, GRAM @ v)


E_PLUS = 0.5 * _wedge_c(U1 - 1j * U2, V1 - 1j * V2)
H_PLUS = 1j * (_wedge_c(U1, U2) + _wedge_c(V1, V2))
F_PLUS = -0.5 * _wedge_c(U1 + 1j * U2, V1 + 1j * V2)
_SL2_BASIS = np.stack([E_PLUS.ravel(), H_PLUS.ravel(), F_PLUS.ravel()], axis=1)


def su2_adjoint(k, tol: float = 1e-8) -> np.ndarray:
    """3x3 matrix of Ad(k) on (e+, h+, f+); column j holds the image of the j-th element."""
    k = np.asarray(k, dtype=float)
    kinv = np.linalg.inv(k)
    images = np.stack([(k @ x @ kinv).ravel() for x in (E_PLUS, H_PLUS, F_PLUS)], axis=1)
    coef, *_ = np.linalg.lstsq(_SL2_BASIS, images, rcond=None)
    res = np.max(np.abs(_SL2_BASIS @ coef - images))
    if res > tol:
        raise DomainError(f"element does not preserve the distinguished sl2 (residual {res:.2e})")
    return coef


def _sl2_to_quadratic(c) -> np.ndarray:
    """(e, h, f) coordinates to coefficients of (x^2, xy, y^2): e = -x^2, h = 2xy, f = y^2."""
    return np.array([-c[0], 2 * c[1], c[2]])


def _square_root_column(sq):
    """(p, q) with (p x + q y)^2 = sq[0] x^2 + sq[1] xy + sq[2] y^2, using the larger square."""
    if abs(sq[0]) >= abs(sq[2]):
        p = np.sqrt(sq[0] + 0j)
        return p, sq[1] / (2 * p)
    q = np.sqrt(sq[2] + 0j)
    return sq[1] / (2 * q), q


def su2_component(k, tol: float = 1e-8) -> np.ndarray:
    """A 2x2 matrix (columns are the images of x and y) whose square is Ad(k); sign is arbitrary."""
    ad = su2_adjoint(k, tol)
    # images of x^2 = -e, xy = h/2, y^2 = f
    xx = _sl2_to_quadratic(-ad[:, 0])
    xy = _sl2_to_quadratic(ad[:, 1] / 2)
    yy = _sl2_to_quadratic(ad[:, 2])
    a, c = _square_root_column(xx)
    b, d = _square_root_column(yy)
    # fix the relative sign of the second column from the image of xy
    lhs = np.array([a * b, a * d + b * c, c * d])
    if np.max(np.abs(lhs - xy)) > np.max(np.abs(lhs + xy)):
        b, d = -b, -d
    g2 = np.array([[a, b], [c, d]])
    if np.max(np.abs(np.array([a * a, 2 * a * c, c * c]) - xx)) > 1e-7:
        raise DomainError("adjoint action is not a symmetric square")
    return g2


def sym_power(g2, degree: int) -> np.ndarray:
    """Matrix of Sym^degree(g2) on monomial coefficients indexed by the power of x."""
    a, b = g2[0, 0], g2[0, 1]
    c, d = g2[1, 0], g2[1, 1]
    gx = np.array([c, a])  # a x + c y, indexed by x-power
    gy = np.array([d, b])
    out = np.zeros((degree + 1, degree + 1), dtype=complex)
    for j in range(degree + 1):
        poly = np.array([1.0 + 0j])
        for _ in range(j):
            poly = np.convolve(poly, gx)
        for _ in range(degree - j):
            poly = np.convolve(poly, gy)
        out[:, j] = poly
    return out


def k_action(k, ell: int) -> np.ndarray:
    return sym_power(su2_component(k), 2 * ell)


# -- Bessel functions


def _bessel_k_many(vs, x: float, rtol: float = 1e-13) -> np.ndarray:
    """K_v(x) for several v: trapezoid rule in u for int_0^inf cosh(vu) e^{-2x cosh u} du."""
    if not x > 0:
        raise DomainError("Bessel argument must be positive")
    vs = np.abs(np.asarray(vs, dtype=float))
    vmax = float(np.max(vs))
    # integrand is scaled by e^{2x}; find the cut-off where it is negligible
    umax = 1.0
    while 2 * x * (math.cosh(umax) - 1) - vmax * umax < 60 or umax < math.asinh(vmax / (2 * x)) + 1:
        umax *= 1.3
    h = 0.25
    prev = None
    while True:
        u = np.arange(0.0, umax + h, h)
        w = np.full(u.shape, h)
        w[0] = h / 2
        core = np.exp(-2 * x * (np.cosh(u) - 1))
        vals = np.cosh(np.outer(vs, u)) @ (core * w)
        if prev is not None and np.all(np.abs(vals - prev) <= rtol * np.abs(vals)):
            return vals * math.exp(-2 * x)
        prev = vals
        h /= 2
        if h < 1e-5:
            raise InsufficientPrecision("Bessel quadrature did not converge")


def bessel_k(v, x: float, normalization: str = "doubled") -> float:
    """K_v(x) = 1/2 int_0^inf t^(v-1) e^(-x(t+1/t)) dt; "standard" gives the classical K_v(x)."""
    if normalization == "standard":
        x = x / 2
    elif normalization != "doubled":
        raise DomainError(f"unknown normalization {normalization!r}")
    return float(_bessel_k_many([v], x)[0])


# -- Whittaker values


def _basis_factorials(ell: int) -> np.ndarray:
    return np.array([1.0 / (math.factorial(ell + v) * math.factorial(ell - v)) for v in range(-ell, ell + 1)])


@dataclass
class WhittakerValue:
    """Coefficients of the monomials x^(ell+v) y^(ell-v), v = -ell..ell."""

    ell: int
    components: np.ndarray
    vanishing: bool = False
    note: str = ""

    def component(self, v: int) -> complex:
        return complex(self.components[v + self.ell])

    def basis_coefficient(self, v: int) -> complex:
        """Coefficient on x^(ell+v) y^(ell-v) / ((ell+v)! (ell-v)!)."""
        return self.component(v) * math.factorial(self.ell + v) * math.factorial(self.ell - v)

    def norm(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "vanishing": self.vanishing,
            "note": self.note,
            "components": {str(v): [float(c.real), float(c.imag)]
                           for v, c in zip(range(-self.ell, self.ell + 1), self.components)},
        }


def _zero_value(ell: int, note: str) -> WhittakerValue:
    return WhittakerValue(ell, np.zeros(2 * ell + 1, dtype=complex), True, note)


def levi_value(pair, m: LeviElement, ell: int, normalization: str = "doubled") -> WhittakerValue:
    """The closed form on the Levi: det(m)^ell |det m| sum_v (beta/|beta|)^v K_v(|beta|) basis_v."""
    b = beta(pair, m)
    ab = abs(b)
    if ab == 0:
        return _zero_value(ell, "beta vanishes")
    arg = ab if normalization == "doubled" else ab / 2
    if normalization not in ("doubled", "standard"):
        raise DomainError(f"unknown normalization {normalization!r}")
    vs = np.arange(-ell, ell + 1)
    ks = _bessel_k_many(vs, arg)
    det = m.det_u()
    phase = (b / ab) ** vs.astype(float)
    comps = det ** ell * abs(det) * phase * ks * _basis_factorials(ell)
    return WhittakerValue(ell, comps.astype(complex))


def whittaker_eval(pair, g, ell: int, normalization: str = "doubled", status: str | None = None,
                   psd_tol: float = 1e-6) -> WhittakerValue:
    """Evaluate W_B(g) through g = n m k: phase(n) * k^-1 . (closed form at m)."""
    if ell < 1:
        raise DomainError("ell must be a positive integer")
    if status is None:
        from .pairspace import psd_status

        status = psd_status(pair if isinstance(pair, PairB) else PairB(*pair), tol=psd_tol).status
    if status == "NOT_PSD":
        return _zero_value(ell, "pair is not positive semi-definite")
    dec = iwasawa_P(g)
    base = levi_value(pair, dec.m, ell, normalization)
    if base.vanishing:
        return base
    rho = k_action(dec.k, ell)
    comps = unipotent_phase(pair, dec.n) * np.linalg.solve(rho, base.components)
    return WhittakerValue(ell, comps)


# -- the archimedean Fourier-Jacobi integral


def y_alpha(alpha: int) -> np.ndarray:
    return vector(b3=1.0, bm3=alpha / 2)


def y_dual(alpha: int) -> np.ndarray:
    return vector(b3=1.0, bm3=-alpha / 2)


def g_y(alpha: int) -> np.ndarray:
    """Rotation of the (b3, b-3) plane taking v1 to y_alpha / |y_alpha| and fixing the rest."""
    g = np.eye(8)
    g[IDX["b3"], IDX["b3"]] = math.sqrt(2 / alpha)
    g[IDX["b-3"], IDX["b-3"]] = math.sqrt(alpha / 2)
    return g


def g_t(t: float) -> np.ndarray:
    """Scales b2 by t and b-2 by 1/t."""
    if not t > 0:
        raise DomainError("t must be positive")
    return wedge_exp(basis_vector("b2"), basis_vector("b-2"), math.log(t))


def x_s(s: float) -> np.ndarray:
    return wedge_exp(basis_vector("b1"), basis_vector("b-2"), s)


def u_element(alpha: int, params=(0.0, 0.0, 0.0)) -> np.ndarray:
    """exp of p0 b4^y + p1 b-4^y + p2 b4^b-4 with y = b3 - (alpha/2) b-3; fixes y_alpha."""
    yd = y_dual(alpha) / math.sqrt(alpha)
    b4, bm4 = basis_vector("b4"), basis_vector("b-4")
    a = params[0] * wedge(b4, yd) + params[1] * wedge(bm4, yd) + params[2] * wedge(b4, bm4)
    return linalg.expm(a)


def s_vector(n2: int, m2: int, r2: int, alpha: int) -> np.ndarray:
    """-n b4 - m b-4 - (r/alpha) y as an 8-vector."""
    return vector(b4=-n2, bm4=-m2) - (r2 / alpha) * y_dual(alpha)


def _v22(x: np.ndarray) -> tuple:
    """8-vector supported on V22 to the 2x2 matrix used by PairB."""
    b3, b4, bm4, bm3 = (float(c) for c in x[V_BLOCK])
    return ((b3, bm4), (-b4, bm3))


@dataclass
class ArchIntegral:
    value: WhittakerValue
    predicted: WhittakerValue
    sigma: float
    tail_bound: float
    half_width: float
    evaluations: int
    normalization: str

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "predicted": self.predicted.to_json(),
            "sigma": self.sigma,
            "tail_bound": self.tail_bound,
            "half_width": self.half_width,
            "evaluations": self.evaluations,
            "normalization": self.normalization,
        }


def arch_prediction(n: int, alpha: int, sigma: float, t: float, ell: int) -> WhittakerValue:
    """t^ell e^{-2 sqrt2 pi (n sqrt(alpha) - t sigma)} / (2 sqrt2 n sqrt(alpha)) sum_v i^v basis_v."""
    ra = math.sqrt(alpha)
    const = t ** ell * math.exp(-2 * _SQ2 * math.pi * (n * ra - t * sigma)) / (2 * _SQ2 * n * ra)
    vs = np.arange(-ell, ell + 1)
    return WhittakerValue(ell, const * (1j ** vs) * _basis_factorials(ell))


def fj_arch_integral(n: int, alpha: int, s_index, t: float, ell: int, u_params=(0.0, 0.0, 0.0),
                     normalization: str = "doubled", epsrel: float = 1e-10, tail_tol: float = 1e-12,
                     status: str | None = None) -> ArchIntegral:
    """int_R W_[2 pi n y_alpha, 2 pi S](x(s) g g_y) ds with g = (t, u).

    s_index is an (n', m', r') triple for S = -n' b4 - m' b-4 - (r'/alpha) y. The
    line is truncated at |s| = L where an exponential bound on the Bessel tail
    drops below tail_tol relative to the peak.
    """
    if alpha <= 0 or alpha % 2:
        raise DomainError("alpha must be a positive even integer")
    if n < 1:
        raise DomainError("n must be a positive integer")
    s_vec = s_vector(*s_index, alpha)
    ya = y_alpha(alpha)
    pair = (_v22(2 * math.pi * n * ya), _v22(2 * math.pi * s_vec))
    if status is None:
        from .pairspace import psd_status

        exact = PairB(_v22_exact(n, alpha, None), _v22_exact(None, alpha, s_index))
        status = psd_status(exact).status
    u = u_element(alpha, u_params)
    sigma = float(pairing(s_vec, u @ V2))
    if status == "NOT_PSD":
        zero = _zero_value(ell, "pair is not positive semi-definite")
        return ArchIntegral(zero, zero, sigma, 0.0, 0.0, 0, normalization)
    base = g_t(t) @ u @ g_y(alpha)
    count = [0]

    def integrand(s):
        count[0] += 1
        w = whittaker_eval(pair, x_s(s) @ base, ell, normalization, status=status).components
        return np.concatenate([w.real, w.imag])

    # |beta(s)| >= slope |s| with slope 2 sqrt2 pi t n sqrt(alpha)
    slope = 2 * _SQ2 * math.pi * t * n * math.sqrt(alpha)
    peak = np.max(np.abs(integrand(0.0)))
    half = 1.0 / slope
    while True:
        top = np.max(np.abs(integrand(half))) + np.max(np.abs(integrand(-half)))
        # e^{2x} K_v(x) decreases, and |beta| grows at least at rate slope^2 L / |beta(L)|
        growth = slope * min(1.0, slope * half / max(1e-300, abs(beta(pair, LeviElement(x_s(half) @ base)))))
        bound = top / (2 * 2 * growth) if normalization == "doubled" else top / (2 * growth)
        if bound <= tail_tol * max(peak, 1e-300):
            break
        half *= 1.5
        if half > 1e6:
            raise InsufficientPrecision("tail bound did not reach tolerance")
    res, err = integrate.quad_vec(integrand, -half, half, epsrel=epsrel, epsabs=0, limit=400)
    if err > 1e3 * epsrel * max(np.max(np.abs(res)), 1e-300):
        raise InsufficientPrecision(f"quadrature error estimate {err:.2e}")
    k = 2 * ell + 1
    value = WhittakerValue(ell, res[:k] + 1j * res[k:])
    return ArchIntegral(value, arch_prediction(n, alpha, sigma, t, ell), sigma, float(bound), half,
                        count[0], normalization)


def _v22_exact(n, alpha, s_index):
    if s_index is None:
        return vec(b3=n, bm3=Fraction(n * alpha, 2))
    n2, m2, r2 = s_index
    return vec(b3=Fraction(-r2, alpha), b4=-n2, bm4=-m2, bm3=Fraction(r2, 2))


# -- the Bessel line integral


@dataclass
class LineIntegral:
    v: int
    c: float
    value: complex
    tail_bound: float


def bessel_line_integral(v: int, c: float, epsrel: float = 1e-11, tail_tol: float = 1e-13) -> LineIntegral:
    """I(v, c) = int_R (|s+ic|/(s+ic))^v K_v(|s+ic|) ds with the double-argument K."""
    if not c > 0:
        raise DomainError("c must be positive")

    def f(s):
        z = complex(s, c)
        val = (abs(z) / z) ** v * _bessel_k_many([v], abs(z))[0]
        return np.array([val.real, val.imag])

    # e^{2x} K_v(x) decreases and |s + ic| >= |s|: tail <= K_v(|L+ic|) / 2 on each side
    half = max(1.0, 2 * abs(v))
    while True:
        edge = bessel_k(v, abs(complex(half, c)))
        growth = half / abs(complex(half, c))
        bound = 2 * edge / (2 * growth)
        if bound <= tail_tol * bessel_k(v, c):
            break
        half *= 1.5
    res, err = integrate.quad_vec(f, -half, half, epsrel=epsrel, epsabs=0, limit=400, points=[0.0])
    return LineIntegral(v, c, complex(res[0], res[1]), float(bound))


@dataclass
class LineFit:
    v: int
    kappa: float
    lam: float
    phase_residual: float
    values: dict = field(default_factory=dict)


def fit_line_model(v: int, cs, values: dict | None = None) -> LineFit:
    """Fit I(v, c) = kappa i^v e^{-lam c} over the given c; phase_residual = max |arg(I i^-v)|."""
    cs = list(cs)
    if len(cs) < 2:
        raise DomainError("need at least two values of c")
    values = dict(values or {})
    for c in cs:
        if c not in values:
            values[c] = bessel_line_integral(v, c).value
    rot = [values[c] * (1j ** (-v)) for c in cs]
    phase = max(abs(np.angle(z)) for z in rot)
    logs = np.log([abs(z) for z in rot])
    slope, intercept = np.polyfit(np.array(cs, dtype=float), logs, 1)
    return LineFit(v, float(math.exp(intercept)), float(-slope), float(phase), values)
