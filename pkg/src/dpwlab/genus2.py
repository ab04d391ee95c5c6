"""Genus-2 curves y^2 = f(z), deg f = 6: points, divisor classes, spin structures
and Riemann-Roch bases.

Divisor classes are computed in an odd model: a reference Weierstrass root e
is sent to infinity by x = 1/(z - e), Y = y x^3, giving Y^2 = F(x) with
deg F = 5.  A divisor D of degree d is represented by the reduced Mumford
pair (u, v) of the class [D - d W_ref].
"""

from dataclasses import dataclass
from itertools import combinations
import json

import numpy as np

from dpwlab.potential import SpinPartition

P = np.polynomial.polynomial
EQ_TOL = 1e-9


class IllConditioned(ArithmeticError):
    pass


def _trim(c, tol=0.0):
    c = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if c.size == 0:
        return np.zeros(1, dtype=np.complex128)
    scale = max(np.max(np.abs(c)), 1e-300)
    nz = np.nonzero(np.abs(c) > tol * scale)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=np.complex128)
    return c[: nz[-1] + 1].copy()


def _deg(c):
    c = _trim(c)
    return -1 if c.size == 1 and c[0] == 0 else c.size - 1


def _monic(c):
    c = _trim(c)
    return c / c[-1]


def _polymod(a, b):
    a = _trim(a)
    b = _trim(b)
    if a.size < b.size:
        return a
    return _trim(P.polydiv(a, b)[1])


def _roots(c):
    c = _trim(c)
    if c.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return np.roots(c[::-1]).astype(np.complex128)


@dataclass(frozen=True)
class CurvePoint:
    z: complex = 0j
    y: complex = 0j
    inf: int = 0  # 0 affine, +1 / -1 sheet at infinity (y / z^3 -> inf * sqrt(lead))

    @classmethod
    def infinity(cls, sheet):
        return cls(0j, 0j, 1 if sheet > 0 else -1)

    @property
    def is_infinite(self):
        return self.inf != 0

    def involute(self):
        if self.inf:
            return CurvePoint.infinity(-self.inf)
        return CurvePoint(self.z, -self.y)

    def close_to(self, other, tol=1e-7):
        if self.inf or other.inf:
            return self.inf == other.inf
        return abs(self.z - other.z) <= tol * (1 + abs(self.z)) and \
            abs(self.y - other.y) <= tol * (1 + abs(self.y))

    def to_list(self):
        if self.inf:
            return ["inf", self.inf]
        return [[self.z.real, self.z.imag], [self.y.real, self.y.imag]]

    @classmethod
    def from_list(cls, d):
        if d[0] == "inf":
            return cls.infinity(int(d[1]))
        return cls(complex(*d[0]), complex(*d[1]))


class HyperellipticCurve:
    """y^2 = f(z) with deg f = 6 and distinct roots e_1..e_6 (the labels)."""

    def __init__(self, f=None, roots=None, lead=1.0, ref=6):
        if roots is not None:
            roots = np.asarray(roots, dtype=np.complex128)
            f = lead * P.polyfromroots(roots)
        f = _trim(np.asarray(f, dtype=np.complex128))
        if f.size != 7:
            raise ValueError("f must have degree 6")
        if roots is None:
            r = _roots(f)
            roots = r[np.lexsort((np.round(np.abs(r), 9), np.round(np.mod(np.angle(r), 2 * np.pi), 9)))]
        self.f = f
        self.roots = np.asarray(roots, dtype=np.complex128)
        self.lead = complex(f[-1])
        self.sqrt_lead = np.sqrt(self.lead)
        gaps = [abs(a - b) for a, b in combinations(self.roots, 2)]
        if min(gaps) < 1e-8 * max(1, np.max(np.abs(self.roots))):
            raise ValueError("f has a repeated root (singular curve)")
        self.ref = int(ref)
        self._odd_setup()

    # -- basic ----------------------------------------------------------
    def __call__(self, z):
        return P.polyval(z, self.f)

    def weierstrass(self, label):
        return CurvePoint(complex(self.roots[label - 1]), 0j)

    def weierstrass_points(self):
        return [self.weierstrass(k) for k in range(1, 7)]

    def label_of(self, pt, tol=1e-7):
        if pt.inf or abs(pt.y) > tol:
            return None
        d = np.abs(self.roots - pt.z)
        k = int(np.argmin(d))
        return k + 1 if d[k] <= tol * (1 + abs(pt.z)) else None

    def point(self, z, sheet=1):
        """Affine point over z on the branch y = sheet * sqrt(f(z)) (principal root)."""
        return CurvePoint(complex(z), sheet * np.sqrt(complex(self(z))))

    def random_point(self, rng, scale=1.5):
        z = complex(scale * (rng.standard_normal() + 1j * rng.standard_normal()))
        return self.point(z, 1 if rng.random() < 0.5 else -1)

    def on_curve_residual(self, pt):
        if pt.inf:
            return 0.0
        return float(abs(pt.y ** 2 - self(pt.z)) / (1 + abs(self(pt.z))))

    def to_dict(self):
        return {"roots": [[r.real, r.imag] for r in self.roots],
                "lead": [self.lead.real, self.lead.imag]}

    @classmethod
    def from_dict(cls, d):
        if "roots" in d:
            return cls(roots=[complex(*r) for r in d["roots"]],
                       lead=complex(*d.get("lead", [1.0, 0.0])))
        return cls(f=[complex(*c) for c in d["f"]])

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def random(cls, rng, scale=1.0):
        r = scale * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
        return cls(roots=r)

    # -- odd models -------------------------------------------------------
    def _odd_setup(self):
        self._models = {}
        self.F = self.odd(self.ref).F

    def odd(self, ref):
        if ref not in self._models:
            self._models[ref] = OddModel(self, ref)
        return self._models[ref]

    def to_odd(self, pt):
        return self.odd(self.ref).to_odd(pt)

    def from_odd(self, x, Y):
        return self.odd(self.ref).from_odd(x, Y)

    def best_ref(self, points):
        """Label of the Weierstrass root farthest from the given affine points."""
        zs = [p.z for p in points if not p.inf and self.label_of(p) is None]
        if not zs:
            return self.ref
        dist = [min(abs(e - z) for z in zs) for e in self.roots]
        return int(np.argmax(dist)) + 1


class OddModel:
    """Y^2 = F(x), deg F = 5, from x = 1/(z - e_ref), Y = y x^3."""

    def __init__(self, curve, ref):
        e = curve.roots[ref - 1]
        F = np.zeros(7, dtype=np.complex128)
        for k, c in enumerate(curve.f):
            # c * (e x + 1)^k * x^(6-k)
            term = P.polypow(np.array([1, e]), k) * c
            F[6 - k: 6 - k + term.size] += term
        F[6] = 0
        self.ref = ref
        self.e_ref = complex(e)
        self.F = _trim(F)
        self.sqrt_lead = curve.sqrt_lead

    def to_odd(self, pt):
        """Odd-model image (x, Y), or None for the reference Weierstrass point."""
        if pt.inf:
            return 0j, pt.inf * self.sqrt_lead
        d = pt.z - self.e_ref
        if abs(d) < 1e-12 and abs(pt.y) < 1e-9:
            return None
        x = 1 / d
        return complex(x), complex(pt.y * x ** 3)

    def from_odd(self, x, Y):
        if abs(x) < 1e-14:
            s = Y / self.sqrt_lead
            return CurvePoint.infinity(1 if s.real > 0 else -1)
        return CurvePoint(complex(self.e_ref + 1 / x), complex(Y / x ** 3))


# ---------------------------------------------------------------------------
# divisors
# ---------------------------------------------------------------------------

class Divisor:
    """Finite formal sum of curve points with integer multiplicities."""

    def __init__(self, terms=()):
        self.terms = []
        for pt, m in terms:
            self._add(pt, int(m))

    def _add(self, pt, m):
        for k, (q, n) in enumerate(self.terms):
            if q.close_to(pt):
                self.terms[k] = (q, n + m)
                break
        else:
            self.terms.append((pt, m))
        self.terms = [(q, n) for q, n in self.terms if n != 0]

    @classmethod
    def of(cls, *points):
        return cls([(p, 1) for p in points])

    @property
    def degree(self):
        return sum(m for _, m in self.terms)

    def __add__(self, other):
        return Divisor(self.terms + other.terms)

    def __neg__(self):
        return Divisor([(p, -m) for p, m in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, k):
        return Divisor([(p, k * m) for p, m in self.terms])

    def is_effective(self):
        return all(m > 0 for _, m in self.terms)


@dataclass(frozen=True, eq=False)
class MumfordDivisor:
    """Reduced pair (u, v) in the odd model; u monic, deg v < deg u, u | F - v^2."""
    u: np.ndarray
    v: np.ndarray
    ref: int = 0   # label of the Weierstrass root sent to infinity

    def model(self, curve):
        return curve.odd(self.ref or curve.ref)

    @property
    def degree(self):
        return _deg(self.u)

    def is_neutral(self):
        return self.degree == 0

    def residual(self, curve):
        r = P.polysub(self.model(curve).F, P.polymul(self.v, self.v))
        return float(np.max(np.abs(_polymod(r, self.u)))) if self.degree > 0 else 0.0

    def equals(self, other, tol=EQ_TOL):
        if self.degree != other.degree:
            return False
        if self.degree == 0:
            return True
        n = self.degree
        du = np.max(np.abs(_pad(self.u, n + 1) - _pad(other.u, n + 1)))
        dv = np.max(np.abs(_pad(self.v, n) - _pad(other.v, n)))
        scale = 1 + np.max(np.abs(self.u)) + np.max(np.abs(self.v))
        return bool(du + dv <= tol * scale)

    def points(self, curve):
        m = self.model(curve)
        return [m.from_odd(x, P.polyval(x, self.v)) for x in _roots(self.u)]

    def to_text(self):
        fmt = lambda c: " ".join(f"{x.real:.17g}{x.imag:+.17g}j" for x in c)
        return f"u: {fmt(self.u)}\nv: {fmt(self.v)}\n"

    @classmethod
    def from_text(cls, text):
        parts = dict(line.split(":", 1) for line in text.strip().splitlines())
        parse = lambda s: np.array([complex(t) for t in s.split()], dtype=np.complex128)
        return cls(parse(parts["u"]), parse(parts["v"]))


def _pad(c, n):
    out = np.zeros(n, dtype=np.complex128)
    c = _trim(c)
    out[: min(n, c.size)] = c[:n]
    return out


NEUTRAL = MumfordDivisor(np.ones(1, dtype=np.complex128), np.zeros(1, dtype=np.complex128))


def _sqrt_series(F, x0, y0, order):
    """Taylor coefficients of the branch of sqrt(F) through (x0, y0)."""
    shifted = np.zeros(order, dtype=np.complex128)
    c = np.array(F, dtype=np.complex128)
    for k in range(order):
        shifted[k] = P.polyval(x0, c)
        c = P.polyder(c) / (k + 1)
    s = np.zeros(order, dtype=np.complex128)
    s[0] = y0
    for k in range(1, order):
        s[k] = (shifted[k] - np.dot(s[1:k], s[k - 1:0:-1])) / (2 * y0)
    return s


def _hermite(data, precise=False):
    """v with Taylor data [(x0, [c0, c1, ...]), ...]; deg v < total length."""
    n = sum(len(c) for _, c in data)
    rows, rhs = [], []
    for x0, coeffs in data:
        for k, ck in enumerate(coeffs):
            row = np.zeros(n, dtype=np.complex128)
            for j in range(k, n):
                row[j] = _binom(j, k) * x0 ** (j - k)
            rows.append(row)
            rhs.append(ck)
    A = np.array(rows)
    b = np.array(rhs)
    if precise:
        import mpmath
        with mpmath.workdps(40):
            M = mpmath.matrix([[mpmath.mpc(a) for a in r] for r in A])
            sol = mpmath.lu_solve(M, mpmath.matrix([mpmath.mpc(x) for x in b]))
            return np.array([complex(sol[k]) for k in range(n)])
    return np.linalg.solve(A, b)


def _binom(n, k):
    from math import comb
    return comb(n, k)


def _odd_points(curve, divisor):
    """Effective odd-model multiset for [D - deg W_ref]: negatives replaced by involutes,
    reference point dropped, opposite pairs cancelled."""
    pts = []
    for pt, m in divisor.terms:
        q = pt if m > 0 else pt.involute()
        img = curve.to_odd(q)
        if img is None:
            continue
        pts.extend([img] * abs(m))
    return _merge([(x, Y, 1) for x, Y in pts], 1e-9)


def _merge(pts, xtol):
    out = []
    for x, Y, m in pts:
        for k, (x2, Y2, n) in enumerate(out):
            if abs(x - x2) <= xtol * (1 + abs(x)):
                if abs(Y - Y2) <= 1e-7 * (1 + abs(Y)):
                    out[k] = (x2, Y2, n + m)
                    break
                if abs(Y + Y2) <= 1e-7 * (1 + abs(Y)):
                    out[k] = (x2, Y2, n - m)
                    break
        else:
            out.append((x, Y, m))
    cleaned = []
    for x, Y, n in out:
        if n == 0:
            continue
        if abs(Y) <= 1e-9 * (1 + abs(x)):
            n = abs(n) % 2   # 2W ~ 2 infinity in the odd model
            Y = 0j
        if n < 0:
            Y, n = -Y, -n
        if n:
            cleaned.append((x, Y, n))
    return cleaned


def mumford_from_points(curve, pts, precise=False):
    """Unreduced (u, v) through an effective multiset [(x, Y, mult), ...]."""
    if not pts:
        return NEUTRAL
    u = np.ones(1, dtype=np.complex128)
    data = []
    for x, Y, n in pts:
        u = P.polymul(u, P.polypow(np.array([-x, 1]), n))
        if n > 1 and abs(Y) == 0:
            raise IllConditioned("repeated Weierstrass point should have cancelled")
        data.append((x, _sqrt_series(curve.F, x, Y, n) if n > 1 else [Y]))
    v = _hermite(data, precise)
    return MumfordDivisor(_monic(u), _trim(v), curve.ref)


def reduce_mumford(curve, D):
    """Reduce (u, v) until deg u <= 2."""
    u, v = _trim(D.u), _trim(D.v)
    while _deg(u) > 2:
        num = P.polysub(curve.F, P.polymul(v, v))
        q, r = P.polydiv(_trim(num), u)
        scale = np.max(np.abs(num)) + 1
        if np.max(np.abs(r)) > 1e-6 * scale:
            raise IllConditioned(f"reduction remainder {np.max(np.abs(r)):.3e}")
        u = _monic(q)
        v = _polymod(-v, u)
    if _deg(u) == 0:
        return NEUTRAL
    return MumfordDivisor(u, _polymod(v, u), curve.ref)


def divisor_class(curve, divisor, precise=False, ref=None):
    """Reduced Mumford representative of [D - deg(D) W_ref].

    Without ``ref`` the reference root is the one farthest from the affine
    points of D, which keeps the odd-model coordinates moderate.
    """
    if ref is None:
        ref = curve.best_ref([p for p, _ in divisor.terms])
    model = curve.odd(ref)
    acc = NEUTRAL
    for pt in _odd_points(model, divisor):
        one = reduce_mumford(model, mumford_from_points(model, [pt], precise))
        acc = _add_in(model, acc, one, precise)
    return acc


def _compose_coprime(curve, D1, D2):
    u1, v1, u2, v2 = D1.u, D1.v, D2.u, D2.v
    # inverse of u1 mod u2 through the 2x2 / 4x4 Sylvester-free linear solve
    n2 = _deg(u2)
    # find s with s*u1 = 1 mod u2, deg s < n2
    M = np.zeros((n2, n2), dtype=np.complex128)
    for j in range(n2):
        e = np.zeros(j + 1, dtype=np.complex128)
        e[j] = 1
        M[:, j] = _pad(_polymod(P.polymul(e, u1), u2), n2)
    rhs = np.zeros(n2, dtype=np.complex128)
    rhs[0] = 1
    r1, r2 = _roots(u1), _roots(u2)
    gap = min(abs(a - b) / (1 + abs(a)) for a in r1 for b in r2)
    if gap < 1e-6 or np.linalg.cond(M) > 1e10:
        raise IllConditioned("near-common root in composition")
    s = np.linalg.solve(M, rhs)
    corr = _polymod(P.polymul(P.polysub(v2, v1), s), u2)
    v = P.polyadd(v1, P.polymul(u1, corr))
    return MumfordDivisor(_monic(P.polymul(u1, u2)), _trim(v), curve.ref)


def cantor_add(D1, D2, curve, precise=False):
    """Reduced representative of the class sum."""
    if not (D1.is_neutral() or D2.is_neutral()) and D1.model(curve) is not D2.model(curve):
        raise ValueError("divisors use different reference points")
    model = (D2 if D1.is_neutral() else D1).model(curve)
    return _add_in(model, D1, D2, precise)


def _add_in(curve, D1, D2, precise=False):
    if D1.is_neutral():
        return D2
    if D2.is_neutral():
        return D1
    try:
        return reduce_mumford(curve, _compose_coprime(curve, D1, D2))
    except (IllConditioned, np.linalg.LinAlgError):
        # exact path through the points themselves (merge or cancel shared x)
        raw = []
        for D in (D1, D2):
            xs = _roots(D.u)
            if xs.size == 2 and abs(xs[0] - xs[1]) < 1e-6 * (1 + abs(xs[0])):
                x = complex(xs.mean())
                raw.append((x, complex(P.polyval(x, D.v)), 2))
            else:
                raw.extend((complex(x), complex(P.polyval(x, D.v)), 1) for x in xs)
        return reduce_mumford(curve, mumford_from_points(curve, _merge(raw, 1e-6), precise))


def negate(D):
    return MumfordDivisor(D.u, -D.v, D.ref) if not D.is_neutral() else D


def is_linearly_equivalent(A, B, curve, precise=False):
    if A.degree != B.degree:
        raise ValueError("divisors of different degree")
    return divisor_class(curve, A - B, precise).is_neutral()


# ---------------------------------------------------------------------------
# spin structures and completion
# ---------------------------------------------------------------------------

@dataclass
class SpinStructure:
    partition: SpinPartition
    curve: HyperellipticCurve

    @property
    def labels(self):
        return self.partition.first   # S = W_i + W_j - W_k

    @property
    def divisor(self):
        i, j, k = self.labels
        c = self.curve
        return Divisor([(c.weierstrass(i), 1), (c.weierstrass(j), 1), (c.weierstrass(k), -1)])

    @property
    def ks_divisor(self):
        c = self.curve
        return Divisor.of(*[c.weierstrass(a) for a in self.partition.first])

    @property
    def ks_divisor_other(self):
        c = self.curve
        return Divisor.of(*[c.weierstrass(a) for a in self.partition.second])

    def P_D(self):
        return P.polyfromroots(self.curve.roots[np.array(self.partition.first) - 1])

    def P_Dt(self):
        return P.polyfromroots(self.curve.roots[np.array(self.partition.second) - 1])


def canonical_divisor(curve):
    return Divisor.of(CurvePoint.infinity(1), CurvePoint.infinity(-1))


def h0_is_zero(curve, divisor):
    """For a degree-1 class: True iff it contains no effective divisor."""
    if divisor.degree != 1:
        raise ValueError("h0 test implemented for degree-1 classes")
    return divisor_class(curve, divisor).degree == 2


def spin_structure(part, curve):
    S = SpinStructure(part, curve)
    D = S.divisor
    if not is_linearly_equivalent(D.scaled(2), canonical_divisor(curve), curve):
        raise ArithmeticError("2S is not canonical")
    if not h0_is_zero(curve, D):
        raise ArithmeticError("spin structure has sections")
    return S


def complete_to_KS(pt, S, curve=None):
    """The two points completing ``pt`` to an effective divisor in |KS|."""
    curve = S.curve if curve is None else curve
    lab = curve.label_of(pt)
    first, second = S.partition.first, S.partition.second
    if lab is not None:
        triple = first if lab in first else second
        others = [a for a in triple if a != lab]
        return curve.weierstrass(others[0]), curve.weierstrass(others[1])
    pd, pdt = S.P_D(), S.P_Dt()
    lam = curve.lead
    if pt.inf:
        c = pt.inf * curve.sqrt_lead
    else:
        c = pt.y / P.polyval(pt.z, pd)
    C = _trim(P.polysub(c * c * pd, lam * pdt), 1e-12)
    cands = [CurvePoint(complex(r), complex(c * P.polyval(r, pd))) for r in _roots(C)]
    n_inf = 3 - max(_deg(C), 0)
    sheet = 1 if (c / curve.sqrt_lead).real > 0 else -1
    cands += [CurvePoint.infinity(sheet)] * n_inf
    if pt.inf:
        k = next(i for i, q in enumerate(cands) if q.inf == pt.inf)
    else:
        k = int(np.argmin([np.inf if q.inf else abs(q.z - pt.z) for q in cands]))
    rest = cands[:k] + cands[k + 1:]
    return rest[0], rest[1]


def even_spin_structures(curve):
    from dpwlab.potential import even_partitions
    return [spin_structure(p, curve) for p in even_partitions()]


# ---------------------------------------------------------------------------
# Riemann-Roch bases
# ---------------------------------------------------------------------------

BUNDLES = {"K": (1, 0), "K2": (2, 0), "K3": (3, 0), "S": (0, 1), "KS": (1, 1), "K2S": (2, 1)}


@dataclass(frozen=True, eq=False)
class RationalSection:
    """(a + b y) / d times (dz/y)^n times sigma^eps, sigma^2 = (z-e_i)(z-e_j)/(z-e_k) dz/y."""
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    n: int
    eps: int
    spin: tuple = ()
    tag: str = ""

    def coefficient(self, z, y):
        """Value of (a + b y)/d at the affine point (z, y)."""
        return (P.polyval(z, self.a) + P.polyval(z, self.b) * y) / P.polyval(z, self.d)

    def __mul__(self, other):
        if self.eps and other.eps and self.spin != other.spin:
            raise ValueError("sections of different spin bundles")
        a = P.polyadd(P.polymul(self.a, other.a), 0)
        b = P.polyadd(P.polymul(self.a, other.b), P.polymul(self.b, other.a))
        bb = P.polymul(self.b, other.b)
        d = P.polymul(self.d, other.d)
        n = self.n + other.n
        eps = self.eps + other.eps
        spin = self.spin or other.spin
        f = self._f
        a = P.polyadd(a, P.polymul(bb, f))
        if eps == 2:
            i, j, k = spin
            a = P.polymul(a, self._lin(i, j))
            b = P.polymul(b, self._lin(i, j))
            d = P.polymul(d, self._lin(k))
            n, eps = n + 1, 0
        return RationalSection(*_cancel(a, b, d), n, eps, spin if eps else (),
                               tag="").with_curve(self._curve)

    def with_curve(self, curve):
        object.__setattr__(self, "_curve", curve)
        return self

    @property
    def _f(self):
        return self._curve.f

    def _lin(self, *labels):
        return P.polyfromroots(self._curve.roots[np.array(labels) - 1])

    def is_polynomial(self):
        return _deg(self.d) == 0


def _cancel(a, b, d, tol=1e-9):
    """Divide a, b, d by the common linear factors of d (exact up to tol)."""
    a, b, d = _trim(a), _trim(b), _trim(d)
    for r in _roots(d):
        qa, ra = P.polydiv(a, np.array([-r, 1])) if _deg(a) >= 1 else (a, a)
        qb, rb = P.polydiv(b, np.array([-r, 1])) if _deg(b) >= 1 else (b, b)
        sa = 1 + np.max(np.abs(a))
        sb = 1 + np.max(np.abs(b))
        ok_a = _deg(a) < 0 or (_deg(a) >= 1 and np.max(np.abs(ra)) <= tol * sa)
        ok_b = _deg(b) < 0 or (_deg(b) >= 1 and np.max(np.abs(rb)) <= tol * sb)
        if ok_a and ok_b:
            a = _trim(qa) if _deg(a) >= 1 else a
            b = _trim(qb) if _deg(b) >= 1 else b
            d = _trim(P.polydiv(d, np.array([-r, 1]))[0])
    lead = d[-1]
    return a / lead, b / lead, d / lead


def _section(curve, a, b, d, n, eps, spin, tag):
    return RationalSection(_trim(a), _trim(b), _trim(d), n, eps, spin, tag).with_curve(curve)


def _vanishing_basis(curve, deg_a, labels):
    """Basis of polynomials of degree <= deg_a vanishing at the roots with these labels."""
    if deg_a < len(labels):
        return []
    base = P.polyfromroots(curve.roots[np.array(labels) - 1]) if labels else np.ones(1)
    return [P.polymul(base, np.eye(deg_a - len(labels) + 1)[m]) for m in range(deg_a - len(labels) + 1)]


def rr_basis(tag, curve, spin=None):
    """Basis of H^0 of K, K2, K3, S, KS or K2S in the rational model."""
    if tag not in BUNDLES:
        raise ValueError(f"unknown bundle {tag!r}")
    n, eps = BUNDLES[tag]
    one = np.ones(1, dtype=np.complex128)
    zero = np.zeros(1, dtype=np.complex128)
    out = []
    if eps == 0:
        for m in range(n + 1):
            out.append(_section(curve, np.eye(n + 1)[m], zero, one, n, 0, (), tag))
        for m in range(n - 2):
            out.append(_section(curve, zero, np.eye(n - 2)[m], one, n, 0, (), tag))
        return out
    if spin is None:
        raise ValueError("spin bundles need a spin structure")
    i, j, k = spin.labels
    d = P.polyfromroots(curve.roots[[i - 1, j - 1]])
    for a in _vanishing_basis(curve, n + 2, (i, j, k)):
        out.append(_section(curve, a, zero, d, n, 1, (i, j, k), tag))
    for m in range(n):
        out.append(_section(curve, zero, np.eye(n)[m], d, n, 1, (i, j, k), tag))
    return out


def ks_pair(S):
    """The distinguished KS sections s (divisor D) and t (divisor D~)."""
    curve = S.curve
    i, j, k = S.labels
    d = P.polyfromroots(curve.roots[[i - 1, j - 1]])
    one = np.ones(1, dtype=np.complex128)
    zero = np.zeros(1, dtype=np.complex128)
    s = _section(curve, S.P_D(), zero, d, 1, 1, (i, j, k), "KS")
    t = _section(curve, zero, one, d, 1, 1, (i, j, k), "KS")
    return s, t


def section_orders(sec):
    """Orders at the six Weierstrass points and a lower bound at the two infinities."""
    curve = sec._curve
    ords = []
    for e in curve.roots:
        oa = _zmult(sec.a, e)
        ob = _zmult(sec.b, e)
        od = _zmult(sec.d, e)
        num = min(2 * oa if oa is not None else np.inf, 2 * ob + 1 if ob is not None else np.inf)
        ords.append(num - 2 * od)
    da, db = _deg(sec.a), _deg(sec.b)
    top = max(da, db + 3 if db >= 0 else -1)
    return ords, -(top - _deg(sec.d))


def _zmult(c, r, tol=1e-9):
    from dpwlab.potential import root_multiplicity
    c = _trim(c)
    if c.size == 1 and c[0] == 0:
        return None
    return root_multiplicity(c, r, tol)


def is_admissible(sec):
    """Holomorphic as a section of K^n S^eps: orders >= model divisor everywhere."""
    ords, inf_ord = section_orders(sec)
    curve = sec._curve
    if inf_ord < -sec.n:
        return False
    extra = np.zeros(6)
    if sec.eps:
        i, j, k = sec.spin
        extra[i - 1] = extra[j - 1] = -1
        extra[k - 1] = 1
    for e, o, x in zip(curve.roots, ords, extra):
        if o < x:
            return False
    # poles of d away from Weierstrass points
    for r in _roots(sec.d):
        if np.min(np.abs(curve.roots - r)) > 1e-7:
            return False
    return True


def coefficient_vectors(sections, points):
    """Matrix of section coefficients at affine points (rows = points)."""
    return np.array([[s.coefficient(p.z, p.y) for s in sections] for p in points])
