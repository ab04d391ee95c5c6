"""Extensions 0 -> S^-1 -> V -> S -> 0 on a genus-2 curve.

Extension classes enter only through their pairing functional on
H^0(K^2) = {p(z) (dz/y)^2 : deg p <= 2}; the coefficient vector of p is the
coordinate vector in the basis 1, z, z^2.

For a point P let (P~, P^) complete P to a divisor in |KS|.  The quadratic
differential attached to a functional l vanishes at P iff l(q_P) = 0, where
q_P spans the differentials vanishing at P~ and P^.  Up to the nonzero
factor P_D(z0), q_P is the quotient of the cubic
    P_D~(z0) P_D(z) - P_D(z0) P_D~(z)
by (z - z0), where P_D and P_D~ are the monic cubics over the two triples.
"""

from dataclasses import dataclass, field

import numpy as np

from dpwlab import genus2 as G2

P = np.polynomial.polynomial
MEMBER_TOL = 1e-7
WITNESS_TOL = 1e-10


class ClassificationFailure(ArithmeticError):
    pass


class UnhandledDegeneracy(ArithmeticError):
    pass


class QuadratureError(ArithmeticError):
    def __init__(self, msg, estimate):
        super().__init__(f"{msg} (error estimate {estimate:.3e})")
        self.estimate = estimate


def _unit(v):
    v = np.asarray(v, dtype=np.complex128)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no projective class")
    k = int(np.argmax(np.abs(v)))
    return v / n * (abs(v[k]) / v[k])


def projective_distance(a, b):
    """sin of the angle between two complex lines."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(b - np.vdot(a, b) * a))


@dataclass
class QuadraticDifferential:
    p: np.ndarray          # coefficients of 1, z, z^2
    zero_fibers: tuple = ()

    def __post_init__(self):
        p = np.zeros(3, dtype=np.complex128)
        v = np.atleast_1d(np.asarray(self.p, dtype=np.complex128))
        if v.size > 3:
            raise ValueError("p has degree at most 2")
        p[: v.size] = v
        if not np.any(p):
            raise ValueError("quadratic differential must be nonzero")
        self.p = p

    def normalized(self):
        return QuadraticDifferential(_unit(self.p), self.zero_fibers)

    def roots(self):
        """Zero abscissas with multiplicity (np.inf for the fiber at infinity)."""
        return homogeneous_roots(self.p)

    def to_dict(self):
        return {"p": [[c.real, c.imag] for c in self.p],
                "zero_fibers": [str(r) for r in self.roots()]}


@dataclass
class ExtensionFunctional:
    ell: np.ndarray
    error_estimate: float = 0.0

    def __post_init__(self):
        self.ell = np.asarray(self.ell, dtype=np.complex128).reshape(3)
        if not np.any(self.ell):
            raise ValueError("the trivial functional defines no extension")

    def __call__(self, q):
        return complex(np.dot(self.ell, np.asarray(q).reshape(3)))

    @classmethod
    def evaluation_at(cls, pt):
        """Functional whose kernel is the differentials vanishing at pt."""
        if pt.inf:
            return cls([0, 0, 1])
        return cls([1, pt.z, pt.z ** 2])


def homogeneous_roots(p, tol=1e-12):
    p = np.asarray(p, dtype=np.complex128)
    scale = np.max(np.abs(p))
    if abs(p[2]) > tol * scale:
        return list(np.roots(p[::-1]))
    if abs(p[1]) > tol * scale:
        return [-p[0] / p[1], np.inf]
    return [np.inf, np.inf]


def _fiber(curve, r):
    if not np.isfinite(r):
        return (G2.CurvePoint.infinity(1), G2.CurvePoint.infinity(-1))
    pt = curve.point(r)
    return (pt, pt.involute())


def _same_abscissa(pt, r, tol=MEMBER_TOL):
    if not np.isfinite(r):
        return bool(pt.inf)
    return not pt.inf and abs(pt.z - r) <= tol * (1 + abs(r))


# ---------------------------------------------------------------------------
# q_P and classification
# ---------------------------------------------------------------------------

def bezout_matrix(S):
    """M with P_D(z0) q_P(z) = sum_ij M[i, j] z^i z0^j for P over z0.

    Expands (P_D~(w) P_D(z) - P_D(w) P_D~(z)) / (z - w) term by term, so the
    coefficients are exact polynomials in z0 with no cancellation.
    """
    a, b = G2._pad(S.P_D(), 4), G2._pad(S.P_Dt(), 4)
    M = np.zeros((3, 3), dtype=np.complex128)
    for i in range(4):
        for k in range(4):
            if i <= k:
                continue
            c = a[i] * b[k] - a[k] * b[i]   # multiplies (z^i w^k - z^k w^i)/(z - w)
            for m in range(i - k):
                M[k + m, k + i - k - 1 - m] += c
    return M


def q_from_abscissa(z0, S):
    """Coefficients of P_D(z0) q_P for P over z0; at z0 = inf the leading part."""
    M = bezout_matrix(S)
    if not np.isfinite(z0):
        return M[:, 2].copy()
    return M @ np.array([1, z0, z0 * z0])


def q_from_point(pt, S, curve=None):
    """Unit coefficient vector of the differential vanishing at the completion of pt."""
    curve = S.curve if curve is None else curve
    a, b = G2.complete_to_KS(pt, S, curve)
    q = np.ones(1, dtype=np.complex128)
    for x in (a, b):
        q = P.polymul(q, np.array([1.0]) if x.inf else np.array([-x.z, 1]))
    return _unit(G2._pad(q, 3))


def _muller(fn, x0, x1, x2, tol=1e-14, maxit=200):
    f0, f1, f2 = fn(x0), fn(x1), fn(x2)
    for _ in range(maxit):
        h1, h2 = x1 - x0, x2 - x1
        if h1 == 0 or h2 == 0:
            break
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4 * f2 * a + 0j)
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0:
            break
        dx = -2 * f2 / den
        x0, x1, x2 = x1, x2, x2 + dx
        f0, f1, f2 = f1, f2, fn(x2)
        if abs(dx) <= tol * (1 + abs(x2)):
            break
    return complex(x2)


def _is_double(h, r, step=1e-3):
    """Ratio test |h(r + 2d)| / |h(r + d)|: about 2 at a simple root, 4 at a double one."""
    a, b = abs(h(r + step)), abs(h(r + 2 * step))
    return a == 0 or b / a > 3


def classify_to_quadratic(ell, S, curve=None, tol=1e-8):
    """Quadratic differential whose zero set is {P : ell(q_P) = 0}."""
    curve = S.curve if curve is None else curve
    if not isinstance(ell, ExtensionFunctional):
        ell = ExtensionFunctional(ell)
    M = bezout_matrix(S)
    scale = np.linalg.norm(ell.ell) * np.linalg.norm(M)

    def h(z0):
        return ell(M @ np.array([1, z0, z0 * z0])) / scale

    def small(r):
        return abs(h(r)) <= tol * np.sqrt(1 + abs(r) ** 2 + abs(r) ** 4)

    roots = []

    def deflated(z):
        v = h(z)
        for r in roots:
            v = v / (z - r)
        return v

    seeds = [0.31 + 0.17j, -0.7 + 0.55j, 1.3 - 0.9j, -1.9 - 1.4j, 2.7 + 2.2j]
    for _ in range(2):
        found = None
        for s in seeds:
            with np.errstate(all="ignore"):
                r = _muller(deflated, s, s * 1.1 + 0.05, s * 0.9 - 0.05j)
                ok = np.isfinite(r) and abs(r) < 1e8 and np.isfinite(h(r))
            if ok and small(r):
                found = r
                break
        if found is None:
            break
        if any(abs(found - r) < 1e-5 * (1 + abs(r)) for r in roots) and \
                not _is_double(h, roots[0]):
            break
        roots.append(found)
    # polish against the undeflated function
    roots = [_muller(h, r, r + 1e-4, r - 1e-4j) for r in roots]
    n_inf = 2 - len(roots)
    if n_inf:
        # zero fibers at infinity: h grows like z^(2 - n_inf); test the point itself
        q_inf = q_from_point(G2.CurvePoint.infinity(1), S, curve)
        if abs(ell(q_inf)) > 1e3 * tol * np.linalg.norm(ell.ell):
            raise ClassificationFailure(f"found {2 * len(roots)} zeros instead of 4")
    for r in roots:
        for pt in _fiber(curve, r):
            if abs(ell(q_from_point(pt, S, curve))) > 1e3 * tol * np.linalg.norm(ell.ell):
                raise ClassificationFailure(f"zero at z={r:.6g} failed verification")
    p = np.ones(1, dtype=np.complex128)
    for r in roots:
        p = P.polymul(p, np.array([-r, 1]))
    fibers = tuple(roots) + (np.inf,) * n_inf
    return QuadraticDifferential(_unit(G2._pad(p, 3)), fibers)


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

@dataclass
class StabilityVerdict:
    verdict: str
    criterion: str = "non-stable iff omega Q = alpha beta has a solution"
    destabilizing_point: object = None
    witness: dict = field(default_factory=dict)
    identity_residual: float = 0.0
    zero_fibers: tuple = ()
    completion: tuple = ()

    @property
    def stable(self):
        return self.verdict == "stable"

    def to_dict(self):
        out = {"verdict": self.verdict, "criterion": self.criterion,
               "zero_fibers": [str(r) for r in self.zero_fibers],
               "completion": [p.to_list() for p in self.completion]}
        if self.destabilizing_point is not None:
            out["destabilizing_point"] = self.destabilizing_point.to_list()
            out["identity_residual"] = self.identity_residual
            out["witness"] = {k: [[c.real, c.imag] for c in v] for k, v in self.witness.items()}
        return out


def ks_covector(pt, S, curve):
    """Linear form on span{s, t} whose kernel is the sections vanishing at pt."""
    if pt.inf:
        return np.array([1.0, pt.inf * curve.sqrt_lead])
    lab = curve.label_of(pt)
    if lab is not None:
        return np.array([0.0, 1.0]) if lab in S.partition.first else np.array([1.0, 0.0])
    return np.array([P.polyval(pt.z, S.P_D()), pt.y])


def ks_vanishing_at(pt, S, curve):
    """(mu, nu): the KS section mu s + nu t vanishing at pt (unique up to scale)."""
    a, b = ks_covector(pt, S, curve)
    return _unit(np.array([b, -a]))


def _k3_vector(poly=None, ycoef=0.0):
    """Coordinates in H^0(K^3) basis 1, z, z^2, z^3, y."""
    v = np.zeros(5, dtype=np.complex128)
    if poly is not None:
        v[:4] = G2._pad(poly, 4)
    v[4] = ycoef
    return v


def _products(S, curve):
    """K^3 vectors of s^2, s t, t^2."""
    return np.column_stack([_k3_vector(S.P_D()), _k3_vector(None, 1.0),
                            _k3_vector(curve.lead * S.P_Dt())])


def _solve_beta(target, alpha, S, curve):
    mu, nu = alpha
    W = _products(S, curve)
    # alpha * (mu' s + nu' t) = mu mu' s^2 + (mu nu' + nu mu') s t + nu nu' t^2
    A = np.column_stack([mu * W[:, 0] + nu * W[:, 1], mu * W[:, 1] + nu * W[:, 2]])
    beta, *_ = np.linalg.lstsq(A, target, rcond=None)
    res = np.linalg.norm(A @ beta - target) / max(np.linalg.norm(target), 1e-300)
    return beta, float(res)


def omega_times_q(a, Q):
    """K^3 vector of omega Q with omega = (z - a) dz/y, or dz/y for a = inf."""
    lin = np.array([1.0 + 0j]) if not np.isfinite(a) else np.array([-a, 1])
    return _k3_vector(P.polymul(lin, Q.p))


def verify_witness(Q, S, curve, a, alpha, beta, n_points=16):
    """Relative residual of omega Q - alpha beta.

    The product is formed with rational-section arithmetic and compared with
    omega Q at sample points of the curve, so no symbolic cancellation is needed.
    """
    s, t = G2.ks_pair(S)
    sec = lambda c: G2._section(curve, c[0] * s.a, c[1] * t.b, s.d, 1, 1, s.spin, "KS")
    prod = sec(alpha) * sec(beta)
    lin = np.array([1.0 + 0j]) if not np.isfinite(a) else np.array([-a, 1])
    lhs = P.polymul(lin, Q.p)
    k = np.arange(n_points)
    zs = (0.7 + 0.45 * (k % 4)) * np.exp(2j * np.pi * (k + 0.31) / n_points)
    worst = 0.0
    for z in zs:
        y = np.sqrt(curve(z))
        for yy in (y, -y):
            ref = P.polyval(z, lhs)
            val = prod.coefficient(z, yy)
            worst = max(worst, abs(val - ref) / max(abs(ref), np.max(np.abs(lhs))))
    return float(worst)


def stability_check(Q, S, curve=None):
    curve = S.curve if curve is None else curve
    roots = Q.roots()
    r1, r2 = roots[0], roots[1]
    P1 = _fiber(curve, r1)[0]
    Pt, Ph = G2.complete_to_KS(P1, S, curve)
    hit = [x for x in (Pt, Ph) if _same_abscissa(x, r2)]
    base = dict(zero_fibers=tuple(roots), completion=(Pt, Ph))
    if not hit:
        return StabilityVerdict("stable", **base)
    X = hit[0]
    A = Ph if X is Pt else Pt
    a = A.z if not A.inf else np.inf
    alpha = ks_vanishing_at(P1, S, curve)
    target = omega_times_q(a, Q)
    beta, res = _solve_beta(target, alpha, S, curve)
    check = verify_witness(Q, S, curve, a, alpha, beta)
    if max(res, check) > WITNESS_TOL:
        raise UnhandledDegeneracy(f"witness identity residual {max(res, check):.3e}")
    omega = np.array([1.0, 0.0]) if not np.isfinite(a) else np.array([-a, 1.0])
    return StabilityVerdict("non-stable", destabilizing_point=A,
                            witness={"omega": omega, "alpha": alpha, "beta": beta},
                            identity_residual=max(res, check), **base)


# ---------------------------------------------------------------------------
# product subspace and brute-force decomposition
# ---------------------------------------------------------------------------

@dataclass
class ProductSubspace:
    basis: np.ndarray   # columns s^2, s t, t^2 in K^3 coordinates
    dim: int
    S: object

    @staticmethod
    def factor(a, b, c):
        """(l1, m1), (l2, m2) with a X^2 + b XY + c Y^2 = (l1 X + m1 Y)(l2 X + m2 Y)."""
        a, b, c = complex(a), complex(b), complex(c)
        scale = max(abs(a), abs(b), abs(c))
        if scale == 0:
            return (0j, 0j), (1 + 0j, 0j)
        if abs(a) <= 1e-14 * scale:
            return (0j, 1 + 0j), (b, c)
        disc = np.sqrt(b * b - 4 * a * c + 0j)
        q = -0.5 * (b + disc) if abs(b + disc) >= abs(b - disc) else -0.5 * (b - disc)
        if q == 0:
            r1 = r2 = 0j
        else:
            r1, r2 = q / a, c / q    # roots of a x^2 + b x + c (stable pair)
        # a (X - r1 Y)(X - r2 Y)
        return (a, -a * r1), (1 + 0j, -r2)

    def coordinates(self, v):
        x, *_ = np.linalg.lstsq(self.basis, v, rcond=None)
        return x, float(np.linalg.norm(self.basis @ x - v))

    def factorize(self, v):
        (a, b, c), res = self.coordinates(v)
        return self.factor(a, b, c), res


def product_subspace(S, curve=None):
    curve = S.curve if curve is None else curve
    Wm = _products(S, curve)
    return ProductSubspace(Wm, int(np.linalg.matrix_rank(Wm)), S)


def _w_distance(v, Wm):
    x, *_ = np.linalg.lstsq(Wm, v, rcond=None)
    return float(np.linalg.norm(Wm @ x - v) / max(np.linalg.norm(v), 1e-300))


def decomposition_oracle(Q, S, curve=None, grid=48, threshold=1e-8):
    """Brute-force search for omega Q = alpha beta; returns (omega, alpha, beta) or None.

    omega runs over a discretised projective line (a on a polar grid and
    infinity); the best candidates are polished by a 2x2 generalised
    eigenproblem (exact minimisation of the distance of omega Q to W), then
    factored and certified by the identity check.
    """
    curve = S.curve if curve is None else curve
    ps = product_subspace(S, curve)
    Wm = ps.basis
    Qn = QuadraticDifferential(_unit(Q.p))
    radii = np.concatenate([[0.0], np.geomspace(0.05, 20, grid // 4)])
    angles = 2 * np.pi * (np.arange(grid) + 0.5) / grid
    cands = [0j] + [r * np.exp(1j * t) for r in radii[1:] for t in angles]
    scores = [(_w_distance(omega_times_q(a, Qn), Wm), a) for a in cands]
    scores.append((_w_distance(omega_times_q(np.inf, Qn), Wm), np.inf))
    scores.sort(key=lambda s: s[0])
    # projector onto the complement of W
    q, _ = np.linalg.qr(Wm)
    Pc = np.eye(5) - q @ np.conj(q.T)
    v1 = Pc @ omega_times_q(np.inf, Qn)         # p
    z_p = Pc @ _k3_vector(P.polymul(np.array([0, 1]), Qn.p))   # z p
    # minimise |z_p - a v1| over homogeneous (1 : a)  ->  2x2 generalised eigenproblem
    M = np.column_stack([z_p, -v1])
    gram = np.conj(M.T) @ M
    w, V = np.linalg.eigh(gram)
    vec = V[:, 0]
    polished = [np.inf if abs(vec[0]) < 1e-14 * abs(vec[1]) else vec[1] / vec[0]]
    trial = polished + [s[1] for s in scores[:3]]
    for a in trial:
        target = omega_times_q(a, Qn)
        if _w_distance(target, Wm) > threshold:
            continue
        ((l1, m1), (l2, m2)), _ = ps.factorize(target)
        alpha = np.array([l1, m1])
        beta = np.array([l2, m2])
        res = verify_witness(Qn, S, curve, a, alpha, beta)
        if res < WITNESS_TOL:
            omega = np.array([1.0, 0.0]) if not np.isfinite(a) else np.array([-a, 1.0])
            return omega, alpha, beta
    return None


# ---------------------------------------------------------------------------
# Hopf pairing
# ---------------------------------------------------------------------------

def default_density(curve):
    """|omega_1|^2 + |omega_2|^2 as a multiple of |dz|^2."""
    return lambda z: (1 + np.abs(z) ** 2) / np.abs(curve(z))


def _cutoff(x):
    """Smooth function equal to 1 for x <= 1/2 and 0 for x >= 1."""
    x = np.clip((np.asarray(x, dtype=float) - 0.5) * 2, 0, 1)
    with np.errstate(divide="ignore", over="ignore"):
        g0 = np.where(x > 0, np.exp(-1 / np.where(x > 0, x, 1)), 0.0)
        g1 = np.where(x < 1, np.exp(-1 / np.where(x < 1, 1 - x, 1)), 0.0)
    return g1 / (g0 + g1)


def _polar_rule(center, radius, n_theta, n_r):
    s, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (s + 1)
    wr = 0.5 * radius * w * r
    th = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    z = center + r[:, None] * np.exp(1j * th)[None, :]
    return z, wr[:, None] * (2 * np.pi / n_theta), r


def _pairing(Qh, curve, density, n_theta, n_r):
    """Integral over both sheets.

    Each branch point sits inside a smooth bump, integrated in local polar
    coordinates which absorb the 1/|z - e| singularity.  A bump lives in the
    chart (z or w = 1/z) where its branch point has modulus <= 1.  The smooth
    remainder is integrated over |z| <= 1 and |w| <= 1.
    """
    def integrand(zz):
        base = np.conj(P.polyval(zz, Qh.p)) / (np.abs(curve(zz)) ** 2 * density(zz))
        return np.stack([zz ** k * base for k in range(3)])

    def in_chart(u, outer):
        if not outer:
            return integrand(u)
        return integrand(1 / u) / np.abs(u) ** 4

    homes = []
    for e in curve.roots:
        outer = abs(e) > 1
        c = 1 / e if outer else e
        others = [1 / x if outer else x for x in curve.roots if x != e and (x != 0 or not outer)]
        rho = min(0.5, 0.45 * min(abs(c - o) for o in others))
        homes.append((c, outer, rho))

    def bumps(u, outer):
        total = 0.0
        for c, o, rho in homes:
            v = u if o == outer else 1 / u
            total = total + _cutoff(np.abs(v - c) / rho)
        return total

    out = np.zeros(3, dtype=np.complex128)
    for c, outer, rho in homes:
        u, w, r = _polar_rule(c, rho, n_theta, n_r)
        out += np.sum(in_chart(u, outer) * _cutoff(r / rho)[:, None] * w, axis=(1, 2))
    for outer in (False, True):
        u, w, _ = _polar_rule(0.0, 1.0, n_theta, n_r)
        out += np.sum(in_chart(u, outer) * (1 - bumps(u, outer)) * w, axis=(1, 2))
    return 2 * out


def hopf_pairing(Qh, curve, density=None, tol=1e-8, n_theta=96, n_r=48, max_doublings=4):
    """Functional l(q_k) = integral over the curve of (q_k, Qh) for the density metric.

    The estimate is refined by doubling both grids; the returned functional
    carries the last difference as its error estimate.
    """
    density = default_density(curve) if density is None else density
    prev = _pairing(Qh, curve, density, n_theta, n_r)
    err = np.inf
    for _ in range(max_doublings):
        n_theta, n_r = 2 * n_theta, 2 * n_r
        cur = _pairing(Qh, curve, density, n_theta, n_r)
        err = float(np.max(np.abs(cur - prev)) / max(np.max(np.abs(cur)), 1e-300))
        prev = cur
        if err < tol:
            return ExtensionFunctional(cur, err)
    raise QuadratureError("pairing quadrature did not converge", err)


def lawson_curve():
    """y^2 = z^6 - 1 with e_k = exp(i pi (k-1)/3)."""
    return G2.HyperellipticCurve(roots=np.exp(1j * np.pi * np.arange(6) / 3))


def rotation_invariant_partitions(curve, step=np.exp(1j * np.pi / 3)):
    """Even partitions preserved (as unordered pairs of triples) by z -> step z."""
    from dpwlab.potential import even_partitions
    out = []
    for part in even_partitions():
        imgs = []
        for triple in (part.first, part.second):
            lab = [int(np.argmin(np.abs(curve.roots - step * curve.roots[i - 1]))) + 1
                   for i in triple]
            imgs.append(tuple(sorted(lab)))
        if set(imgs) == {part.first, part.second}:
            out.append(part)
    return out
