"""DPW potentials with rational entries in one affine z-chart.

A potential is xi = sum_n zeta^n xi_n(z) dz where each xi_n is a 2x2 matrix of
rational functions.  Pole orders are measured by repeated synthetic division,
so a location is treated as a root when the division remainder is below
``ROOT_TOL`` relative to the polynomial scale.
"""

from dataclasses import dataclass, field
import json

import numpy as np

ROOT_TOL = 1e-9
DEFAULT_SERIES_CAP = 16


class UnsupportedRepresentation(TypeError):
    pass


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    nz = np.nonzero(np.abs(c) > 0)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=np.complex128)
    return c[: nz[-1] + 1].copy()


def _divide_root(c, r):
    """Synthetic division of ascending coefficients by (z - r): (quotient, remainder)."""
    n = c.size - 1
    if n == 0:
        return np.zeros(1, dtype=np.complex128), c[0]
    q = np.zeros(n, dtype=np.complex128)
    acc = c[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = c[k] + acc * r
    return q, acc


def root_multiplicity(c, r, tol=ROOT_TOL):
    """Multiplicity of r as a root of the polynomial with ascending coefficients c."""
    c = _trim(c)
    m = 0
    while c.size > 1:
        scale = np.sum(np.abs(c) * np.abs(r) ** np.arange(c.size)) + 1e-300
        q, rem = _divide_root(c, r)
        if abs(rem) > tol * scale:
            break
        c, m = q, m + 1
    return m


def _strip_root(c, r, times):
    c = _trim(c)
    for _ in range(times):
        c, _ = _divide_root(c, r)
    return c


def _root_clusters(c, link=1e-4):
    """Distinct roots (centroids of nearby numerical roots) of an ascending polynomial."""
    c = _trim(c)
    if c.size <= 1:
        return []
    rts = list(np.roots(c[::-1]))
    groups = []
    for r in rts:
        for g in groups:
            if abs(np.mean(g) - r) < link * (1 + abs(r)):
                g.append(r)
                break
        else:
            groups.append([r])
    return [complex(np.mean(g)) for g in groups]


_PROBES = 1.3 * np.exp(2j * np.pi * np.array([0.113, 0.389, 0.641, 0.877]))


def _same_values(n0, d0, n1, d1, tol=1e-7):
    P = np.polynomial.polynomial
    with np.errstate(all="ignore"):
        a = P.polyval(_PROBES, n0) / P.polyval(_PROBES, d0)
        b = P.polyval(_PROBES, n1) / P.polyval(_PROBES, d1)
    ok = np.abs(a - b) <= tol * (np.abs(a) + np.abs(b) + 1e-300)
    return bool(np.all(ok | ~np.isfinite(a)))


@dataclass(frozen=True, eq=False)
class RationalFunction:
    num: np.ndarray
    den: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=np.complex128))

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if np.all(den == 0):
            raise ZeroDivisionError("denominator is identically zero")
        if np.all(num == 0):
            num, den = np.zeros(1, dtype=np.complex128), np.ones(1, dtype=np.complex128)
        else:
            for r in _root_clusters(den):
                k = min(root_multiplicity(num, r), root_multiplicity(den, r))
                if k:
                    n1, d1 = _strip_root(num, r, k), _strip_root(den, r, k)
                    # deflation at a badly separated root can destroy a nearby one
                    if _same_values(num, den, n1, d1):
                        num, den = n1, d1
            lead = den[-1]
            num, den = num / lead, den / lead
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, c):
        return cls(np.array([c]))

    @classmethod
    def polynomial(cls, coeffs):
        return cls(np.asarray(coeffs))

    @property
    def is_zero(self):
        return bool(np.all(self.num == 0))

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return np.polynomial.polynomial.polyval(z, self.num) / \
            np.polynomial.polynomial.polyval(z, self.den)

    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction.constant(other)
        P = np.polynomial.polynomial
        return RationalFunction(P.polyadd(P.polymul(self.num, other.den),
                                          P.polymul(other.num, self.den)),
                                P.polymul(self.den, other.den))

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            return RationalFunction(self.num * complex(other), self.den)
        P = np.polynomial.polynomial
        return RationalFunction(P.polymul(self.num, other.num), P.polymul(self.den, other.den))

    __rmul__ = __mul__

    def pole_order(self, z0):
        """Order of the pole at z0 (0 if regular, negative for a zero)."""
        return root_multiplicity(self.den, z0) - root_multiplicity(self.num, z0)

    def poles(self):
        """{location: order} over the finite plane."""
        out = {}
        for r in _root_clusters(self.den):
            k = self.pole_order(r)
            if k > 0:
                out[r] = k
        return out

    def to_list(self):
        return [[[float(x.real), float(x.imag)] for x in self.num],
                [[float(x.real), float(x.imag)] for x in self.den]]

    @classmethod
    def from_list(cls, d):
        def cx(v):
            a = np.asarray(v, dtype=float).reshape(-1, 2)
            return a[:, 0] + 1j * a[:, 1]
        return cls(cx(d[0]), cx(d[1]))


ZERO = RationalFunction.constant(0.0)


@dataclass(frozen=True)
class SpinPartition:
    first: tuple
    second: tuple

    def __post_init__(self):
        a = tuple(sorted(int(i) for i in self.first))
        b = tuple(sorted(int(i) for i in self.second))
        if len(a) != 3 or len(b) != 3 or set(a) | set(b) != set(range(1, 7)):
            raise ValueError("a spin partition splits labels 1..6 into two triples")
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second", b)

    def triple_of(self, label):
        return 1 if label in self.first else 2

    def to_dict(self):
        return {"first": list(self.first), "second": list(self.second)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["first"]), tuple(d["second"]))


def even_partitions():
    """The ten splittings of the six labels into two triples (label 1 in the first)."""
    from itertools import combinations
    out = []
    for pair in combinations(range(2, 7), 2):
        first = (1,) + pair
        out.append(SpinPartition(first, tuple(i for i in range(1, 7) if i not in first)))
    return out


@dataclass(frozen=True)
class DeclaredPole:
    location: complex
    orders: tuple  # bounds for entries (00, 01, 10, 11)


class DPWPotential:
    """xi = sum_n zeta^n xi_n dz with xi_n a 2x2 array of RationalFunction."""

    def __init__(self, entries, declared_poles=(), partition=None, params=None):
        self.entries = {}
        for n, mat in entries.items():
            m = [[mat[r][c] if isinstance(mat[r][c], RationalFunction)
                  else RationalFunction.constant(mat[r][c]) for c in range(2)] for r in range(2)]
            if any(not m[r][c].is_zero for r in range(2) for c in range(2)):
                self.entries[int(n)] = m
        self.declared_poles = tuple(declared_poles)
        self.partition = partition
        self.params = params or {}

    @property
    def indices(self):
        return sorted(self.entries)

    @property
    def lowest_index(self):
        return min(self.entries) if self.entries else 0

    def coefficient(self, n):
        return self.entries.get(n, [[ZERO, ZERO], [ZERO, ZERO]])

    def evaluate(self, z, zeta):
        out = np.zeros((2, 2), dtype=np.complex128)
        for n, m in self.entries.items():
            w = zeta ** n
            for r in range(2):
                for c in range(2):
                    if not m[r][c].is_zero:
                        out[r, c] += w * m[r][c](z)
        return out

    def trace_residual(self, samples=None):
        """Max |trace xi_n(z)| over sample points (should vanish identically)."""
        zs = samples if samples is not None else np.array([0.37 + 0.61j, -1.3 + 0.2j, 2.1 - 0.9j])
        worst = 0.0
        for m in self.entries.values():
            t = (m[0][0] + m[1][1])(zs)
            worst = max(worst, float(np.max(np.abs(t))))
        return worst

    def pole_locations(self):
        locs = []
        for m in self.entries.values():
            for row in m:
                for f in row:
                    for p in f.poles():
                        if all(abs(p - q) > 1e-7 * (1 + abs(p)) for q in locs):
                            locs.append(p)
        return locs

    def pack(self, zeta):
        """Arrays (num, nlen, den, dlen, ent, wts) for the transport kernel at fixed zeta."""
        terms = []
        for n, m in self.entries.items():
            w = complex(zeta) ** n
            for r in range(2):
                for c in range(2):
                    f = m[r][c]
                    if not f.is_zero:
                        terms.append((f, 2 * r + c, w))
        t = max(len(terms), 1)
        nmax = max([f.num.size for f, _, _ in terms] + [1])
        dmax = max([f.den.size for f, _, _ in terms] + [1])
        num = np.zeros((t, nmax), dtype=np.complex128)
        den = np.zeros((t, dmax), dtype=np.complex128)
        den[:, 0] = 1.0
        nlen = np.ones(t, dtype=np.int64)
        dlen = np.ones(t, dtype=np.int64)
        ent = np.zeros(t, dtype=np.int64)
        wts = np.zeros(t, dtype=np.complex128)
        for i, (f, e, w) in enumerate(terms):
            num[i, : f.num.size] = f.num
            den[i, : f.den.size] = f.den
            nlen[i], dlen[i], ent[i], wts[i] = f.num.size, f.den.size, e, w
        return num, nlen, den, dlen, ent, wts

    def to_dict(self):
        return {
            "entries": {str(n): [[f.to_list() for f in row] for row in m]
                        for n, m in self.entries.items()},
            "declared_poles": [{"location": [p.location.real, p.location.imag],
                                "orders": list(p.orders)} for p in self.declared_poles],
            "partition": self.partition.to_dict() if self.partition else None,
        }

    @classmethod
    def from_dict(cls, d):
        entries = {}
        for n, m in d["entries"].items():
            try:
                entries[int(n)] = [[RationalFunction.from_list(f) for f in row] for row in m]
            except (TypeError, ValueError, IndexError) as exc:
                raise UnsupportedRepresentation(f"entry at index {n} is not rational") from exc
        poles = [DeclaredPole(complex(*p["location"]), tuple(p["orders"]))
                 for p in d.get("declared_poles", [])]
        part = d.get("partition")
        return cls(entries, poles, SpinPartition.from_dict(part) if part else None)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Lawson family
# ---------------------------------------------------------------------------

def _series(x, cap):
    if np.ndim(x) == 0:
        s = np.zeros(1, dtype=np.complex128)
        s[0] = x
        return s
    s = np.asarray(x, dtype=np.complex128)[: cap + 1]
    return s if s.size else np.zeros(1, dtype=np.complex128)


def _smul(a, b, cap):
    return np.convolve(a, b)[: cap + 1]


def _sdiv(a, b, cap):
    """Power-series quotient a / b truncated at degree cap."""
    if b[0] == 0:
        raise ZeroDivisionError("G must be nonzero at zeta = 0")
    n = cap + 1
    a = np.concatenate([a, np.zeros(max(0, n - a.size))])[:n]
    b = np.concatenate([b, np.zeros(max(0, n - b.size))])[:n]
    q = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        q[k] = (a[k] - np.dot(q[:k], b[k:0:-1])) / b[0]
    return np.trim_zeros(q, "b") if np.any(q) else q[:1]


def _sadd(*terms):
    n = max(t.size for t in terms)
    out = np.zeros(n, dtype=np.complex128)
    for t in terms:
        out[: t.size] += t
    return out


def lawson_coefficients(A, G, cap=DEFAULT_SERIES_CAP):
    """(A, G, H, B) as zeta power series with H = A + A^2 and G B = 1/3 - A - (1/3 - A)^2."""
    a = _series(A, cap)
    g = _series(G, cap)
    if g.size == 1 and g[0] == 0:
        raise ZeroDivisionError("G = 0 makes B undefined")
    h = _sadd(a, _smul(a, a, cap))
    third = np.array([1 / 3], dtype=np.complex128)
    c = _sadd(third, -a)
    inner = _sadd(-third, a, _smul(c, c, cap))
    b = -_sdiv(inner, g, cap)
    return a, g, h, b


LAWSON_WEIERSTRASS = (0j, 0j, 0j, np.inf, np.inf, np.inf)
LAWSON_PARTITION = SpinPartition((1, 2, 3), (4, 5, 6))


def lawson_potential(A, G, cap=DEFAULT_SERIES_CAP):
    """Lawson genus-2 potential on y^3 = z^4 - 1; A, G constants or zeta series."""
    a, g, h, b = lawson_coefficients(A, G, cap)
    R = RationalFunction
    quartic = np.array([-1, 0, 0, 0, 1], dtype=np.complex128)
    z2quartic = np.array([0, 0, -1, 0, 0, 0, 1], dtype=np.complex128)
    gauge = R(np.array([0, 0, 0, -4 / 3]), quartic)
    entries = {}

    def slot(n):
        if n not in entries:
            entries[n] = [[ZERO, ZERO], [ZERO, ZERO]]
        return entries[n]

    def put(n, r, c, f):
        m = slot(n)
        m[r][c] = m[r][c] + f

    put(-1, 0, 1, R.constant(1.0))
    put(0, 0, 0, gauge)
    put(0, 1, 1, -gauge)
    for n, v in enumerate(a):
        put(n, 0, 0, R(np.array([v]), np.array([0, 1])))
        put(n, 1, 1, R(np.array([-v]), np.array([0, 1])))
    for n, v in enumerate(b):
        put(n, 0, 1, R(np.array([0, 0, v])))
    for n, v in enumerate(g):
        put(n, 1, 0, R(np.array([v]), quartic))
    for n, v in enumerate(h):
        put(n + 1, 1, 0, R(np.array([v]), z2quartic))
    branch = [DeclaredPole(complex(np.exp(0.5j * np.pi * k)), (1, 0, 1, 1)) for k in range(4)]
    return DPWPotential(entries, branch, LAWSON_PARTITION,
                        {"A": a, "G": g, "H": h, "B": b})


# ---------------------------------------------------------------------------
# Validators
# ---------------------------------------------------------------------------

@dataclass
class PoleReport:
    passed: bool
    checks: list
    failures: list

    def to_dict(self):
        return {"passed": self.passed, "checks": self.checks, "failures": self.failures}


_ENTRY = ("00", "01", "10", "11")


def _weierstrass_bounds(triple):
    """Bounds (00, 01, 10, 11) at a Weierstrass point of the given triple."""
    lower = 2 if triple == 1 else 1
    upper = 2 if triple == 2 else 1
    return (1, upper, lower, 1)


def validate_pole_structure(pot, part, weierstrass_locations, tol=1e-7):
    """Measure pole orders of every coefficient entry against the admissible bounds.

    Lower-left entries may have order 2 at the first triple, upper-right ones
    at the second triple, diagonal entries order 1 everywhere.  Locations
    given as ``inf`` are outside the affine chart and skipped.  Poles away
    from Weierstrass points must lie on ``pot.declared_poles``.
    """
    if len(weierstrass_locations) != 6:
        raise ValueError("six Weierstrass locations are required")
    points = {}
    for label, loc in enumerate(weierstrass_locations, start=1):
        if not np.isfinite(loc):
            continue
        loc = complex(loc)
        key = next((k for k in points if abs(k - loc) <= tol), loc)
        bounds = _weierstrass_bounds(part.triple_of(label))
        old = points.get(key)
        points[key] = bounds if old is None else tuple(max(x, y) for x, y in zip(old, bounds))
    for p in pot.declared_poles:
        key = next((k for k in points if abs(k - p.location) <= tol), p.location)
        points.setdefault(key, tuple(p.orders))
    checks, failures = [], []
    for n in pot.indices:
        m = pot.coefficient(n)
        for e, name in enumerate(_ENTRY):
            f = m[e // 2][e % 2]
            if f.is_zero:
                continue
            for loc, order in f.poles().items():
                key = next((k for k in points if abs(k - loc) <= tol * (1 + abs(k))), None)
                if key is None:
                    failures.append(f"off-divisor pole of order {order} at z={loc:.6g} "
                                    f"in entry {name}, zeta^{n}")
                    checks.append({"n": n, "entry": name, "z": [loc.real, loc.imag],
                                   "order": order, "bound": 0, "ok": False})
                    continue
                bound = points[key][e]
                ok = order <= bound
                checks.append({"n": n, "entry": name, "z": [key.real, key.imag],
                               "order": order, "bound": bound, "ok": ok})
                if not ok:
                    failures.append(f"entry {name}, zeta^{n}: pole of order {order} at "
                                    f"z={key:.6g} exceeds bound {bound}")
    return PoleReport(not failures, checks, failures)


def leading_term_check(pot, tol=1e-12):
    """Check the zeta^-1 shape and report the zeta^0 lower-left entry as Hopf candidate."""
    failures = []
    if pot.lowest_index < -1:
        failures.append(f"lowest zeta power is {pot.lowest_index} < -1")
    m = pot.coefficient(-1)
    for r, c in ((0, 0), (1, 0), (1, 1)):
        if not m[r][c].is_zero:
            failures.append(f"zeta^-1 coefficient has nonzero entry {r}{c}")
    upper = m[0][1]
    if upper.is_zero:
        failures.append("zeta^-1 upper-right entry vanishes")
    scalar = None
    if not upper.is_zero:
        scalar = upper
        if upper.den.size == 1 and upper.num.size == 1:
            scalar = complex(upper.num[0])
    hopf = pot.coefficient(0)[1][0]
    return {
        "passed": not failures,
        "failures": failures,
        "upper_scalar": scalar,
        "hopf_candidate": hopf,
        "trace_residual": pot.trace_residual(),
    }
