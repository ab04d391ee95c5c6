"""Parallel transport dPsi = Psi xi along polygonal paths in the z-plane."""

from dataclasses import dataclass
import json

import numpy as np

from dpwlab import _kernels
from dpwlab import loops as L

DEFAULT_TOL = 1e-10


class PathTooClose(ValueError):
    pass


class StiffnessFailure(ArithmeticError):
    pass


def _segment_distance(a, b, p):
    d = b - a
    t = np.clip(((p - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return abs(a + t * d - p)


@dataclass(frozen=True)
class Path:
    waypoints: tuple
    closed: bool = False

    def __post_init__(self):
        w = [complex(p) for p in self.waypoints]
        if self.closed and abs(w[0] - w[-1]) > 0:
            w.append(w[0])
        if len(w) < 2:
            raise ValueError("a path needs at least two waypoints")
        for a, b in zip(w, w[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        object.__setattr__(self, "waypoints", tuple(w))

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def segments(self):
        return list(zip(self.waypoints, self.waypoints[1:]))

    def reversed(self):
        return Path(self.waypoints[::-1], False)

    def then(self, other):
        if abs(self.waypoints[-1] - other.waypoints[0]) > 1e-14:
            raise ValueError("paths do not join")
        w = self.waypoints + other.waypoints[1:]
        return Path(w, abs(w[0] - w[-1]) == 0)

    def clearance(self, poles):
        if len(poles) == 0:
            return np.inf
        return min(_segment_distance(a, b, p) for a, b in self.segments for p in poles)

    def refined(self, factor=2):
        w = [self.waypoints[0]]
        for a, b in self.segments:
            for k in range(1, factor + 1):
                w.append(a + (b - a) * k / factor)
        return Path(w, False)

    def to_dict(self):
        return {"waypoints": [[p.real, p.imag] for p in self.waypoints], "closed": self.closed}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(complex(*p) for p in d["waypoints"]), bool(d.get("closed", False)))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def loop_around(center, radius, basepoint=None, sides=24, start_angle=0.0):
    """Counterclockwise polygon around ``center``; with a basepoint the loop is
    the tail basepoint -> circle, once around, and back."""
    ang = start_angle + 2 * np.pi * np.arange(sides + 1) / sides
    circle = [complex(center + radius * np.exp(1j * a)) for a in ang]
    if basepoint is None:
        return Path(circle, True)
    b = complex(basepoint)
    return Path([b] + circle + [b], True)


def default_delta(poles):
    poles = list(poles)
    if len(poles) < 2:
        return 1e-3
    d = min(abs(a - b) for i, a in enumerate(poles) for b in poles[i + 1:])
    return 1e-2 * d


@dataclass(frozen=True)
class Holonomy:
    value: object
    basepoint: complex
    path: Path
    zeta: complex
    det_defect: float


def _transport_fixed(packed, path, tol, impl=None):
    psi = np.eye(2, dtype=np.complex128)
    steps = 0
    for a, b in path.segments:
        psi, n, status, _ = _kernels.rk_segment(psi, a, b, packed, tol, impl=impl)
        if status == 1:
            raise StiffnessFailure(f"step size underflow on segment {a} -> {b}")
        if status == 2:
            raise StiffnessFailure(f"step budget exhausted on segment {a} -> {b}")
        steps += n
        psi = psi / np.sqrt(np.linalg.det(psi))
    return psi, steps


def parallel_transport(pot, path, zeta=None, mode="fixed", tol=DEFAULT_TOL,
                       samples=None, trunc=L.DEFAULT_TRUNCATION, delta=None, impl=None):
    """Psi(end) for dPsi = Psi xi, Psi(start) = I.

    ``mode="fixed"`` integrates at one zeta and returns a 2x2 matrix.
    ``mode="loop"`` integrates at ``samples`` unit zeta values and returns the
    Laurent coefficients -trunc..trunc; the energy outside the window is kept
    in ``tail``.
    """
    poles = pot.pole_locations()
    delta = default_delta(poles) if delta is None else delta
    if path.clearance(poles) < delta:
        raise PathTooClose(f"path passes within {path.clearance(poles):.3e} of a pole "
                           f"(delta {delta:.3e})")
    if mode == "fixed":
        if zeta is None or zeta == 0:
            raise ValueError("fixed mode needs a nonzero zeta")
        return _transport_fixed(pot.pack(zeta), path, tol, impl)[0]
    if mode != "loop":
        raise ValueError(f"unknown mode {mode!r}")
    p = samples or max(64, 4 * (2 * trunc + 1))
    zs = L.unit_samples(p)
    vals = np.array([_transport_fixed(pot.pack(z), path, tol, impl)[0] for z in zs])
    full = L.from_samples(vals, -(p // 2), p - p // 2 - 1)
    return full.truncated(-trunc, trunc)


def holonomy(pot, loop, zeta, tol=DEFAULT_TOL, delta=None):
    if not loop.closed:
        raise ValueError("holonomy needs a closed path")
    if zeta == 0:
        raise ValueError("zeta = 0 is a pole of the family")
    m = parallel_transport(pot, loop, zeta=zeta, tol=tol, delta=delta)
    return Holonomy(m, loop.start, loop, complex(zeta), float(abs(np.linalg.det(m) - 1)))


def abelianness_probe(hols):
    """Max over pairs of the Frobenius norm of X Y - Y X."""
    mats = [h.value if isinstance(h, Holonomy) else np.asarray(h) for h in hols]
    if isinstance(hols[0], Holonomy):
        if len({h.basepoint for h in hols}) > 1 or len({h.zeta for h in hols}) > 1:
            raise ValueError("holonomies must share basepoint and zeta")
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i])))
    return worst


def continue_branch(path, y0, fn=lambda z: z ** 4 - 1, degree=3, substeps=64):
    """Analytic continuation of y with y**degree = fn(z) along ``path``.

    Returns the final value of y; comparing with y0 on a closed path gives
    the sheet permutation of the cover.
    """
    y = complex(y0)
    for a, b in path.segments:
        for t in np.linspace(0, 1, substeps + 1)[1:]:
            z = a + t * (b - a)
            w = complex(fn(z))
            r = abs(w) ** (1 / degree) * np.exp(1j * np.angle(w) / degree)
            cands = r * np.exp(2j * np.pi * np.arange(degree) / degree)
            y = cands[np.argmin(np.abs(cands - y))]
    return y
