"""Forward construction: potential -> extended frame -> surface in S^3 = SU(2)."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from dpwlab import chart as CH
from dpwlab import iwasawa as IW
from dpwlab import loops as L
from dpwlab import potential as P
from dpwlab import transport as T

SU2_BASIS = np.array([[[1j, 0], [0, -1j]], [[0, 1], [-1, 0]], [[0, 1j], [1j, 0]]])


class DegenerateSurface(ValueError):
    pass


def _grid_z(x, y):
    return np.asarray(x)[None, :] + 1j * np.asarray(y)[:, None]


def _nearest_node(x, y, z0):
    i = int(np.argmin(np.abs(np.asarray(x) - z0.real)))
    j = int(np.argmin(np.abs(np.asarray(y) - z0.imag)))
    return j, i


@dataclass
class ExtendedFrameGrid:
    x: np.ndarray
    y: np.ndarray
    F: list
    B: list
    basepoint: complex
    dressing: L.MatrixLoop
    residuals: np.ndarray
    failures: list = field(default_factory=list)

    def at(self, zeta):
        ny, nx = len(self.y), len(self.x)
        out = np.empty((ny, nx, 2, 2), dtype=np.complex128)
        for j in range(ny):
            for i in range(nx):
                out[j, i] = L.loop_eval(self.F[j][i], zeta)
        return out


@dataclass
class ChartFrameGrid:
    x: np.ndarray
    y: np.ndarray
    zetas: np.ndarray
    values: np.ndarray  # (n_zeta, ny, nx, 2, 2)
    basepoint: complex

    def at(self, zeta):
        k = int(np.argmin(np.abs(self.zetas - zeta)))
        if abs(self.zetas[k] - zeta) > 1e-12:
            raise KeyError(f"zeta {zeta} was not sampled")
        return self.values[k]


@dataclass
class SurfaceMap:
    x: np.ndarray
    y: np.ndarray
    f: np.ndarray  # (ny, nx, 2, 2)

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    def unitarity_defect(self):
        fh = np.conj(np.swapaxes(self.f, -1, -2))
        return float(np.max(np.linalg.norm(fh @ self.f - np.eye(2), axis=(-2, -1))))

    def det_defect(self):
        return float(np.max(np.abs(np.linalg.det(self.f) - 1)))

    def r4(self):
        return su2_to_r4(self.f)


def su2_to_r4(f):
    a = f[..., 0, 0]
    b = f[..., 0, 1]
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def su2_exp(v):
    return expm(np.tensordot(v, SU2_BASIS, axes=1))


# ---------------------------------------------------------------------------
# potential route
# ---------------------------------------------------------------------------

def _grid_transport(pot, x, y, j0, i0, zeta, tol):
    """Psi at every node at fixed zeta: along the base row, then up/down columns."""
    packed = pot.pack(zeta)
    ny, nx = len(y), len(x)
    z = _grid_z(x, y)
    psi = np.empty((ny, nx, 2, 2), dtype=np.complex128)
    psi[j0, i0] = np.eye(2)

    def step(m, a, b):
        out, _, status, _ = T._kernels.rk_segment(m, a, b, packed, tol)
        if status:
            raise T.StiffnessFailure(f"transport failed on segment {a} -> {b}")
        return out / np.sqrt(np.linalg.det(out))

    for i in range(i0 + 1, nx):
        psi[j0, i] = step(psi[j0, i - 1], z[j0, i - 1], z[j0, i])
    for i in range(i0 - 1, -1, -1):
        psi[j0, i] = step(psi[j0, i + 1], z[j0, i + 1], z[j0, i])
    for i in range(nx):
        for j in range(j0 + 1, ny):
            psi[j, i] = step(psi[j - 1, i], z[j - 1, i], z[j, i])
        for j in range(j0 - 1, -1, -1):
            psi[j, i] = step(psi[j + 1, i], z[j + 1, i], z[j, i])
    return psi


def extended_frame(pot, x, y, basepoint=0j, dressing=None, tol=1e-10,
                   trunc=L.DEFAULT_TRUNCATION, samples=None, iwasawa_tol=IW.DEFAULT_TOL,
                   raise_on_failure=True):
    """Transport from the basepoint node over the grid in loop mode and split pointwise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = _grid_z(x, y)
    poles = pot.pole_locations()
    if poles:
        clear = min(np.min(np.abs(z - p)) for p in poles)
        if clear < T.default_delta(poles):
            raise T.PathTooClose("grid node too close to a pole")
    j0, i0 = _nearest_node(x, y, complex(basepoint))
    dressing = L.identity() if dressing is None else dressing
    p = samples or max(64, 4 * (2 * trunc + 1))
    zs = L.unit_samples(p)
    vals = np.stack([_grid_transport(pot, x, y, j0, i0, zt, tol) for zt in zs])
    dv = L.loop_eval(dressing, zs)
    ny, nx = z.shape
    Fs = [[None] * nx for _ in range(ny)]
    Bs = [[None] * nx for _ in range(ny)]
    res = np.zeros((ny, nx))
    failures = []
    for j in range(ny):
        for i in range(nx):
            psi = L.from_samples(dv @ vals[:, j, i], -(p // 2), p - p // 2 - 1)
            psi = psi.truncated(-trunc, trunc).trimmed(1e-16)
            try:
                r = IW.iwasawa(psi, tol=iwasawa_tol)
            except IW.FactorizationFailure as exc:
                if raise_on_failure:
                    raise
                failures.append((j, i, exc.best_residual))
                res[j, i] = exc.best_residual
                continue
            Fs[j][i], Bs[j][i], res[j, i] = r.F, r.B, r.residual
    return ExtendedFrameGrid(x, y, Fs, Bs, complex(z[j0, i0]), dressing, res, failures)


def vacuum_potential(c):
    """xi = (zeta^-1 E+ + c E-) dz; flat commuting case for |c| = 1."""
    return P.DPWPotential({-1: [[0, 1], [0, 0]], 0: [[0, 0], [c, 0]]})


def vacuum_frame(z, zeta, c):
    """Closed-form unitary factor exp(z X - zbar star(X)) at unit zeta."""
    X = np.array([[0, 1 / zeta], [c, 0]])
    Xs = np.array([[0, np.conj(c)], [zeta, 0]])
    return expm(z * X - np.conj(z) * Xs)


# ---------------------------------------------------------------------------
# chart route
# ---------------------------------------------------------------------------

def _expm_traceless(M):
    """exp of a stack of trace-free 2x2 matrices."""
    s = np.sqrt(-np.linalg.det(M) + 0j)
    small = np.abs(s) < 1e-8
    ch = np.cosh(s)
    sh = np.where(small, 1 + s ** 2 / 6, np.sinh(s) / np.where(small, 1, s))
    return ch[..., None, None] * np.eye(2) + sh[..., None, None] * M


def frame_from_chart(data, zetas, basepoint=None, max_residual=None):
    """Right frames dF = -F A of the family at each zeta over the chart grid.

    Steps use the exponential of the averaged endpoint forms (second order);
    F = I at the basepoint node.
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=np.complex128))
    if max_residual is not None:
        r = CH.coefficient_residuals(data)
        if max(r) > max_residual:
            raise ValueError(f"coefficient residuals {r} exceed {max_residual}: "
                             "data is not integrable")
    x, y, h = data.x, data.y, data.h
    ny, nx = data.u.shape
    bp = complex(x[nx // 2], y[ny // 2]) if basepoint is None else complex(basepoint)
    j0, i0 = _nearest_node(x, y, bp)
    out = np.empty((zetas.size, ny, nx, 2, 2), dtype=np.complex128)
    for k, zeta in enumerate(zetas):
        ax, ay = CH.associated_family_form(data, zeta).real_components()
        Fg = np.empty((ny, nx, 2, 2), dtype=np.complex128)
        Fg[j0, i0] = np.eye(2)
        for i in range(i0 + 1, nx):
            Fg[j0, i] = Fg[j0, i - 1] @ _expm_traceless(-0.5 * h * (ax[j0, i - 1] + ax[j0, i]))
        for i in range(i0 - 1, -1, -1):
            Fg[j0, i] = Fg[j0, i + 1] @ _expm_traceless(0.5 * h * (ax[j0, i + 1] + ax[j0, i]))
        for j in range(j0 + 1, ny):
            Fg[j] = Fg[j - 1] @ _expm_traceless(-0.5 * h * (ay[j - 1] + ay[j]))
        for j in range(j0 - 1, -1, -1):
            Fg[j] = Fg[j + 1] @ _expm_traceless(0.5 * h * (ay[j + 1] + ay[j]))
        out[k] = Fg
    return ChartFrameGrid(x, y, zetas, out, complex(x[i0], y[j0]))


# ---------------------------------------------------------------------------
# Sym points and geometry
# ---------------------------------------------------------------------------

def sym_point_surface(frames, unit_tol=1e-8):
    fm = frames.at(-1.0)
    fp = frames.at(1.0)
    for name, v in (("-1", fm), ("+1", fp)):
        d = np.max(np.linalg.norm(np.conj(np.swapaxes(v, -1, -2)) @ v - np.eye(2), axis=(-2, -1)))
        if d > unit_tol:
            raise ValueError(f"frame is not unitary at zeta = {name} (defect {d:.2e})")
    f = fm @ np.linalg.inv(fp)
    j0, i0 = _nearest_node(frames.x, frames.y, frames.basepoint)
    f = np.linalg.inv(f[j0, i0]) @ f
    return SurfaceMap(np.asarray(frames.x), np.asarray(frames.y), f)


def _normal(X, fx, fy):
    """Unit vector in R^4 orthogonal to X, fx, fy (generalised cross product)."""
    M = np.stack([X, fx, fy], axis=-2)
    n = np.empty(X.shape)
    for k in range(4):
        cols = [c for c in range(4) if c != k]
        n[..., k] = (-1) ** k * np.linalg.det(M[..., cols])
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def geometry_report(surface, margin=2):
    """Conformality, mean curvature and Hopf-coefficient estimates (interior sup)."""
    X = surface.r4()
    h = surface.h
    fy, fx = np.gradient(X, h, h, axis=(0, 1))
    fyy = np.gradient(fy, h, axis=0)
    fxx = np.gradient(fx, h, axis=1)
    fxy = np.gradient(fx, h, axis=0)
    s = (slice(margin, -margin), slice(margin, -margin))
    X, fx, fy, fxx, fyy, fxy = (a[s] for a in (X, fx, fy, fxx, fyy, fxy))
    nx_ = np.linalg.norm(fx, axis=-1)
    ny_ = np.linalg.norm(fy, axis=-1)
    if np.max(nx_ + ny_) < 1e-10:
        return {"degenerate": True, "conformality": 0.0, "mean_curvature": 0.0,
                "hopf": 0.0, "h": h}
    conf = np.abs(np.sum(fx * fy, axis=-1)) + np.abs(nx_ - ny_)
    N = _normal(X, fx, fy)
    lam2 = 0.5 * (nx_ ** 2 + ny_ ** 2)
    H = np.sum((fxx + fyy) * N, axis=-1) / (2 * lam2)
    fzz = 0.25 * (fxx - fyy - 2j * fxy)
    hopf = np.sum(fzz * N, axis=-1)
    return {"degenerate": False, "conformality": float(np.max(conf)),
            "mean_curvature": float(np.max(np.abs(H))), "hopf": float(np.max(np.abs(hopf))),
            "hopf_field": hopf, "h": h}


def convergence_order(hs, errs):
    """Least-squares slope of log(err) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


# ---------------------------------------------------------------------------
# comparisons with the Clifford torus
# ---------------------------------------------------------------------------

def torus_defect(f):
    """max over points of | |w1| - 1/sqrt2 | + | |w2| - 1/sqrt2 |."""
    r = 1 / np.sqrt(2)
    return float(np.max(np.abs(np.abs(f[..., 0, 0]) - r) + np.abs(np.abs(f[..., 0, 1]) - r)))


def fit_clifford_translation(f, seeds=8, rng=None, max_points=400):
    """Constant g, h in SU(2) minimising the torus defect of g f h (least squares)."""
    rng = np.random.default_rng(0) if rng is None else rng
    pts = f.reshape(-1, 2, 2)
    if pts.shape[0] > max_points:
        pts = pts[np.linspace(0, pts.shape[0] - 1, max_points).astype(int)]

    def resid(v):
        g = su2_exp(v[:3])
        hh = su2_exp(v[3:])
        m = g @ pts @ hh
        return np.abs(m[:, 0, 0]) ** 2 - 0.5

    best = None
    for _ in range(seeds):
        sol = least_squares(resid, rng.uniform(-np.pi, np.pi, 6), xtol=1e-15, ftol=1e-15,
                            gtol=1e-15)
        if best is None or sol.cost < best.cost:
            best = sol
        if best.cost < 1e-24:
            break
    return su2_exp(best.x[:3]), su2_exp(best.x[3:])


def procrustes_distance(f1, f2):
    """Max pointwise R^4 distance after the best orthogonal map f1 -> f2."""
    a = su2_to_r4(f1).reshape(-1, 4)
    b = su2_to_r4(f2).reshape(-1, 4)
    u, _, vt = np.linalg.svd(a.T @ b)
    R = u @ vt
    return float(np.max(np.linalg.norm(a @ R - b, axis=1)))


# ---------------------------------------------------------------------------
# mesh export
# ---------------------------------------------------------------------------

def stereographic(X, pole=(-1.0, 0.0, 0.0, 0.0)):
    p = np.asarray(pole, dtype=float)
    p = p / np.linalg.norm(p)
    q, _ = np.linalg.qr(np.column_stack([p, np.eye(4)]))
    basis = q[:, 1:4]
    return (X @ basis) / (1 - X @ p)[..., None]


def write_obj(surface, path, pole=(-1.0, 0.0, 0.0, 0.0)):
    V = stereographic(surface.r4(), pole)
    ny, nx, _ = V.shape
    with open(path, "w") as fh:
        for v in V.reshape(-1, 3):
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for j in range(ny - 1):
            for i in range(nx - 1):
                a = j * nx + i + 1
                b, c, d = a + 1, a + nx, a + nx + 1
                fh.write(f"f {a} {b} {d}\nf {a} {d} {c}\n")
