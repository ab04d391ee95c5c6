"""Associated family of flat connections on a rectangular chart.

Local minimal-surface data (u, q) define, in the unitary frame built from the
metric e^{2u}|dz|^2 and the Hopf field q dz^2, the sl2-valued 1-form

    Cz  = [[-u_z/2, zeta^-1 e^u], [-(i/2) e^-u q, u_z/2]]
    Czb = [[u_zb/2, -(i/2) e^-u conj(q)], [-zeta e^u, -u_zb/2]]

Curvature is measured as dA - A^A, i.e. Czb_z - Cz_zb - [Cz, Czb]; with that
sign the zeta^0 part reduces to  u_{z zb} + e^{2u} - |q|^2 e^{-2u}/4 = 0
(diagonal) and holomorphicity of q (off-diagonal).  Round-sphere data is
therefore u = -log(1 + |z|^2) and the Clifford torus is u = 0, |q| = 2.
"""

from dataclasses import dataclass
import json

import numpy as np

E_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
E_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)


class PoleOfFamily(ValueError):
    pass


@dataclass(frozen=True)
class MinimalChartData:
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        u = np.asarray(self.u, dtype=float)
        q = np.asarray(self.q, dtype=np.complex128)
        if u.shape != (y.size, x.size) or q.shape != u.shape:
            raise ValueError("u and q must have shape (len(y), len(x))")
        if not np.all(np.isfinite(u)):
            raise ValueError("conformal factor must be finite")
        for name, v in (("x", x), ("y", y), ("u", u), ("q", q)):
            object.__setattr__(self, name, v)

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    @property
    def z(self):
        return self.x[None, :] + 1j * self.y[:, None]

    @classmethod
    def from_functions(cls, u_fn, q_fn, extent, h):
        x0, x1, y0, y1 = extent
        nx = int(round((x1 - x0) / h)) + 1
        ny = int(round((y1 - y0) / h)) + 1
        x = x0 + h * np.arange(nx)
        y = y0 + h * np.arange(ny)
        z = x[None, :] + 1j * y[:, None]
        u = np.broadcast_to(np.asarray(u_fn(z), dtype=float), z.shape)
        q = np.broadcast_to(np.asarray(q_fn(z), dtype=np.complex128), z.shape)
        return cls(x, y, u, q)

    def to_dict(self):
        return {"x0": float(self.x[0]), "y0": float(self.y[0]), "h": self.h,
                "nx": int(self.x.size), "ny": int(self.y.size),
                "u": self.u.tolist(),
                "q": np.stack([self.q.real, self.q.imag], -1).tolist()}

    @classmethod
    def from_dict(cls, d):
        h = float(d["h"])
        x = float(d["x0"]) + h * np.arange(int(d["nx"]))
        y = float(d["y0"]) + h * np.arange(int(d["ny"]))
        q = np.asarray(d["q"], dtype=float)
        return cls(x, y, np.asarray(d["u"], dtype=float), q[..., 0] + 1j * q[..., 1])

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def sphere_data(h, extent=(-1.0, 1.0, -1.0, 1.0)):
    return MinimalChartData.from_functions(lambda z: -np.log1p(np.abs(z) ** 2),
                                           lambda z: np.zeros_like(z), extent, h)


def clifford_data(h, extent=(-1.0, 1.0, -1.0, 1.0), phase=1j):
    """u = 0 and constant q of modulus 2 (flat Clifford torus)."""
    q0 = 2.0 * phase / abs(phase)
    return MinimalChartData.from_functions(lambda z: np.zeros(z.shape),
                                           lambda z: np.full(z.shape, q0), extent, h)


@dataclass(frozen=True)
class ConnectionFormPair:
    Cz: np.ndarray
    Czbar: np.ndarray
    zeta: complex

    def real_components(self):
        """(A_x, A_y) with A = A_x dx + A_y dy."""
        return self.Cz + self.Czbar, 1j * (self.Cz - self.Czbar)


def _dz(f, h):
    fy, fx = np.gradient(f, h, h, edge_order=2)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def _field_dz(F, h):
    """Wirtinger derivatives of a (ny, nx, 2, 2) field."""
    fy, fx = np.gradient(F, h, h, axis=(0, 1), edge_order=2)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def _parts(data):
    """zeta-independent parts (C0z, C0zb) and Higgs coefficients (Phi_z, Phi*_zb)."""
    h = data.h
    uz, uzb = _dz(data.u, h)
    eu = np.exp(data.u)
    shape = data.u.shape + (2, 2)
    c0z = np.zeros(shape, dtype=np.complex128)
    c0zb = np.zeros(shape, dtype=np.complex128)
    c0z[..., 0, 0] = -uz / 2
    c0z[..., 1, 1] = uz / 2
    c0z[..., 1, 0] = -0.5j * data.q / eu
    c0zb[..., 0, 0] = uzb / 2
    c0zb[..., 1, 1] = -uzb / 2
    c0zb[..., 0, 1] = -0.5j * np.conj(data.q) / eu
    phi = eu[..., None, None] * E_PLUS
    phistar = eu[..., None, None] * E_MINUS
    return c0z, c0zb, phi, phistar


def associated_family_form(data, zeta):
    if zeta == 0:
        raise PoleOfFamily("associated family has a pole at zeta = 0")
    c0z, c0zb, phi, phistar = _parts(data)
    return ConnectionFormPair(c0z + phi / zeta, c0zb - zeta * phistar, complex(zeta))


def _comm(a, b):
    return a @ b - b @ a


def _interior_sup(field, margin=2):
    inner = field[margin:-margin, margin:-margin]
    if inner.size == 0:
        raise ValueError("grid has no interior points")
    return float(np.max(np.linalg.norm(inner, axis=(-2, -1))))


def curvature(data, zeta):
    form = associated_family_form(data, zeta)
    dz_czb, _ = _field_dz(form.Czbar, data.h)
    _, dzb_cz = _field_dz(form.Cz, data.h)
    return dz_czb - dzb_cz - _comm(form.Cz, form.Czbar)


def flatness_residual(data, zeta):
    """Sup over interior grid points of the Frobenius norm of the curvature."""
    return _interior_sup(curvature(data, zeta))


def coefficient_fields(data):
    """Curvature split by powers of zeta: (zeta^-1, zeta^0, zeta^+1) fields."""
    c0z, c0zb, phi, phistar = _parts(data)
    h = data.h
    dz_c0zb, _ = _field_dz(c0zb, h)
    _, dzb_c0z = _field_dz(c0z, h)
    _, dzb_phi = _field_dz(phi, h)
    dz_phistar, _ = _field_dz(phistar, h)
    km1 = -dzb_phi - _comm(phi, c0zb)
    k0 = dz_c0zb - dzb_c0z - _comm(c0z, c0zb) + _comm(phi, phistar)
    kp1 = -dz_phistar + _comm(c0z, phistar)
    return km1, k0, kp1


def coefficient_residuals(data):
    """(r_-1, r_0, r_+1): interior sup norms of the zeta-coefficients of the curvature.

    In this frame the zeta^-1 and zeta^+1 parts (the Higgs field equations)
    vanish identically up to discretisation; Gauss and Codazzi equations,
    including holomorphicity of q, live in the zeta^0 part.
    """
    return tuple(_interior_sup(f) for f in coefficient_fields(data))


def hopf_dbar_residual(data):
    """Interior sup of |d q / d zbar| (diagnostic for non-holomorphic input)."""
    _, qzb = _dz(data.q, data.h)
    return float(np.max(np.abs(qzb[2:-2, 2:-2])))


def unitarity_check(form):
    """Sup over the grid of the hermitian part of the form on dx and dy."""
    ax, ay = form.real_components()
    hx = ax + np.conj(np.swapaxes(ax, -1, -2))
    hy = ay + np.conj(np.swapaxes(ay, -1, -2))
    return float(max(np.max(np.linalg.norm(hx, axis=(-2, -1))),
                     np.max(np.linalg.norm(hy, axis=(-2, -1)))))


def residual_rows(data, zetas):
    """CSV rows (zeta, r_-1, r_0, r_+1, flatness)."""
    r = coefficient_residuals(data)
    return [(complex(z), *r, flatness_residual(data, z)) for z in zetas]
