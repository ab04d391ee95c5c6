"""Hot numeric kernels.

Every kernel exists as a plain Python/numpy function. When numba is importable
and ``DPWLAB_DISABLE_NUMBA`` is not set to ``1``, the loop-heavy ones are
compiled with ``@njit``; otherwise the vectorised numpy path is used.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DPWLAB_DISABLE_NUMBA", "0") != "1"


def _jit(fn):
    if USE_NUMBA:
        return njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# Laurent-series convolution and evaluation
# ---------------------------------------------------------------------------

def convolve_loop(a, b):
    """Cauchy product of two (m,2,2) / (n,2,2) coefficient stacks, loop form."""
    m = a.shape[0]
    n = b.shape[0]
    out = np.zeros((m + n - 1, 2, 2), dtype=np.complex128)
    for i in range(m):
        for j in range(n):
            k = i + j
            for r in range(2):
                for c in range(2):
                    out[k, r, c] += a[i, r, 0] * b[j, 0, c] + a[i, r, 1] * b[j, 1, c]
    return out


def convolve_numpy(a, b):
    m = a.shape[0]
    n = b.shape[0]
    out = np.zeros((m + n - 1, 2, 2), dtype=np.complex128)
    if m <= n:
        for i in range(m):
            out[i:i + n] += a[i] @ b
    else:
        for j in range(n):
            out[j:j + m] += a @ b[j]
    return out


def eval_loop_horner(coeffs, lo, zetas):
    """Evaluate sum_k coeffs[k] zeta**(lo+k) at every zeta (Horner)."""
    m = coeffs.shape[0]
    p = zetas.shape[0]
    out = np.zeros((p, 2, 2), dtype=np.complex128)
    for s in range(p):
        z = zetas[s]
        acc00 = 0j
        acc01 = 0j
        acc10 = 0j
        acc11 = 0j
        for k in range(m - 1, -1, -1):
            acc00 = acc00 * z + coeffs[k, 0, 0]
            acc01 = acc01 * z + coeffs[k, 0, 1]
            acc10 = acc10 * z + coeffs[k, 1, 0]
            acc11 = acc11 * z + coeffs[k, 1, 1]
        scale = z ** lo
        out[s, 0, 0] = acc00 * scale
        out[s, 0, 1] = acc01 * scale
        out[s, 1, 0] = acc10 * scale
        out[s, 1, 1] = acc11 * scale
    return out


def eval_loop_numpy(coeffs, lo, zetas):
    powers = zetas[:, None] ** (lo + np.arange(coeffs.shape[0]))[None, :]
    return np.einsum("pk,kij->pij", powers, coeffs)


# ---------------------------------------------------------------------------
# Packed rational potential and Dormand-Prince transport
# ---------------------------------------------------------------------------

def eval_packed(z, num, nlen, den, dlen, ent, wts, out):
    """Accumulate sum_t wts[t] num_t(z)/den_t(z) into entry ent[t] of ``out``."""
    out[0, 0] = 0j
    out[0, 1] = 0j
    out[1, 0] = 0j
    out[1, 1] = 0j
    for t in range(num.shape[0]):
        pn = 0j
        for k in range(nlen[t] - 1, -1, -1):
            pn = pn * z + num[t, k]
        pd = 0j
        for k in range(dlen[t] - 1, -1, -1):
            pd = pd * z + den[t, k]
        e = ent[t]
        out[e // 2, e % 2] += wts[t] * pn / pd


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])


def _rk_segment(psi0, z0, z1, num, nlen, den, dlen, ent, wts, tol, h0, hmin,
                max_steps, C, A, B5, B4):
    """Integrate dPsi/dt = Psi xi(z0 + t(z1-z0)) (z1-z0) on t in [0, 1].

    Returns (psi, accepted_steps, status, last_h); status 0 ok, 1 step
    underflow, 2 step budget exhausted.
    """
    dz = z1 - z0
    psi = psi0.copy()
    k = np.zeros((7, 2, 2), dtype=np.complex128)
    xi = np.zeros((2, 2), dtype=np.complex128)
    ytmp = np.zeros((2, 2), dtype=np.complex128)
    t = 0.0
    h = min(h0, 1.0)
    steps = 0
    tries = 0
    while t < 1.0:
        if tries >= max_steps:
            return psi, steps, 2, h
        tries += 1
        if t + h > 1.0:
            h = 1.0 - t
        for s in range(7):
            for r in range(2):
                for c in range(2):
                    acc = psi[r, c]
                    for j in range(s):
                        acc += h * A[s, j] * k[j, r, c]
                    ytmp[r, c] = acc
            eval_packed(z0 + (t + C[s] * h) * dz, num, nlen, den, dlen, ent, wts, xi)
            for r in range(2):
                for c in range(2):
                    k[s, r, c] = (ytmp[r, 0] * xi[0, c] + ytmp[r, 1] * xi[1, c]) * dz
        err = 0.0
        for r in range(2):
            for c in range(2):
                d5 = 0j
                d4 = 0j
                for s in range(7):
                    d5 += B5[s] * k[s, r, c]
                    d4 += B4[s] * k[s, r, c]
                e = abs(h * (d5 - d4))
                if e > err:
                    err = e
                ytmp[r, c] = psi[r, c] + h * d5
        ratio = err / tol
        if ratio <= 1.0:
            t += h
            if t > 1.0 - 1e-14:
                t = 1.0
            steps += 1
            for r in range(2):
                for c in range(2):
                    psi[r, c] = ytmp[r, c]
        if ratio == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * ratio ** (-0.2)
            if fac > 5.0:
                fac = 5.0
            if fac < 0.2:
                fac = 0.2
        h = h * fac
        if h < hmin and t < 1.0:
            return psi, steps, 1, h
    return psi, steps, 0, h


eval_packed_py = eval_packed

if USE_NUMBA:
    convolve = _jit(convolve_loop)
    eval_loop = _jit(eval_loop_horner)
    eval_packed = _jit(eval_packed)
    _rk_segment_impl = _jit(_rk_segment)
else:
    convolve = convolve_numpy
    eval_loop = eval_loop_numpy
    _rk_segment_impl = _rk_segment

rk_segment_py = _rk_segment


def rk_segment(psi0, z0, z1, packed, tol, h0=0.05, hmin=1e-12, max_steps=200000,
               impl=None):
    num, nlen, den, dlen, ent, wts = packed
    fn = _rk_segment_impl if impl is None else impl
    return fn(np.ascontiguousarray(psi0, dtype=np.complex128), complex(z0),
              complex(z1), num, nlen, den, dlen, ent, wts, float(tol), float(h0),
              float(hmin), int(max_steps), _C, _A, _B5, _B4)
