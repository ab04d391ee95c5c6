"""Iwasawa splitting of matrix loops through spectral factorisation.

``spectral_factorize`` finds the plus loop B with star(B) B = J using the
block-Toeplitz Cholesky scheme: the Cholesky factor of the M-block Toeplitz
matrix of J has a trailing block column that converges to the coefficients of
B as M grows.  M is doubled until the sampled residual meets ``tol``; if the
residual stalls a Newton (Wilson) iteration on the unit circle polishes it.
"""

from dataclasses import dataclass
import time

import numpy as np

from dpwlab import loops as L

DEFAULT_TOL = 1e-10


class NotPositiveDefinite(ValueError):
    pass


class FactorizationFailure(ArithmeticError):
    def __init__(self, msg, best_residual, best=None):
        super().__init__(f"{msg} (best residual {best_residual:.3e})")
        self.best_residual = best_residual
        self.best = best


@dataclass(frozen=True)
class IwasawaResult:
    F: L.MatrixLoop
    B: L.MatrixLoop
    residual: float
    condition: float
    blocks: int
    method: str


def _herm(x):
    return np.conj(np.swapaxes(x, -1, -2))


def _samples_for(degree):
    p = 64
    while p < 4 * (degree + 1):
        p *= 2
    return p


def _factor_residual(B, J, zs):
    bv = L.loop_eval(B, zs)
    jv = L.loop_eval(J, zs)
    return float(np.max(np.linalg.norm(_herm(bv) @ bv - jv, axis=(1, 2))))


def _normalize(B):
    """Constant unitary correction making B(0) upper-triangular with positive diagonal."""
    q, r = np.linalg.qr(B.coeff(0))
    d = np.diag(r).copy()
    phase = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    q = q * phase[None, :]
    out = np.conj(q.T)[None] @ B.coeffs
    out[0, 1, 0] = 0.0
    out[0, 0, 0] = out[0, 0, 0].real
    out[0, 1, 1] = out[0, 1, 1].real
    return L.MatrixLoop(B.lo, out, B.tail)


def check_positive(J, samples=256, herm_tol=1e-9):
    zs = L.unit_samples(samples, 0.5)
    jv = L.loop_eval(J, zs)
    scale = max(1.0, float(np.max(np.abs(jv))))
    if np.max(np.abs(jv - _herm(jv))) > herm_tol * scale:
        raise NotPositiveDefinite("J is not self-adjoint on the unit circle")
    ev = np.linalg.eigvalsh(0.5 * (jv + _herm(jv)))
    if np.min(ev) <= 0:
        k = int(np.argmin(ev.min(axis=1)))
        raise NotPositiveDefinite(
            f"J has eigenvalue {ev.min():.3e} <= 0 at zeta = {zs[k]:.6f}")
    return float(ev.min())


def bauer_factor(J, blocks):
    """One block-Toeplitz Cholesky pass with ``blocks`` blocks; returns B."""
    m = blocks
    T = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for i in range(m):
        for j in range(m):
            T[2 * i:2 * i + 2, 2 * j:2 * j + 2] = J.coeff(j - i)
    T = 0.5 * (T + _herm(T))
    low = np.linalg.cholesky(T)
    R = _herm(low)
    col = R[:, 2 * (m - 1):]
    coeffs = np.empty((m, 2, 2), dtype=np.complex128)
    for k in range(m):
        row = m - 1 - k
        coeffs[k] = col[2 * row:2 * row + 2]
    return L.MatrixLoop(0, coeffs)


def wilson_polish(B, J, samples, iters=30, tol=1e-14):
    """Newton iteration B <- (I + [G]_+) B with G = B^{-H} J B^{-1} - I on the circle."""
    zs = L.unit_samples(samples)
    jv = L.loop_eval(J, zs)
    bv = L.loop_eval(B, zs)
    for _ in range(iters):
        binv = np.linalg.inv(bv)
        g = _herm(binv) @ jv @ binv - np.eye(2)
        spec = np.fft.fft(g, axis=0) / samples
        plus = np.zeros_like(spec)
        half = samples // 2
        plus[1:half] = spec[1:half]
        plus[0] = 0.5 * spec[0]
        gp = np.fft.ifft(plus, axis=0) * samples
        bv = (np.eye(2) + gp) @ bv
        if np.max(np.abs(g)) < tol:
            break
    coeffs = np.fft.fft(bv, axis=0)[: samples // 2] / samples
    return L.MatrixLoop(0, coeffs)


def spectral_factorize(J, tol=DEFAULT_TOL, blocks=None, max_blocks=1024,
                       check=True, return_info=False):
    """Plus loop B (B(0) upper triangular, positive diagonal) with star(B) B = J."""
    if check:
        check_positive(J)
    deg = J.degree
    m = blocks or max(8, 2 * (deg + 1))
    zs = L.unit_samples(_samples_for(max(deg, m)), 0.5)
    best, best_res, best_m = None, np.inf, m
    while True:
        B = _normalize(bauer_factor(J, m).trimmed(tol * 1e-4))
        zs = L.unit_samples(_samples_for(max(deg, B.hi)), 0.5)
        res = _factor_residual(B, J, zs)
        stalled = res > 0.7 * best_res
        if res < best_res:
            best, best_res, best_m = B, res, m
        if best_res < tol or stalled or 2 * m > max_blocks:
            break
        m *= 2
    method = "bauer"
    if best_res >= tol:
        samples = _samples_for(max(deg, best.hi, 64))
        B = _normalize(wilson_polish(best, J, samples).trimmed(tol * 1e-4))
        res = _factor_residual(B, J, L.unit_samples(_samples_for(max(deg, B.hi)), 0.5))
        if res < best_res:
            best, best_res, method = B, res, "bauer+wilson"
    if best_res >= tol:
        raise FactorizationFailure("spectral factorisation did not reach tolerance",
                                   best_res, best)
    best = L.MatrixLoop(best.lo, best.coeffs, best_res)
    if return_info:
        return best, {"blocks": best_m, "residual": best_res, "method": method}
    return best


def iwasawa(psi, tol=DEFAULT_TOL, blocks=None, max_blocks=1024):
    """Split psi = F B with F unitary on |zeta| = 1 and B in the plus class."""
    J = L.loop_star(psi) @ psi
    B, info = spectral_factorize(J, tol=tol, blocks=blocks, max_blocks=max_blocks,
                                 return_info=True)
    p = _samples_for(max(psi.degree, B.hi) * 2)
    zs = L.unit_samples(p)
    bv = L.loop_eval(B, zs)
    binv = np.linalg.inv(bv)
    fv = L.loop_eval(psi, zs) @ binv
    F = L.from_samples(fv, psi.lo, psi.lo + p - 1).trimmed(tol * 1e-4)
    check = L.unit_samples(64, 0.5)
    fc = L.loop_eval(F, check)
    bc = L.loop_eval(B, check)
    recon = np.max(np.linalg.norm(L.loop_eval(psi, check) - fc @ bc, axis=(1, 2)))
    unit = np.max(np.linalg.norm(_herm(fc) @ fc - np.eye(2), axis=(1, 2)))
    cond = float(np.max(np.linalg.cond(bv)))
    return IwasawaResult(F, B, float(max(recon, unit, info["residual"])), cond,
                         info["blocks"], info["method"])


def blocksize_table(psi, tol=DEFAULT_TOL, sizes=(4, 8, 16, 32, 64, 128, 256)):
    """Rows (blocks, factor residual) for the diagnostic CSV."""
    J = L.loop_star(psi) @ psi
    zs = L.unit_samples(_samples_for(max(J.degree, max(sizes))), 0.5)
    rows = []
    for m in sizes:
        B = _normalize(bauer_factor(J, m))
        rows.append((m, _factor_residual(B, J, zs)))
    return rows


def suite_loop(rng, degree, norm=1.0):
    """I + X with X random of Wiener norm ``norm`` on indices -degree..degree.

    A bare random loop is typically close to singular on the unit circle; the
    shift by the identity keeps the test loops in the big cell.
    """
    return L.identity() + L.random_loop(rng, degree, norm)


def split_report(psi, tol=DEFAULT_TOL, samples=256):
    """Reconstruction and unitarity sup norms plus the B(0) normalisation check."""
    t0 = time.perf_counter()
    r = iwasawa(psi, tol=tol)
    secs = time.perf_counter() - t0
    zs = L.unit_samples(samples, 0.25)
    fv = L.loop_eval(r.F, zs)
    recon = np.max(np.abs(L.loop_eval(psi, zs) - fv @ L.loop_eval(r.B, zs)))
    unit = np.max(np.abs(_herm(fv) @ fv - np.eye(2)))
    b0 = r.B.coeff(0)
    b0_ok = bool(r.B.lo >= 0 and b0[1, 0] == 0 and b0[0, 0].imag == 0 and b0[1, 1].imag == 0
                 and b0[0, 0].real > 0 and b0[1, 1].real > 0)
    return {"reconstruction": float(recon), "unitarity": float(unit), "b0_ok": b0_ok,
            "seconds": secs, "blocks": r.blocks, "method": r.method}
