"""2x2 matrix-valued finite Laurent series in the spectral parameter.

A :class:`MatrixLoop` stores coefficients for the indices ``lo .. hi`` as an
array of shape ``(hi - lo + 1, 2, 2)``.  All operations return new objects.
"""

from dataclasses import dataclass, field
import enum

import numpy as np

from dpwlab import _kernels

DEFAULT_TRUNCATION = 16


class PoleAtOrigin(ValueError):
    pass


class TruncationError(ArithmeticError):
    """Raised by strict products whose dropped tail exceeds the allowance."""

    def __init__(self, tail_norm, cap):
        super().__init__(f"product truncated at |n| <= {cap}; dropped tail norm {tail_norm:.3e}")
        self.tail_norm = tail_norm
        self.cap = cap


class LoopClass(enum.Enum):
    GENERAL = "general"
    UNITARY = "unitary"
    PLUS = "plus"


@dataclass(frozen=True, eq=False)
class MatrixLoop:
    lo: int
    coeffs: np.ndarray
    tail: float = field(default=0.0)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1, 2, 2)
        if not np.all(np.isfinite(c)):
            raise ValueError("loop coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "lo", int(self.lo))

    @property
    def hi(self):
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def degree(self):
        if self.coeffs.shape[0] == 0:
            return 0
        return max(abs(self.lo), abs(self.hi))

    def coeff(self, n):
        k = n - self.lo
        if 0 <= k < self.coeffs.shape[0]:
            return self.coeffs[k]
        return np.zeros((2, 2), dtype=np.complex128)

    def __matmul__(self, other):
        return loop_mul(self, other)

    def __add__(self, other):
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = np.zeros((hi - lo + 1, 2, 2), dtype=np.complex128)
        out[self.lo - lo:self.hi - lo + 1] += self.coeffs
        out[other.lo - lo:other.hi - lo + 1] += other.coeffs
        return MatrixLoop(lo, out, self.tail + other.tail)

    def __neg__(self):
        return MatrixLoop(self.lo, -self.coeffs, self.tail)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return MatrixLoop(self.lo, c * self.coeffs, abs(c) * self.tail)

    def __call__(self, zeta):
        return loop_eval(self, zeta)

    def trimmed(self, atol=0.0):
        """Drop leading/trailing coefficients with Frobenius norm <= atol."""
        norms = np.linalg.norm(self.coeffs, axis=(1, 2))
        keep = np.nonzero(norms > atol)[0]
        if keep.size == 0:
            return MatrixLoop(0, np.zeros((0, 2, 2)), self.tail + norms.sum())
        a, b = keep[0], keep[-1]
        dropped = norms[:a].sum() + norms[b + 1:].sum()
        return MatrixLoop(self.lo + a, self.coeffs[a:b + 1], self.tail + dropped)

    def truncated(self, lo, hi):
        """Restrict to indices lo..hi, adding the dropped Wiener norm to ``tail``."""
        lo = max(lo, self.lo)
        hi = min(hi, self.hi)
        norms = np.linalg.norm(self.coeffs, axis=(1, 2))
        if hi < lo:
            return MatrixLoop(0, np.zeros((0, 2, 2)), self.tail + norms.sum())
        a, b = lo - self.lo, hi - self.lo
        dropped = norms[:a].sum() + norms[b + 1:].sum()
        return MatrixLoop(lo, self.coeffs[a:b + 1], self.tail + dropped)

    def to_dict(self):
        return {
            "lo": self.lo,
            "coeffs": [[[[float(x.real), float(x.imag)] for x in row] for row in m]
                       for m in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d):
        c = np.array(d["coeffs"], dtype=float).reshape(-1, 2, 2, 2)
        return cls(int(d["lo"]), c[..., 0] + 1j * c[..., 1])


def constant(m):
    return MatrixLoop(0, np.asarray(m, dtype=np.complex128)[None])


def identity():
    return constant(np.eye(2))


def monomial(m, n):
    """The loop m * zeta**n."""
    return MatrixLoop(n, np.asarray(m, dtype=np.complex128)[None])


def zero():
    return MatrixLoop(0, np.zeros((0, 2, 2)))


def loop_mul(a, b, cap=None, strict=False, allowance=0.0):
    """Cauchy product.  With ``cap`` the result is restricted to |n| <= cap and
    the dropped Wiener norm is recorded in ``tail`` (or raised if ``strict``)."""
    if a.coeffs.shape[0] == 0 or b.coeffs.shape[0] == 0:
        return zero()
    prod = _kernels.convolve(np.ascontiguousarray(a.coeffs), np.ascontiguousarray(b.coeffs))
    tail = a.tail * (loop_norm(b) + b.tail) + b.tail * loop_norm(a)
    out = MatrixLoop(a.lo + b.lo, prod, tail)
    if cap is None:
        return out
    capped = out.truncated(-cap, cap)
    dropped = capped.tail - out.tail
    if strict and dropped > allowance:
        raise TruncationError(dropped, cap)
    return capped


def loop_eval(a, zeta):
    """Value of the loop at one complex ``zeta`` (or an array of them)."""
    z = np.asarray(zeta, dtype=np.complex128)
    scalar = z.ndim == 0
    zs = np.atleast_1d(z).ravel()
    if a.coeffs.shape[0] == 0:
        out = np.zeros((zs.size, 2, 2), dtype=np.complex128)
    else:
        if a.lo < 0 and np.any(zs == 0):
            raise PoleAtOrigin("loop with negative powers evaluated at zeta = 0")
        out = _kernels.eval_loop(np.ascontiguousarray(a.coeffs), a.lo, zs)
    return out[0] if scalar else out.reshape(z.shape + (2, 2))


def loop_star(a):
    """star(a)(zeta) = a(1/conj(zeta))^H; coefficient-wise star(a)_m = (a_{-m})^H."""
    c = np.conj(np.transpose(a.coeffs[::-1], (0, 2, 1)))
    return MatrixLoop(-a.hi if a.coeffs.shape[0] else 0, c, a.tail)


def loop_norm(a):
    """Wiener norm: sum of Frobenius norms of the coefficients."""
    if a.coeffs.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(a.coeffs, axis=(1, 2)).sum())


def unit_samples(count, offset=0.0):
    return np.exp(2j * np.pi * (np.arange(count) + offset) / count)


def sup_norm(a, samples=64):
    """Max Frobenius norm over ``samples`` equally spaced unit zeta (diagnostic)."""
    vals = loop_eval(a, unit_samples(samples, 0.5))
    return float(np.max(np.linalg.norm(vals, axis=(1, 2))))


def unitarity_defect(a, samples=64):
    zs = unit_samples(samples, 0.5)
    vals = loop_eval(a, zs)
    prod = np.conj(np.transpose(vals, (0, 2, 1))) @ vals - np.eye(2)
    return float(np.max(np.linalg.norm(prod, axis=(1, 2))))


def classify(a, tol=1e-9, samples=64):
    c0 = a.coeff(0)
    if (a.lo >= 0 and abs(c0[1, 0]) <= tol and abs(c0[0, 0].imag) <= tol
            and abs(c0[1, 1].imag) <= tol and c0[0, 0].real > 0 and c0[1, 1].real > 0):
        return LoopClass.PLUS
    if unitarity_defect(a, samples) < tol:
        return LoopClass.UNITARY
    return LoopClass.GENERAL


def from_samples(values, lo, hi):
    """Laurent coefficients lo..hi from values at the P-th roots of unity (FFT).

    ``values`` has shape (P, 2, 2) at zeta_k = exp(2 pi i k / P); P must exceed
    hi - lo so that the requested window is alias-free up to the series tail.
    """
    values = np.asarray(values, dtype=np.complex128)
    p = values.shape[0]
    if hi - lo + 1 > p:
        raise ValueError("too few samples for the requested coefficient window")
    spec = np.fft.fft(values, axis=0) / p
    idx = np.arange(lo, hi + 1) % p
    # fft uses exp(-2 pi i k n / P): spec[n] is the coefficient of zeta**n
    return MatrixLoop(lo, spec[idx])


def plus_inverse(b, degree):
    """Power-series inverse of a plus loop up to ``degree`` (recursive solve)."""
    if b.lo < 0:
        raise ValueError("plus_inverse needs a loop without negative powers")
    b0inv = np.linalg.inv(b.coeff(0))
    out = np.zeros((degree + 1, 2, 2), dtype=np.complex128)
    out[0] = b0inv
    for k in range(1, degree + 1):
        acc = np.zeros((2, 2), dtype=np.complex128)
        for j in range(1, min(k, b.hi) + 1):
            acc += b.coeff(j) @ out[k - j]
        out[k] = -b0inv @ acc
    return MatrixLoop(0, out)


def random_loop(rng, degree, norm=1.0, lo=None):
    """Random loop on indices lo..degree with Wiener norm ``norm``."""
    lo = -degree if lo is None else lo
    n = degree - lo + 1
    c = rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))
    w = np.linalg.norm(c, axis=(1, 2)).sum()
    return MatrixLoop(lo, c * (norm / w))
