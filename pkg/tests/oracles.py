"""Independent reference computations used by the tests.

Each oracle is built from a different construction than the code it checks.
"""

import numpy as np
from scipy.linalg import expm

P = np.polynomial.polynomial


# -- extensions ---------------------------------------------------------------

def bezout_by_lstsq(pd, pdt):
    """Matrix B[i, j] of (P_D(z) P_D~(w) - P_D~(z) P_D(w)) / (z - w), found by
    solving B(z, w) (z - w) = numerator as a linear system on coefficients."""
    pd = np.asarray(pd, dtype=np.complex128)
    pdt = np.asarray(pdt, dtype=np.complex128)
    num = np.outer(pd, pdt) - np.outer(pdt, pd)
    A = np.zeros((16, 9), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            A[(i + 1) * 4 + j, i * 3 + j] += 1
            A[i * 4 + j + 1, i * 3 + j] -= 1
    b, *_ = np.linalg.lstsq(A, num.ravel(), rcond=None)
    return b.reshape(3, 3)


def quadratic_from_functional(ell, pd, pdt):
    """p(w) = sum_k ell_k [z^k] B(z, w), the closed form of the classification."""
    return np.asarray(ell) @ bezout_by_lstsq(pd, pdt)


def sampled_zero_fibers(h, radius=4.0, n=161):
    """Coarse minima of |h| on a grid: existence oracle for zeros of z -> h(z)."""
    xs = np.linspace(-radius, radius, n)
    Z = xs[None, :] + 1j * xs[:, None]
    V = np.abs(np.vectorize(h)(Z))
    mins = []
    for j in range(1, n - 1):
        for i in range(1, n - 1):
            w = V[j - 1:j + 2, i - 1:i + 2]
            if V[j, i] == w.min() and V[j, i] < 0.05 * np.median(V):
                mins.append(Z[j, i])
    return mins


# -- genus 2 ------------------------------------------------------------------

def _linf_basis(m):
    """Basis of L(m (inf+ + inf-)) as (a, b) pairs meaning a(z) + b(z) y."""
    out = [(np.eye(m + 1)[i], np.zeros(1)) for i in range(m + 1)]
    out += [(np.zeros(1), np.eye(m - 2)[j]) for j in range(m - 2)]
    return out


def _eval(basis, pts):
    return np.array([[P.polyval(z, a) + P.polyval(z, b) * y for (a, b) in basis]
                     for (z, y) in pts])


def linearly_equivalent_oracle(curve, D1, D2, rng, m=4):
    """Equivalence of effective affine divisors with distinct generic points.

    Pick g in L(m inf - D2); its divisor is D2 + E - m inf.  Then D1 ~ D2 iff
    D1 + E is cut out by L(m inf), i.e. the evaluation matrix on D1 + E drops rank.
    """
    basis = _linf_basis(m)
    M2 = _eval(basis, [(p.z, p.y) for p in D2])
    _, _, vh = np.linalg.svd(M2)
    null = vh[len(D2):].conj().T
    coef = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
    a = np.zeros(m + 1, dtype=np.complex128)
    b = np.zeros(max(m - 2, 1), dtype=np.complex128)
    for c, (pa, pb) in zip(coef, basis):
        a[: pa.size] += c * pa
        b[: pb.size] += c * pb
    norm = P.polysub(P.polymul(a, a), P.polymul(P.polymul(b, b), curve.f))
    E = []
    for z in np.roots(norm[::-1]):
        if any(abs(z - p.z) < 1e-6 for p in D2):
            continue
        y = -P.polyval(z, a) / P.polyval(z, b)
        E.append((z, y))
    pts = [(p.z, p.y) for p in D1] + E
    s = np.linalg.svd(_eval(basis, pts), compute_uv=False)
    return s[-1] / s[0] < 1e-8


# -- chart data ---------------------------------------------------------------

def sphere_u_z(z):
    """d/dz of -log(1 + |z|^2) in closed form."""
    return -np.conj(z) / (1 + np.abs(z) ** 2)


def constant_potential_transport(M, z0, z1):
    """Psi(z1) for dPsi = Psi M dz with Psi(z0) = I."""
    return expm((z1 - z0) * M)
