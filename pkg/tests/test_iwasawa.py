import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dpwlab import iwasawa as IW
from dpwlab import loops as L


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 8))
def test_split_properties(seed, deg):
    psi = IW.suite_loop(np.random.default_rng(seed), deg)
    rep = IW.split_report(psi)
    assert rep["reconstruction"] < 1e-9
    assert rep["unitarity"] < 1e-9
    assert rep["b0_ok"]


def test_unitary_loop_splits_trivially():
    th = 0.7
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    u = L.loop_mul(L.constant(rot), L.MatrixLoop(-1, [np.zeros((2, 2)), np.diag([1, 0]),
                                                       np.diag([0, 1])]))
    r = IW.iwasawa(u)
    assert np.max(np.abs(r.B.coeff(0) - np.eye(2))) < 1e-9
    assert L.loop_norm(r.B) - 2 ** 0.5 < 1e-9


def test_plus_loop_has_constant_unitary_part():
    b = L.identity() + L.random_loop(np.random.default_rng(7), 3, 0.4, lo=0)
    r = IW.iwasawa(b)
    F0 = r.F.trimmed(1e-9)
    assert F0.lo == 0 and F0.hi == 0
    m = F0.coeff(0)
    assert np.max(np.abs(m.conj().T @ m - np.eye(2))) < 1e-9


def test_spectral_factor_reproduces_J():
    psi = IW.suite_loop(np.random.default_rng(11), 5)
    J = L.loop_star(psi) @ psi
    B = IW.spectral_factorize(J)
    zs = L.unit_samples(64, 0.2)
    bv = L.loop_eval(B, zs)
    assert np.max(np.abs(np.conj(np.swapaxes(bv, 1, 2)) @ bv - L.loop_eval(J, zs))) < 1e-9


def test_not_positive_definite():
    J = L.constant(np.diag([1.0, -1.0]))
    with pytest.raises(IW.NotPositiveDefinite):
        IW.spectral_factorize(J)


def test_blocksize_table_decreases():
    psi = IW.suite_loop(np.random.default_rng(12), 4)
    rows = IW.blocksize_table(psi, sizes=(4, 16, 64))
    assert rows[-1][1] < rows[0][1]
