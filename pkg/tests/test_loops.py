import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dpwlab import loops as L


def loops(max_deg=4):
    return st.tuples(st.integers(0, 2 ** 31), st.integers(0, max_deg)).map(
        lambda t: L.random_loop(np.random.default_rng(t[0]), t[1], 1.0 + t[1]))


@settings(max_examples=40, deadline=None)
@given(loops(), loops())
def test_product_matches_pointwise(a, b):
    zs = L.unit_samples(16, 0.3)
    lhs = L.loop_eval(L.loop_mul(a, b), zs)
    rhs = L.loop_eval(a, zs) @ L.loop_eval(b, zs)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(loops(), loops())
def test_wiener_norm_submultiplicative(a, b):
    assert L.loop_norm(L.loop_mul(a, b)) <= L.loop_norm(a) * L.loop_norm(b) + 1e-12


@settings(max_examples=40, deadline=None)
@given(loops())
def test_star_is_involution_and_pointwise_adjoint(a):
    s = L.loop_star(a)
    assert np.array_equal(L.loop_star(s).coeffs, a.coeffs)
    zs = L.unit_samples(8, 0.1)
    v = L.loop_eval(a, zs)
    assert np.max(np.abs(L.loop_eval(s, zs) - np.conj(np.swapaxes(v, 1, 2)))) < 1e-13


@settings(max_examples=30, deadline=None)
@given(loops())
def test_fft_round_trip(a):
    p = 4 * (a.degree + 1) + 1
    vals = L.loop_eval(a, L.unit_samples(p))
    back = L.from_samples(vals, a.lo, a.hi)
    assert np.max(np.abs(back.coeffs - a.coeffs)) < 1e-13


def test_truncation_records_tail():
    a = L.random_loop(np.random.default_rng(1), 6, 3.0)
    t = a.truncated(-2, 2)
    assert t.lo == -2 and t.hi == 2
    assert abs(L.loop_norm(t) + t.tail - 3.0) < 1e-12


def test_strict_cap_raises():
    a = L.random_loop(np.random.default_rng(2), 6)
    with pytest.raises(L.TruncationError):
        L.loop_mul(a, a, cap=4, strict=True)


def test_pole_at_origin():
    a = L.monomial(np.eye(2), -1)
    with pytest.raises(L.PoleAtOrigin):
        L.loop_eval(a, 0.0)


def test_classify():
    assert L.classify(L.identity()) == L.LoopClass.PLUS
    rot = L.constant(np.array([[0, 1], [-1, 0]]))
    assert L.classify(rot) == L.LoopClass.UNITARY
    assert L.classify(L.random_loop(np.random.default_rng(3), 3)) == L.LoopClass.GENERAL


def test_plus_inverse():
    b = L.identity() + L.random_loop(np.random.default_rng(4), 3, 0.5, lo=0)
    inv = L.plus_inverse(b, 40)
    prod = L.loop_mul(b, inv).truncated(0, 40)
    assert np.max(np.abs(prod.coeffs[0] - np.eye(2))) < 1e-12
    assert np.max(np.abs(prod.coeffs[1:])) < 1e-10
