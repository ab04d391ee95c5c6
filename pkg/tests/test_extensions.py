import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dpwlab import extensions as EX
from dpwlab import genus2 as G2
from dpwlab import potential as PT

seeds = st.integers(0, 2 ** 31)
P = np.polynomial.polynomial


def setup(seed):
    rng = np.random.default_rng(seed)
    cv = G2.HyperellipticCurve.random(rng)
    return rng, cv, G2.spin_structure(PT.even_partitions()[seed % 10], cv)


def cvec(rng, n=3):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def nonstable_q(rng, cv, S):
    P1 = cv.random_point(rng)
    a, _ = G2.complete_to_KS(P1, S)
    return EX.QuadraticDifferential(P.polymul([-P1.z, 1], [-a.z, 1]))


def test_bezout_matrix_matches_lstsq():
    _, _, S = setup(1)
    ref = O.bezout_by_lstsq(S.P_D(), S.P_Dt())
    assert np.allclose(EX.bezout_matrix(S), ref, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_classification_matches_closed_form(seed):
    rng, cv, S = setup(seed)
    ell = cvec(rng)
    Q = EX.classify_to_quadratic(ell, S)
    ref = O.quadratic_from_functional(ell, S.P_D(), S.P_Dt())
    assert EX.projective_distance(Q.p, ref) < 1e-8
    # the four zeros are kernel points of ell
    for r in Q.zero_fibers:
        pts = [G2.CurvePoint.infinity(1), G2.CurvePoint.infinity(-1)] if not np.isfinite(r) \
            else [cv.point(r, 1), cv.point(r, -1)]
        for pt in pts:
            q = EX.q_from_point(pt, S)
            assert abs(np.dot(ell, q)) < 1e-6 * np.linalg.norm(ell)


@settings(max_examples=10, deadline=None)
@given(seeds, st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_classification_is_projective(seed, lam):
    rng, _, S = setup(seed)
    ell = cvec(rng)
    a = EX.classify_to_quadratic(ell, S).p
    b = EX.classify_to_quadratic(lam * ell, S).p
    assert EX.projective_distance(a, b) < 1e-8


def test_sampled_zero_oracle():
    rng, cv, S = setup(11)
    ell = cvec(rng)
    M = EX.bezout_matrix(S)
    h = lambda z: np.dot(ell, M @ np.array([1, z, z * z]))
    Q = EX.classify_to_quadratic(ell, S)
    finite = [r for r in Q.zero_fibers if np.isfinite(r) and abs(r) < 3.5]
    for z in O.sampled_zero_fibers(h):
        assert min(abs(z - r) for r in Q.zero_fibers if np.isfinite(r)) < 0.1
    for r in finite:
        assert abs(h(r)) < 1e-8 * np.linalg.norm(ell) * np.linalg.norm(M) * (1 + abs(r) ** 2)


def test_trivial_functional_rejected():
    with pytest.raises(ValueError):
        EX.ExtensionFunctional([0, 0, 0])
    with pytest.raises(ValueError):
        EX.QuadraticDifferential([0, 0, 0])


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_stability_agrees_with_decomposition_oracle(seed):
    rng, cv, S = setup(seed)
    for Q in (EX.QuadraticDifferential(cvec(rng)), nonstable_q(rng, cv, S)):
        v = EX.stability_check(Q, S)
        found = EX.decomposition_oracle(Q, S)
        assert v.stable == (found is None)
        if not v.stable:
            assert v.identity_residual < EX.WITNESS_TOL


def test_evaluation_functional_is_nonstable():
    rng, cv, S = setup(4)
    pt = cv.random_point(rng)
    Q = EX.classify_to_quadratic(EX.ExtensionFunctional.evaluation_at(pt), S)
    v = EX.stability_check(Q, S)
    assert not v.stable and v.identity_residual < EX.WITNESS_TOL


def test_double_fiber_cases():
    rng, cv, S = setup(5)
    # generic double fiber is stable
    z0 = cvec(rng, 1)[0]
    Q = EX.QuadraticDifferential(P.polymul([-z0, 1], [-z0, 1]))
    assert EX.stability_check(Q, S).stable and EX.decomposition_oracle(Q, S) is None
    # completion of P contains P itself: the Wronskian of P_D, P_D~ vanishes
    wr = P.polysub(P.polymul(P.polyder(S.P_D()), S.P_Dt()),
                   P.polymul(S.P_D(), P.polyder(S.P_Dt())))
    z0 = [r for r in P.polyroots(wr) if np.min(np.abs(cv.roots - r)) > 1e-3][0]
    Q = EX.QuadraticDifferential(P.polymul([-z0, 1], [-z0, 1]))
    v = EX.stability_check(Q, S)
    assert not v.stable and v.identity_residual < EX.WITNESS_TOL
    assert EX.decomposition_oracle(Q, S) is not None


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_product_subspace(seed):
    rng, cv, S = setup(seed)
    ps = EX.product_subspace(S)
    assert ps.dim == 3
    x, y = cvec(rng, 2), cvec(rng, 2)
    coeffs = np.array([x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]])
    ((l1, m1), (l2, m2)), res = ps.factorize(ps.basis @ coeffs)
    assert res < 1e-9 * np.linalg.norm(ps.basis @ coeffs)
    got = np.array([l1 * l2, l1 * m2 + m1 * l2, m1 * m2])
    assert np.allclose(got, coeffs, atol=1e-9 * np.linalg.norm(coeffs))


def test_factor_sum_of_squares():
    (l1, m1), (l2, m2) = EX.ProductSubspace.factor(1, 0, 1)
    assert np.allclose([l1 * l2, l1 * m2 + m1 * l2, m1 * m2], [1, 0, 1])


def test_lawson_curve_hopf_pairing():
    cv = EX.lawson_curve()
    part = EX.rotation_invariant_partitions(cv)
    assert [p.first for p in part] == [(1, 3, 5)]
    S = G2.spin_structure(part[0], cv)
    ell = EX.hopf_pairing(EX.QuadraticDifferential([0, 1, 0]), cv)
    assert abs(ell.ell[0]) < 1e-8 * abs(ell.ell[1]) and abs(ell.ell[2]) < 1e-8 * abs(ell.ell[1])
    Q = EX.classify_to_quadratic(ell, S)
    assert EX.projective_distance(Q.p, [0, 1, 0]) < 1e-6
    for part in PT.even_partitions():
        assert EX.stability_check(Q, G2.spin_structure(part, cv)).stable


def test_quadrature_failure_reports_estimate():
    cv = G2.HyperellipticCurve.random(np.random.default_rng(2))
    with pytest.raises(EX.QuadratureError) as err:
        EX.hopf_pairing(EX.QuadraticDifferential([1, 0, 0]), cv, tol=1e-15,
                        n_theta=8, n_r=4, max_doublings=1)
    assert err.value.estimate > 0
