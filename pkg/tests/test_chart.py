import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dpwlab import chart as C
from dpwlab import synthesis as SY


def test_sphere_derivative_matches_closed_form():
    d = C.sphere_data(1 / 64)
    uz, _ = C._dz(d.u, d.h)
    err = np.abs(uz - O.sphere_u_z(d.z))[2:-2, 2:-2]
    assert np.max(err) < 1e-3


def test_sphere_residuals_second_order():
    hs = [1 / 16, 1 / 32, 1 / 64]
    errs = [max(C.coefficient_residuals(C.sphere_data(h))) for h in hs]
    assert SY.convergence_order(hs, errs) > 1.8


def test_clifford_data_is_exactly_flat():
    d = C.clifford_data(1 / 8)
    assert max(C.coefficient_residuals(d)) < 1e-12
    for zeta in (1, 1j, 2.0):
        assert C.flatness_residual(d, zeta) < 1e-12


def test_zero_data_is_not_flat():
    d = C.MinimalChartData.from_functions(lambda z: np.zeros(z.shape),
                                          lambda z: np.zeros(z.shape), (-1, 1, -1, 1), 0.25)
    assert abs(C.flatness_residual(d, 1.0) - np.sqrt(2)) < 1e-12


def test_nonholomorphic_q_shows_in_gauss_codazzi_part():
    d = C.MinimalChartData.from_functions(lambda z: np.zeros(z.shape), np.conj,
                                          (-1, 1, -1, 1), 1 / 16)
    rm, r0, rp = C.coefficient_residuals(d)
    assert r0 > 1.0 and rm < 1e-10 and rp < 1e-10


def test_pole_of_family():
    with pytest.raises(C.PoleOfFamily):
        C.associated_family_form(C.sphere_data(0.25), 0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_unitarity_on_unit_circle(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(2)
    c = rng.standard_normal() + 1j * rng.standard_normal()
    d = C.MinimalChartData.from_functions(lambda z: 0.3 * np.sin(a * z.real + b * z.imag),
                                          lambda z: c * z ** 2, (-1, 1, -1, 1), 0.25)
    for zeta in np.exp(2j * np.pi * rng.random(4)):
        assert C.unitarity_check(C.associated_family_form(d, zeta)) < 1e-12
    assert C.unitarity_check(C.associated_family_form(d, 2.0)) > 1e-3


def test_round_trip(tmp_path):
    d = C.clifford_data(0.5)
    p = tmp_path / "c.json"
    import json
    p.write_text(json.dumps(d.to_dict()))
    e = C.MinimalChartData.load(p)
    assert np.array_equal(e.q, d.q) and np.array_equal(e.u, d.u)


def test_shape_validation():
    with pytest.raises(ValueError):
        C.MinimalChartData(np.arange(3.0), np.arange(2.0), np.zeros((3, 3)), np.zeros((3, 3)))
