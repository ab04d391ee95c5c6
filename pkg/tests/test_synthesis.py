import numpy as np

from dpwlab import chart as C
from dpwlab import loops as L
from dpwlab import potential as PT
from dpwlab import synthesis as SY


def vacuum_grid(n=5, c=1.0):
    x = np.linspace(-0.4, 0.4, n)
    return SY.extended_frame(SY.vacuum_potential(c), x, x, trunc=12)


def test_vacuum_frame_matches_closed_form():
    g = vacuum_grid()
    Z = g.x[None, :] + 1j * g.y[:, None]
    for zeta in (1.0, -1.0, 1j):
        F = g.at(zeta)
        ref = np.array([[SY.vacuum_frame(z, zeta, 1.0) for z in row] for row in Z])
        assert np.max(np.abs(F - ref)) < 1e-6


def test_sym_surface_is_clifford_up_to_isometry():
    s = SY.sym_point_surface(vacuum_grid())
    assert s.unitarity_defect() < 1e-9 and s.det_defect() < 1e-9
    g, h = SY.fit_clifford_translation(s.f)
    assert SY.torus_defect(g @ s.f @ h) < 1e-5


def test_chart_route_matches_potential_route():
    h = 0.1
    data = C.clifford_data(h, (-0.4, 0.4, -0.4, 0.4))
    fr = SY.frame_from_chart(data, [-1.0, 1.0], basepoint=0j)
    sc = SY.sym_point_surface(fr)
    x = data.x
    sv = SY.sym_point_surface(SY.extended_frame(SY.vacuum_potential(1.0), x, x, trunc=12))
    D = np.diag([1.0, -1.0])
    assert np.max(np.abs(D @ sc.f @ D - sv.f)) < 1e-4


def test_empty_potential_is_degenerate():
    x = np.linspace(-0.2, 0.2, 5)
    s = SY.sym_point_surface(SY.extended_frame(PT.DPWPotential({}), x, x))
    assert SY.geometry_report(s)["degenerate"]


def test_clifford_geometry():
    x = np.linspace(-0.4, 0.4, 9)
    s = SY.sym_point_surface(SY.extended_frame(SY.vacuum_potential(1.0), x, x, trunc=12))
    geo = SY.geometry_report(s)
    assert geo["mean_curvature"] < 0.05 and geo["conformality"] < 0.05


def test_dressing():
    x = np.linspace(-0.3, 0.3, 5)
    pot = SY.vacuum_potential(1.0)
    s0 = SY.sym_point_surface(SY.extended_frame(pot, x, x, trunc=12))
    u = L.constant(SY.su2_exp(np.array([0.3, -0.5, 0.8])))
    s1 = SY.sym_point_surface(SY.extended_frame(pot, x, x, dressing=u, trunc=12))
    assert SY.procrustes_distance(s0.f, s1.f) < 1e-9
    d = L.identity() + L.random_loop(np.random.default_rng(0), 2, 0.3, lo=0)
    s2 = SY.sym_point_surface(SY.extended_frame(pot, x, x, dressing=d, trunc=12))
    assert s2.unitarity_defect() < 1e-9
    assert SY.procrustes_distance(s0.f, s2.f) > 1e-3


def test_obj_export(tmp_path):
    x = np.linspace(-0.2, 0.2, 4)
    s = SY.sym_point_surface(SY.extended_frame(SY.vacuum_potential(1.0), x, x, trunc=10))
    p = tmp_path / "m.obj"
    SY.write_obj(s, p)
    lines = p.read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 16
    assert sum(l.startswith("f ") for l in lines) == 18


def test_convergence_order_of_exact_power():
    hs = np.array([0.1, 0.05, 0.025])
    assert abs(SY.convergence_order(hs, 3 * hs ** 2) - 2) < 1e-12
