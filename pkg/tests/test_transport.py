import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from dpwlab import potential as PT
from dpwlab import transport as T

R = PT.RationalFunction


def single_pole(res, p):
    ent = [[R(np.array([res[r][c]]), np.array([-p, 1])) for c in range(2)] for r in range(2)]
    return PT.DPWPotential({0: ent})


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_constant_potential_matches_expm(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    M -= np.trace(M) / 2 * np.eye(2)
    pot = PT.DPWPotential({0: M.tolist()})
    path = T.Path([0, 0.5 + 0.2j, 0.1 + 0.9j])
    got = T.parallel_transport(pot, path, zeta=1.0)
    ref = O.constant_potential_transport(M, 0, 0.1 + 0.9j)
    assert np.max(np.abs(got - ref)) < 1e-8 * max(1, np.max(np.abs(ref)))


def test_residue_monodromy():
    Rm = np.array([[0.2, 0.3], [0.1j, -0.2]])
    pot = single_pole(Rm, 0.5)
    h = T.holonomy(pot, T.loop_around(0.5, 0.4, 1.5), 1.0)
    w = np.linalg.eigvals(2j * np.pi * Rm)
    assert abs(np.trace(h.value) - np.sum(np.exp(w))) < 1e-8


def test_homotopic_loops_agree():
    pot = PT.lawson_potential(0, 1)
    base = 0.3 + 0.2j
    a = T.holonomy(pot, T.loop_around(1, 0.3, base, sides=16), 1j).value
    b = T.holonomy(pot, T.loop_around(1, 0.35, base, sides=40, start_angle=0.2), 1j).value
    assert np.max(np.abs(a - b)) < 1e-8


def test_lawson_holonomies_do_not_commute():
    pot = PT.lawson_potential(0, 1)
    base = 0.3 + 0.2j
    hols = [T.holonomy(pot, T.loop_around(p, 0.3, base), 1.0) for p in (1, 1j)]
    assert T.abelianness_probe(hols) > 1e-3
    assert max(h.det_defect for h in hols) < 1e-8


def test_loop_mode_matches_fixed():
    pot = PT.lawson_potential(0, 1)
    path = T.Path([0.3 + 0.2j, 0.6 + 0.5j])
    loop = T.parallel_transport(pot, path, mode="loop", trunc=12)
    for zeta in (1.0, 1j, np.exp(0.3j)):
        fixed = T.parallel_transport(pot, path, zeta=zeta)
        assert np.max(np.abs(loop(zeta) - fixed)) < 1e-8


def test_path_too_close():
    pot = PT.lawson_potential(0, 1)
    with pytest.raises(T.PathTooClose):
        T.parallel_transport(pot, T.Path([0.99 - 0.5j, 1.0 + 0.5j]), zeta=1.0)


def test_reversed_path_inverts():
    pot = PT.lawson_potential(0, 1)
    path = T.Path([0.3 + 0.2j, 0.5 + 0.6j, 0.2 + 0.7j])
    a = T.parallel_transport(pot, path, zeta=1j)
    b = T.parallel_transport(pot, path.reversed(), zeta=1j)
    assert np.max(np.abs(a @ b - np.eye(2))) < 1e-8


def test_branch_continuation_cycles_sheets():
    loop = T.loop_around(1, 0.3, 0.3 + 0.2j, sides=64)
    y0 = complex(0.3 + 0.2j) ** 4 - 1
    y0 = y0 ** (1 / 3)
    y1 = T.continue_branch(loop, y0)
    assert abs(y1 - y0) > 1e-3 and abs(y1 ** 3 - y0 ** 3) < 1e-6


def test_path_serialisation(tmp_path):
    import json
    p = T.loop_around(0, 1, 0.5)
    f = tmp_path / "p.json"
    f.write_text(json.dumps(p.to_dict()))
    assert T.Path.load(f) == p
