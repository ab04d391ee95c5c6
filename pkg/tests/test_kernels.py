import os
import subprocess
import sys

import numpy as np

from dpwlab import _kernels as K
from dpwlab import potential as PT


def test_convolve_paths_agree():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 2, 2)) + 1j * rng.standard_normal((7, 2, 2))
    b = rng.standard_normal((5, 2, 2)) + 1j * rng.standard_normal((5, 2, 2))
    assert np.max(np.abs(K.convolve(a, b) - K.convolve_numpy(a, b))) < 1e-13


def test_eval_paths_agree():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((9, 2, 2)) + 1j * rng.standard_normal((9, 2, 2))
    zs = np.exp(1j * np.linspace(0, 6, 13)) * 1.1
    assert np.max(np.abs(K.eval_loop(a, -4, zs) - K.eval_loop_numpy(a, -4, zs))) < 1e-12


def test_rk_paths_agree():
    packed = PT.lawson_potential(0, 1).pack(1j)
    psi = np.eye(2, dtype=np.complex128)
    m1 = K.rk_segment(psi, 0.3, 0.8 + 0.3j, packed, 1e-11)[0]
    m2 = K.rk_segment(psi, 0.3, 0.8 + 0.3j, packed, 1e-11, impl=K.rk_segment_py)[0]
    assert np.max(np.abs(m1 - m2)) < 1e-12


def test_disable_flag_selects_fallback():
    env = dict(os.environ, DPWLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c",
                          "from dpwlab import _kernels as K; print(K.USE_NUMBA)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
