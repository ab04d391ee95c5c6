"""Compare the numba kernels with the numpy / pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Part 1 times each kernel pair in-process.  Part 2 runs a holonomy end to end
in two subprocesses, with and without DPWLAB_DISABLE_NUMBA=1.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from dpwlab import _kernels as K
from dpwlab import potential as PT

E2E = """
import time
from dpwlab import potential as PT, transport as T, _kernels as K
pot = PT.lawson_potential(0, 1)
loop = T.loop_around(1, 0.3, 0.3 + 0.2j)
T.holonomy(pot, loop, 1.0)
t = time.perf_counter()
for z in (1.0, 1j, -1.0):
    T.holonomy(pot, loop, z)
print(K.USE_NUMBA, time.perf_counter() - t)
"""


def best_of(fn, repeat):
    fn()
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    a = rng.standard_normal((33, 2, 2)) + 1j * rng.standard_normal((33, 2, 2))
    b = rng.standard_normal((33, 2, 2)) + 1j * rng.standard_normal((33, 2, 2))
    zs = np.exp(2j * np.pi * np.arange(256) / 256)
    packed = PT.lawson_potential(0, 1).pack(1.0)
    psi = np.eye(2, dtype=np.complex128)
    rows = []
    if K.USE_NUMBA:
        rows.append(("convolve 33x33", best_of(lambda: K.convolve(a, b), args.repeat),
                     best_of(lambda: K.convolve_numpy(a, b), args.repeat)))
        rows.append(("eval 33 coeffs at 256", best_of(lambda: K.eval_loop(a, -16, zs), args.repeat),
                     best_of(lambda: K.eval_loop_numpy(a, -16, zs), args.repeat)))
        rows.append(("rk segment", best_of(lambda: K.rk_segment(psi, 0.3, 0.9 + 0.2j, packed, 1e-10),
                                           args.repeat),
                     best_of(lambda: K.rk_segment(psi, 0.3, 0.9 + 0.2j, packed, 1e-10,
                                                  impl=K.rk_segment_py), 1)))
        print(f"{'kernel':24s} {'numba [s]':>12s} {'fallback [s]':>12s} {'speedup':>8s}")
        for name, t1, t0 in rows:
            print(f"{name:24s} {t1:12.3e} {t0:12.3e} {t0 / t1:8.1f}")
    else:
        print("numba disabled in this process; in-process comparison skipped")
    print("\nend to end: three holonomies of the Lawson potential")
    for flag in ("0", "1"):
        env = dict(os.environ, DPWLAB_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"  numba={out[0]:5s}  {float(out[1]):.3f} s")


if __name__ == "__main__":
    main()
