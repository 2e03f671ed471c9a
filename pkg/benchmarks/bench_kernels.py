"""Compare the numba kernels against their numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--n 2000] [--repeats 5]

The end-to-end section re-runs MAC and Greedy ESP in a subprocess with
MACSPARSE_DISABLE_NUMBA=1 so the fallback path is measured as users get it.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np
import scipy.linalg as sla

from macsparse import _accel


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_table(n, repeats):
    rng = np.random.default_rng(0)
    m = 4 * n
    u, v = rng.integers(0, n, m), rng.integers(0, n, m)
    w, q = rng.uniform(0, 1, m), rng.standard_normal(n)
    x = rng.dirichlet(np.ones(m)) * (m // 10)
    x = np.minimum(x, 1.0)
    phi = np.cumsum(x)
    K = int(np.floor(phi[-1]))
    phi = np.minimum(phi, K)
    phi[-1] = K
    nc = min(n, 600)
    B = rng.standard_normal((nc, nc))
    C = sla.cholesky(B @ B.T + nc * np.eye(nc), lower=True)
    z = rng.standard_normal(nc)

    cases = {
        "edge_quadforms": (lambda: _accel.edge_quadforms_numpy(u, v, w, q),
                           lambda: _accel._edge_quadforms_jit(u, v, w, q)),
        "madow_select": (lambda: _accel.madow_select_numpy(phi, K, 0.3),
                         lambda: _accel._madow_select_jit(phi, K, 0.3)),
        "count_components": (lambda: _accel.count_components_numpy(u, v, w, n),
                             lambda: _accel._count_components_jit(u, v, w, n)),
        "chol_update": (lambda: _accel.chol_update_numpy(np.asfortranarray(C), z),
                        lambda: _accel._chol_update_jit(np.asfortranarray(C), z)),
    }
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, (f_np, f_jit) in cases.items():
        f_jit()  # compile
        t_np, t_jit = best_of(f_np, repeats), best_of(f_jit, repeats)
        print(f"{name:<18}{t_np * 1e3:>12.3f}{t_jit * 1e3:>12.3f}{t_np / t_jit:>10.1f}")


_E2E = """
import json, time
from macsparse.synthetic import manhattan_problem
from macsparse.solver import mac
from macsparse.baselines import greedy_esp
P = manhattan_problem(500, 800, 240, seed=0)
mac(P.with_budget(5)); greedy_esp(P.with_budget(5))
out = {}
for name, fn in (("mac", lambda: mac(P)), ("greedy_esp", lambda: greedy_esp(P))):
    best = float("inf")
    for _ in range(3):
        t = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def end_to_end():
    rows = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, MACSPARSE_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", _E2E], env=env, capture_output=True, text=True, check=True)
        rows[label] = json.loads(res.stdout)
    print(f"\n{'end-to-end (500/800, K=240)':<30}{'numba [ms]':>12}{'numpy [ms]':>12}")
    for name in ("mac", "greedy_esp"):
        print(f"{name:<30}{rows['numba'][name] * 1e3:>12.1f}{rows['numpy'][name] * 1e3:>12.1f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        sys.exit("numba unavailable or disabled; nothing to compare")
    kernel_table(args.n, args.repeats)
    if not args.skip_e2e:
        end_to_end()


if __name__ == "__main__":
    main()
