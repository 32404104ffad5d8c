#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-NumPy fallback.

Two views:
  * micro: raw scan / learn kernel throughput at several node counts
  * end-to-end: observe+predict throughput of a full model run, executed in
    subprocesses so each backend is selected at import time

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lpart import kernels


def timeit(fn, *args, repeat=5, inner=200):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def micro(quick=False):
    try:
        from lpart import _native
    except ImportError:
        print("compiled kernels unavailable; micro comparison skipped")
        return
    rng = np.random.default_rng(0)
    dim = 10
    print(f"{'nodes':>8} {'pure scan':>12} {'native scan':>12} {'speedup':>8}")
    for nodes in (64, 512, 4096) if not quick else (64, 512):
        weights = rng.random((nodes, 2 * dim))
        norms = weights.sum(axis=1)
        r = rng.random(dim)
        coded = np.concatenate([r, 1.0 - r])
        norm_coded = float(coded.sum())
        out_t, out_v = np.empty(nodes), np.empty(nodes)

        t_pure = timeit(kernels.scan_pure, weights, norms, nodes, coded, 0.001, norm_coded)
        t_native = timeit(
            _native.scan, weights, norms, nodes, coded, 0.001, norm_coded, out_t, out_v
        )
        print(f"{nodes:>8} {t_pure * 1e6:>10.1f}us {t_native * 1e6:>10.1f}us "
              f"{t_pure / t_native:>7.1f}x")

    weights = rng.random((512, 2 * dim))
    coded = np.concatenate([rng.random(dim), np.zeros(dim)])
    coded[dim:] = 1.0 - coded[:dim]
    t_pure = timeit(kernels.min_learn_pure, weights, 3, coded, 0.5)
    t_native = timeit(_native.min_learn, weights, 3, coded, 0.5)
    print(f"{'learn':>8} {t_pure * 1e6:>10.1f}us {t_native * 1e6:>10.1f}us "
          f"{t_pure / t_native:>7.1f}x")


_END_TO_END = r"""
import time
import numpy as np
from lpart import KERNEL_BACKEND, ArtHyperParams, LpartHyperParams, LpartModel

rng = np.random.default_rng(11)
params = LpartHyperParams(num_classes=10, art=ArtHyperParams(rho=0.8, beta=0.5))
model = LpartModel(10, params)
samples = rng.random((N, 10))
labels = rng.integers(0, 10, size=N)
start = time.perf_counter()
for i in range(N):
    model.observe(samples[i], int(labels[i]) if i % 100 == 0 else None)
for i in range(0, N, 5):
    model.predict(samples[i])
elapsed = time.perf_counter() - start
ops = N + N // 5
print(f"{KERNEL_BACKEND:>7} backend: {model.num_nodes:4d} nodes, "
      f"{ops / elapsed:9.0f} ops/s ({elapsed:.2f}s)")
"""


def end_to_end(quick=False):
    n = 5_000 if quick else 20_000
    code = f"N = {n}\n" + _END_TO_END
    for backend in ("pure", "native"):
        env = dict(os.environ, LPART_KERNEL=backend)
        result = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        if result.returncode != 0:
            tail = result.stderr.strip().splitlines()[-1] if result.stderr else "?"
            print(f"{backend:>7} backend: unavailable ({tail})")
        else:
            print(result.stdout, end="")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    print(f"selected backend at import: {kernels.BACKEND}\n")
    print("== kernel micro-benchmark ==")
    micro(args.quick)
    print("\n== end-to-end observe/predict ==")
    end_to_end(args.quick)


if __name__ == "__main__":
    main()
