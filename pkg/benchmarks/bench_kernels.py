"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times ``gram_batch`` on exhaustive s = 3 enumeration batches, ``sparse_synthesis``
on short coefficient lists, and one end-to-end ``exact_rip_constant`` call
with each backend.
"""
import argparse
import itertools
import os
import subprocess
import sys
import timeit

import numpy as np

from gabor_rip import kernels
from gabor_rip.operator import GaborOperator


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_gram(repeat):
    op = GaborOperator.from_spec("rademacher", 8, 0)
    w = np.exp(2j * np.pi * np.arange(8) / 8)
    supp = np.array(list(itertools.islice(itertools.combinations(range(64), 3), 4096)))
    ell, k = np.divmod(supp, 8)
    return {impl: _best(lambda: kernels.gram_batch(op.shift_table, w, k, ell, impl=impl), repeat, 5)
            for impl in kernels.available()}


def bench_sparse(repeat):
    rng = np.random.default_rng(0)
    op = GaborOperator.from_spec("steinhaus", 256, 0)
    w = np.exp(2j * np.pi * np.arange(256) / 256)
    supp = rng.choice(256 * 256, 8, replace=False)
    ell, k = np.divmod(supp, 256)
    vals = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    return {impl: _best(lambda: kernels.sparse_synthesis(op.g, w, k, ell, vals, impl=impl), repeat, 200)
            for impl in kernels.available()}


def bench_exact_end_to_end():
    code = ("import time; from gabor_rip.operator import GaborOperator;"
            "from gabor_rip.analysis import exact_rip_constant;"
            "op = GaborOperator.from_spec('rademacher', 6, 0); t = time.perf_counter();"
            "exact_rip_constant(op, 3); print(time.perf_counter() - t)")
    out = {}
    for impl, env in (("cython", {}), ("numpy", {"GABOR_RIP_PURE": "1"})):
        if impl not in kernels.available():
            continue
        proc = subprocess.run([sys.executable, "-c", code], env={**os.environ, **env},
                              capture_output=True, text=True, check=True)
        out[impl] = float(proc.stdout)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    print(f"backend at import: {kernels.BACKEND}")
    print("kernel,impl,seconds,speedup_vs_numpy")
    for name, res in (("gram_batch[4096x3x3,n=8]", bench_gram(args.repeat)),
                      ("sparse_synthesis[s=8,n=256]", bench_sparse(args.repeat)),
                      ("exact_rip_constant[n=6,s=3]", bench_exact_end_to_end())):
        base = res["numpy"]
        for impl, t in res.items():
            print(f"{name},{impl},{t:.6g},{base / t:.2f}")


if __name__ == "__main__":
    main()
