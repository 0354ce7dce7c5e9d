"""Compare the compiled and numpy braid kernels on protocol-sized workloads.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from fibdistill import kernels
from fibdistill.anyons import enumerate_basis
from fibdistill.braids import BraidWord, generator_table

CASES = [
    # (dots, tau count, columns, crossings)
    (4, 4, 1, 5_000),
    (8, 4, 8, 5_000),
    (8, None, 16, 5_000),
    (12, 6, 4, 2_000),
]


def random_word(rng, strands, length):
    idx = rng.integers(1, strands, size=length)
    sgn = rng.choice([-1, 1], size=length)
    return BraidWord(strands, tuple(zip(idx.tolist(), sgn.tolist())))


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'dots':>4} {'dim':>6} {'cols':>4} {'crossings':>9} {'numpy s':>9} {'cython s':>9} {'speedup':>8}")
    for dots, taus, cols, length in CASES:
        basis = enumerate_basis(dots, tau_count=taus)
        tab = generator_table(basis)
        gates = tab.gate_ids(random_word(rng, dots, length))
        psi = rng.normal(size=(len(basis), cols)) + 1j * rng.normal(size=(len(basis), cols))
        args_ = (tab.src1, tab.c1, tab.src2, tab.c2, gates, psi)
        t_py = time_call(lambda: kernels.python_apply_gate_sequence(*args_), args.repeat)
        if kernels.BACKEND == "cython":
            t_cy = time_call(lambda: kernels.apply_gate_sequence(*args_), args.repeat)
            diff = np.abs(kernels.apply_gate_sequence(*args_) - kernels.python_apply_gate_sequence(*args_)).max()
            assert diff < 1e-10, diff
            speed = f"{t_py / t_cy:8.1f}"
            t_cy_s = f"{t_cy:9.4f}"
        else:
            t_cy_s, speed = f"{'n/a':>9}", f"{'n/a':>8}"
        print(f"{dots:>4} {len(basis):>6} {cols:>4} {length:>9} {t_py:9.4f} {t_cy_s} {speed}")


if __name__ == "__main__":
    main()
