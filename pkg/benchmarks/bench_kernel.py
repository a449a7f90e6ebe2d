"""Compare the compiled group-ring kernel with the numpy fallback on random int64 operands."""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from calcforge import _backend


def _time(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def run(sizes, N: int, repeat: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        A = rng.integers(-3, 4, size=(N, n, n), dtype=np.int64)
        B = rng.integers(-3, 4, size=(N, n, n), dtype=np.int64)
        ref = _backend.cyclic_matmul_numpy(A, B)
        row = {"N": N, "size": n, "numpy_s": _time(_backend.cyclic_matmul_numpy, A, B, repeat=repeat)}
        if _backend._kernel is not None:
            assert np.array_equal(_backend._kernel.cyclic_matmul(A, B), ref)
            row["cython_s"] = _time(_backend._kernel.cyclic_matmul, A, B, repeat=repeat)
            row["speedup"] = row["numpy_s"] / row["cython_s"]
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 16, 64])
    ap.add_argument("--N", type=int, default=8, help="cyclotomic level (ring axis length)")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"kernel selected at import: {_backend.KERNEL}")
    for row in run(args.sizes, args.N, args.repeat, args.seed):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
