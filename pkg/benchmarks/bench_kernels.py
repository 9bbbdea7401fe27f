"""Benchmark the compiled kernels against the pure NumPy fallback.

Times the two hot paths (single walk-operator assembly and weighted batch
accumulation) on both backends across graph sizes, confirms bitwise
agreement on each case, and prints a speedup table.

Run:  python benchmarks/bench_kernels.py [--sizes 8,16,32] [--batch 64]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from szwalk import _kernels_py
from szwalk.graphs import MarkedSet, build_transition_matrix, complete_graph
from szwalk.percolation import PercolationModel, _sqrt_batch
from szwalk.rng import philox_stream

try:
    from szwalk import _kernels_cy
except ImportError:
    _kernels_cy = None


def _sqrt_cases(n: int, batch: int) -> np.ndarray:
    """Marked square-root factors for `batch` random percolated samples."""
    g = complete_graph(n)
    model = PercolationModel(g, 0.3, "bond_flip")
    rng = philox_stream(12345, n)
    flips = rng.random((batch, model.a_c)) < model.p
    membership = model.membership_from_flips(flips)
    return _sqrt_batch(model, membership, MarkedSet((0,), n))


def _best_of(func, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def bench_assemble(qs: np.ndarray, repeats: int):
    q = np.ascontiguousarray(qs[0])
    ref = _kernels_py.assemble_walk(q)
    t_py = _best_of(lambda: _kernels_py.assemble_walk(q), repeats)
    if _kernels_cy is None:
        return t_py, None, True
    out = _kernels_cy.assemble_walk(q)
    agree = bool(np.array_equal(out, ref))
    t_cy = _best_of(lambda: _kernels_cy.assemble_walk(q), repeats)
    return t_py, t_cy, agree


def bench_accumulate(qs: np.ndarray, repeats: int):
    dim = qs.shape[1] ** 2
    weights = np.full(qs.shape[0], 1.0 / qs.shape[0])

    def run(mod):
        out = np.zeros((dim, dim))
        out_sq = np.zeros((dim, dim))
        mod.accumulate_walk(qs, weights, out, out_sq)
        return out, out_sq

    ref = run(_kernels_py)
    t_py = _best_of(lambda: run(_kernels_py), repeats)
    if _kernels_cy is None:
        return t_py, None, True
    got = run(_kernels_cy)
    agree = bool(np.array_equal(got[0], ref[0]) and np.array_equal(got[1], ref[1]))
    t_cy = _best_of(lambda: run(_kernels_cy), repeats)
    return t_py, t_cy, agree


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,16,32", help="comma list of vertex counts")
    parser.add_argument("--batch", type=int, default=64, help="samples per accumulation")
    parser.add_argument("--repeats", type=int, default=3, help="best-of repeats")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",")]
    if _kernels_cy is None:
        print("compiled extension unavailable; timing the fallback only")
    header = f"{'case':<24}{'python':>12}{'cython':>12}{'speedup':>10}  bitwise"
    print(header)
    print("-" * len(header))
    ok = True
    for n in sizes:
        qs = _sqrt_cases(n, args.batch)
        for label, fn in (("assemble", bench_assemble), ("accumulate", bench_accumulate)):
            t_py, t_cy, agree = fn(qs, args.repeats)
            ok = ok and agree
            case = f"{label} n={n}" + (f" b={args.batch}" if label == "accumulate" else "")
            if t_cy is None:
                print(f"{case:<24}{t_py:>11.4f}s{'-':>12}{'-':>10}  -")
            else:
                print(
                    f"{case:<24}{t_py:>11.4f}s{t_cy:>11.4f}s{t_py / t_cy:>9.1f}x"
                    f"  {'yes' if agree else 'NO'}"
                )
    if not ok:
        print("BACKEND MISMATCH: outputs are not bitwise identical")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
