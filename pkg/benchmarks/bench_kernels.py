"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--T 6 10 25] [--repeat 200]

Each kernel is run once before timing so numba compilation is excluded.
Results agree between backends to the printed max abs difference.
"""

import argparse
import time

import numpy as np

from coordscope.classifier import enumerate_sets
from coordscope.kernels import _numba, _numpy
from coordscope.problems import IndexMap, ProblemDims


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            out = fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best, out


def family_indices(T):
    im = IndexMap(ProblemDims(T))
    family = enumerate_sets(T)
    idx = [im.time_indices(S.times) for S in family]
    offsets = np.cumsum([0] + [len(i) for i in idx]).astype(np.int64)
    return np.concatenate(idx).astype(np.int64), offsets


def cases(T, rng):
    u1, u2 = rng.uniform(-1, 1, T), rng.uniform(-1, 1, T)
    args = (u1, u2, 0.5, 1.0, 1.5)
    H = _numpy.dynamic_hessian(*args)
    indices, offsets = family_indices(T)
    n = 8 * T
    fbar, c = rng.uniform(0, 5, n), rng.integers(1, 6, n).astype(float)
    q = np.full(n, 1.0 / n)
    return {
        "dynamic_gradient": lambda k: k.dynamic_gradient(*args),
        "dynamic_hessian": lambda k: k.dynamic_hessian(*args),
        "subblock_pd_flags": lambda k: k.subblock_pd_flags(H, indices, offsets, 1e-8),
        "project_simplex": lambda k: k.project_simplex(fbar),
        "pgd_simplex(2000 steps)": lambda k: k.pgd_simplex(fbar, c, q, q.copy(), 2000, 1e-3)[0],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[6, 10, 25])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'T':>4}{'numpy us':>12}{'numba us':>12}{'speedup':>9}{'max diff':>11}")
    for T in args.T:
        for name, call in cases(T, rng).items():
            reps = max(1, args.repeat // 20) if name.startswith("pgd") else args.repeat
            t_np, out_np = best_of(lambda: call(_numpy), reps)
            t_nb, out_nb = best_of(lambda: call(_numba), reps)
            diff = float(np.max(np.abs(np.asarray(out_np, dtype=float) - np.asarray(out_nb, dtype=float))))
            print(f"{name:<26}{T:>4}{t_np * 1e6:>12.1f}{t_nb * 1e6:>12.1f}{t_np / t_nb:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
