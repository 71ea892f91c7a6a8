"""Compare the compiled and pure-Python objective kernels.

Times batch grid evaluation, scalar gradient calls and one full solve per
backend. Run with ``python benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from seqdescent import _kernels
from seqdescent.core import SHUBERT_CENTER, get_objective
from seqdescent.levelset import LevelSetConfig
from seqdescent.solver import SgdConfig, solve


def best_of(fn, repeat, number=1):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_backend(name, n_grid, repeat):
    k = _kernels.load_backend(name)
    X = np.random.default_rng(0).uniform(-10, 10, (n_grid, 2))
    c1, c2 = SHUBERT_CENTER
    x = np.array([7.0, 7.0])
    cfg = SgdConfig(levelset=LevelSetConfig(grid_resolution=400))
    obj = get_objective("shubert-penalized", name)
    return {
        "shubert_values": best_of(lambda: k.shubert_values(X, c1, c2, 0.5), repeat),
        "example1_values": best_of(lambda: k.example1_values(X), repeat),
        "shubert_gradient": best_of(lambda: k.shubert_gradient(x, c1, c2, 0.5), repeat, 2000),
        "solve_penalized_400": best_of(lambda: solve(obj, cfg, x0=(7.0, 7.0)), max(1, repeat // 2)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=400 * 400, help="points per batch call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    names = _kernels.available_backends()
    results = {n: bench_backend(n, args.grid, args.repeat) for n in names}
    print(f"backends: {', '.join(names)}   batch size {args.grid}")
    header = f"{'kernel':<22}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for key in results[names[0]]:
        row = f"{key:<22}" + "".join(f"{results[n][key] * 1e3:>12.3f}ms" for n in names)
        if len(names) == 2:
            row += f"{results['python'][key] / results['cython'][key]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
